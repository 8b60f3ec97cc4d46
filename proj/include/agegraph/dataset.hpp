#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "agegraph/graph.hpp"

namespace agegraph {

// Plain-text sample records (see docs/FORMATS.md). Round trips are bit-exact:
// floats are written with 17 significant digits.
std::vector<LabeledSample> read_samples(const std::string& path);
void write_samples(const std::string& path, std::span<const LabeledSample> samples);

struct SyntheticSpec {
    std::size_t n_samples = 500;
    std::size_t nodes = 12;
    std::size_t feat_width = 16;
    // Relative draw weights for age groups 0..9; empty means uniform over all
    // ten. Trailing groups may be omitted (treated as weight 0).
    std::vector<double> group_weights;
    double noise = 0.05;
    bool with_sigma = true;
};

// Deterministic feature synthesis: a per-dataset sinusoidal basis evaluated
// at the sample's age plus seeded Gaussian noise, so age stays recoverable.
// Same spec and seed give identical samples.
std::vector<LabeledSample> generate_synthetic(const SyntheticSpec& spec,
                                              uint64_t seed);

// Seeded shuffle split; first fraction goes to train, remainder to test.
std::pair<std::vector<LabeledSample>, std::vector<LabeledSample>> split_dataset(
    std::span<const LabeledSample> samples, double train_fraction, uint64_t seed);

}  // namespace agegraph
