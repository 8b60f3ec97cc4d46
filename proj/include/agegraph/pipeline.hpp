#pragma once

#include <array>
#include <string>
#include <vector>

#include "agegraph/config.hpp"
#include "agegraph/grad_check.hpp"
#include "agegraph/metrics.hpp"

namespace agegraph {

// Generates the configured synthetic dataset under out_dir and returns the
// dataset file path. Also drops a per-group census and the config echo.
std::string run_synth(const PipelineConfig& cfg, const std::string& out_dir);

struct TrainResult {
    MetricsReport train_report;
    MetricsReport test_report;
    std::vector<double> warm_loss;       // mean supervised loss per epoch
    std::vector<double> episode_reward;  // mean reward per rl pass
    std::string checkpoint_path;
};

// Full training run: ingest, split, warm supervised phase, rl phase,
// checkpoint plus train/validation reports. Deterministic in (config, seed).
TrainResult run_train(const PipelineConfig& cfg, const std::string& dataset_path,
                      const std::string& out_dir);

// Greedy-policy evaluation of a checkpoint over a dataset.
MetricsReport run_eval(const PipelineConfig& cfg, const std::string& checkpoint_path,
                       const std::string& dataset_path, const std::string& out_dir);

// Finite-difference check of the full model at a small preset (12 nodes,
// width 8, depth 4, 2 heads). Redraws on kink-adjacent evaluations.
GradCheckResult run_gradcheck(const PipelineConfig& cfg, const std::string& out_dir,
                              double tolerance = 1e-4);

struct AblationRow {
    std::string name;
    double mae_value = 0.0;
    double cs5 = 0.0;
    std::array<double, 10> group_mae{};
    std::array<long, 10> group_count{};
};

// Known variant names for `ablate`; anything else is a ConfigError.
const std::vector<std::string>& ablation_variant_names();
PipelineConfig apply_variant(const PipelineConfig& cfg, const std::string& name);

// Baseline plus each requested variant, trained on the same dataset and
// seed; rows land in a comparison table under out_dir.
std::vector<AblationRow> run_ablation(const PipelineConfig& cfg,
                                      const std::vector<std::string>& variants,
                                      const std::string& dataset_path,
                                      const std::string& out_dir);

}  // namespace agegraph
