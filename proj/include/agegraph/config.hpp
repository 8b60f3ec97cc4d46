#pragma once

#include <cstdint>
#include <string>

#include "agegraph/dataset.hpp"
#include "agegraph/gcn.hpp"
#include "agegraph/optimizer.hpp"
#include "agegraph/rl.hpp"
#include "agegraph/walk.hpp"

namespace agegraph {

// Everything a run needs, with the reference defaults baked in. The raw
// config text travels along so reports can echo it verbatim.
struct PipelineConfig {
    uint64_t seed = 1;

    double graph_threshold = 0.936;
    std::size_t patches_per_side = 14;

    bool walk_enabled = true;
    WalkConfig walk;        // p=1 q=1 walks=10 length=20 window=4
    double walk_tau = 0.824;

    bool attention_enabled = true;
    std::size_t heads = 8;
    std::size_t dk = 0;  // 0: derived as feature width / heads
    bool hadamard = false;

    StackConfig stack;  // depth=12 width=64 beta_min=0.05 mode=Full

    RlConfig rl;  // gamma=0.9 eps 1->0.05 horizon=20 sync=500 batch=32 ...

    AdamConfig adam;  // lr=0.001 wd=0.0005 beta1=0.9 beta2=0.999
    std::size_t epochs = 120;
    double train_fraction = 0.8;
    bool raw_epsilon = false;

    SyntheticSpec synth;

    std::string source_text;  // verbatim file contents plus any CLI overrides
};

PipelineConfig default_config();

// key = value lines, '#' comments, later assignments win. Unknown keys and
// out-of-range values raise ConfigError.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Appends an explicit assignment so the echoed text still reproduces the run.
void override_seed(PipelineConfig& cfg, uint64_t seed);

// Canonical full listing of every key at its current value.
std::string render_config(const PipelineConfig& cfg);

// What reports and run directories embed: the verbatim source when the
// config came from a file, the canonical listing otherwise.
std::string config_echo(const PipelineConfig& cfg);

}  // namespace agegraph
