#pragma once

#include "agegraph/param_store.hpp"

namespace agegraph {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0005;  // decoupled, scaled by the effective lr
};

// Adam with decoupled weight decay. Moments live in the ParamStore so they
// ride along with checkpoints.
class AdamW {
public:
    explicit AdamW(AdamConfig cfg = {}) : cfg_(cfg) {}

    // Applies one update from the accumulated gradients, then leaves the
    // gradients untouched (callers zero_grad when they are done).
    void step(ParamStore& store) { step(store, cfg_.lr); }
    void step(ParamStore& store, double lr);

    long steps() const { return t_; }
    void set_steps(long t) { t_ = t; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    long t_ = 0;
};

// Cosine annealing from lr_max down to lr_min over total_steps; step is
// clamped to [0, total_steps].
double cosine_lr(long step, long total_steps, double lr_max, double lr_min = 1e-6);

}  // namespace agegraph
