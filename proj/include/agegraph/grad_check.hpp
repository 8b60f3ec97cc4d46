#pragma once

#include <functional>
#include <string>
#include <vector>

#include "agegraph/param_store.hpp"
#include "agegraph/tape.hpp"

namespace agegraph {

struct GradCheckOptions {
    double eps = 1e-5;          // central-difference step
    double tol = 1e-4;          // max relative error allowed
    double margin_factor = 10;  // kink margin must exceed margin_factor * eps
};

struct GradCheckEntry {
    std::string param;
    double max_rel_error = 0.0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    std::size_t checked = 0;
};

struct GradCheckResult {
    std::vector<GradCheckEntry> entries;
    double max_rel_error = 0.0;
    std::string worst_param;
    // Smallest relu/abs/clamp kink margin seen across the baseline and every
    // probe evaluation. When kink_safe is false a probe may have stepped
    // across a kink and the numeric gradient is unreliable; the caller should
    // re-run with a different input draw instead of trusting pass/fail.
    double kink_margin = 0.0;
    bool kink_safe = false;
    bool deterministic = false;
    bool passed = false;
};

// Builds the loss on a fresh tape from the current parameter values and
// returns the loss node. Must be a pure function of the store contents.
using TapeLossFn = std::function<Tape::NodeId(Tape&, ParamStore&)>;

// Central-difference check of every scalar in every parameter against the
// tape's reverse-mode gradient. Relative error per scalar is
// |a - n| / max(|a|, |n|, 1e-8). Restores parameter values on exit.
GradCheckResult check_gradients(ParamStore& store, const TapeLossFn& loss_fn,
                                const GradCheckOptions& opt = {});

}  // namespace agegraph
