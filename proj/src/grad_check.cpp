#include "agegraph/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

struct Eval {
    double loss;
    double kink_margin;
};

Eval eval_loss(ParamStore& store, const TapeLossFn& loss_fn) {
    Tape tape;
    Tape::NodeId loss = loss_fn(tape, store);
    return {tape.scalar(loss), tape.kink_margin()};
}

}  // namespace

GradCheckResult check_gradients(ParamStore& store, const TapeLossFn& loss_fn,
                                const GradCheckOptions& opt) {
    GradCheckResult result;

    Eval base_a = eval_loss(store, loss_fn);
    Eval base_b = eval_loss(store, loss_fn);
    result.deterministic = base_a.loss == base_b.loss;
    result.kink_margin = std::min(base_a.kink_margin, base_b.kink_margin);

    store.zero_grad();
    {
        Tape tape;
        Tape::NodeId loss = loss_fn(tape, store);
        if (tape.scalar(loss) != base_a.loss) result.deterministic = false;
        tape.backward(loss);
    }

    for (const auto& entry : store.entries()) {
        GradCheckEntry report;
        report.param = entry.name;
        Matrix& theta = store.value(entry.name);
        const Matrix& analytic = store.grad(entry.name);
        for (std::size_t i = 0; i < theta.rows(); ++i) {
            for (std::size_t j = 0; j < theta.cols(); ++j) {
                double saved = theta(i, j);
                theta(i, j) = saved + opt.eps;
                Eval plus = eval_loss(store, loss_fn);
                theta(i, j) = saved - opt.eps;
                Eval minus = eval_loss(store, loss_fn);
                theta(i, j) = saved;
                result.kink_margin =
                    std::min({result.kink_margin, plus.kink_margin, minus.kink_margin});

                double numeric = (plus.loss - minus.loss) / (2.0 * opt.eps);
                double a = analytic(i, j);
                double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
                double rel = std::fabs(a - numeric) / denom;
                ++report.checked;
                if (rel > report.max_rel_error) {
                    report.max_rel_error = rel;
                    report.analytic_at_worst = a;
                    report.numeric_at_worst = numeric;
                }
            }
        }
        if (report.max_rel_error > result.max_rel_error) {
            result.max_rel_error = report.max_rel_error;
            result.worst_param = report.param;
        }
        result.entries.push_back(std::move(report));
    }

    result.kink_safe = result.kink_margin > opt.margin_factor * opt.eps;
    result.passed = result.deterministic && result.max_rel_error <= opt.tol;
    return result;
}

}  // namespace agegraph
