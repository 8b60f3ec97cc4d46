#include "agegraph/optimizer.hpp"

#include <cmath>

#include "agegraph/errors.hpp"

namespace agegraph {

void AdamW::step(ParamStore& store, double lr) {
    if (lr < 0.0) throw DomainError("adam: negative learning rate");
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (auto& entry : store.entries()) {
        Matrix& theta = entry.value;
        Matrix& g = entry.grad;
        Matrix& m = entry.m;
        Matrix& v = entry.v;
        for (std::size_t i = 0; i < theta.rows(); ++i)
            for (std::size_t j = 0; j < theta.cols(); ++j) {
                double grad = g(i, j);
                m(i, j) = cfg_.beta1 * m(i, j) + (1.0 - cfg_.beta1) * grad;
                v(i, j) = cfg_.beta2 * v(i, j) + (1.0 - cfg_.beta2) * grad * grad;
                double mhat = m(i, j) / bc1;
                double vhat = v(i, j) / bc2;
                theta(i, j) -= lr * (mhat / (std::sqrt(vhat) + cfg_.eps) +
                                     cfg_.weight_decay * theta(i, j));
            }
        theta.ensure_finite(("adam update of " + entry.name).c_str());
    }
}

double cosine_lr(long step, long total_steps, double lr_max, double lr_min) {
    if (total_steps <= 0) throw DomainError("cosine_lr: total_steps must be positive");
    if (step < 0) step = 0;
    if (step > total_steps) step = total_steps;
    double frac = static_cast<double>(step) / static_cast<double>(total_steps);
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(frac * 3.14159265358979323846));
}

}  // namespace agegraph
