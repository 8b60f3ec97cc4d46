#include "agegraph/rl.hpp"

#include <algorithm>
#include <cmath>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

constexpr std::size_t kGroups = 10;
constexpr std::size_t kCols = 10;

int clamp_grid(int v) { return v < 0 ? 0 : (v > 9 ? 9 : v); }

Matrix state_input(const Matrix& embedding, const GridPosition& pos) {
    if (embedding.rows() != 1)
        throw DimensionError("q_forward: embedding must be a 1-row matrix, got " +
                             embedding.shape_str());
    Matrix in(1, embedding.cols() + kGroups + kCols);
    for (std::size_t j = 0; j < embedding.cols(); ++j) in(0, j) = embedding(0, j);
    in(0, embedding.cols() + static_cast<std::size_t>(pos.row)) = 1.0;
    in(0, embedding.cols() + kGroups + static_cast<std::size_t>(pos.col)) = 1.0;
    return in;
}

// Trunk and heads kept row-general so single-state queries and stacked
// replay batches share one code path.
Matrix trunk_rows(const ParamStore& store, const Matrix& x) {
    if (x.cols() != store.value("q.trunk.w1").rows())
        throw DimensionError("q_forward: input width " + std::to_string(x.cols()) +
                             " does not match trunk " +
                             store.value("q.trunk.w1").shape_str());
    auto affine_relu = [&](const Matrix& h, const char* w, const char* b) {
        Matrix z = matmul(h, store.value(w));
        const Matrix& bias = store.value(b);
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) {
                z(i, j) += bias(0, j);
                if (z(i, j) < 0.0) z(i, j) = 0.0;
            }
        return z;
    };
    return affine_relu(affine_relu(x, "q.trunk.w1", "q.trunk.b1"), "q.trunk.w2",
                       "q.trunk.b2");
}

Matrix head_rows(const ParamStore& store, const Matrix& z2, const char* w,
                 const char* b) {
    Matrix out = matmul(z2, store.value(w));
    const Matrix& bias = store.value(b);
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += bias(0, j);
    return out;
}

std::size_t argmax_row(const Matrix& m) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m.cols(); ++j)
        if (m(0, j) > m(0, best)) best = j;
    return best;
}

}  // namespace

GridPosition encode_age(int age) {
    if (age < 0) throw DomainError("encode_age: negative age " + std::to_string(age));
    if (age > 99) age = 99;
    return {age / 10, age % 10};
}

int decode_position(const GridPosition& pos) {
    if (pos.row < 0 || pos.row > 9 || pos.col < 0 || pos.col > 9)
        throw DomainError("decode_position: position off the grid");
    return 10 * pos.row + pos.col;
}

GridPosition apply_action(const GridPosition& pos, Action a) {
    GridPosition next = pos;
    switch (a) {
        case Action::RowUp: next.row = clamp_grid(pos.row + 1); break;
        case Action::RowDown: next.row = clamp_grid(pos.row - 1); break;
        case Action::ColUp: next.col = clamp_grid(pos.col + 1); break;
        case Action::ColDown: next.col = clamp_grid(pos.col - 1); break;
        case Action::Stay: break;
    }
    return next;
}

ImbalanceTable ImbalanceTable::balanced() {
    ImbalanceTable t;
    t.ratio.fill(1.0);
    return t;
}

ImbalanceTable ImbalanceTable::from_counts(const std::array<long, 10>& counts) {
    long majority = 0;
    for (long c : counts) majority = std::max(majority, c);
    if (majority <= 0) return balanced();
    ImbalanceTable t;
    double worst = 1.0;
    for (std::size_t g = 0; g < kGroups; ++g)
        if (counts[g] > 0)
            worst = std::max(worst, static_cast<double>(majority) /
                                        static_cast<double>(counts[g]));
    for (std::size_t g = 0; g < kGroups; ++g)
        t.ratio[g] = counts[g] > 0 ? static_cast<double>(majority) /
                                         static_cast<double>(counts[g])
                                   : worst;
    return t;
}

double reward(const GridPosition& pos, const GridPosition& target,
              const ImbalanceTable& table, const RewardConfig& cfg) {
    double rho = cfg.use_imbalance ? table.ratio[static_cast<std::size_t>(target.row)]
                                   : 1.0;
    double iota = cfg.use_distance
                      ? static_cast<double>(std::abs(pos.row - target.row) +
                                            std::abs(pos.col - target.col))
                      : 1.0;
    if (pos.row == target.row && pos.col == target.col) return rho;
    if (pos.row == target.row) return -iota * std::sqrt(rho);
    return -iota * rho;
}

EnvResult env_step(const AgentState& state, Action action, const GridPosition& target,
                   const ImbalanceTable& table, std::size_t max_steps,
                   const RewardConfig& cfg) {
    if (state.steps_taken >= max_steps)
        throw StateError("env_step: episode already finished");
    EnvResult out;
    out.state = state;
    out.state.position = apply_action(state.position, action);
    out.state.steps_taken = state.steps_taken + 1;
    out.reward = reward(out.state.position, target, table, cfg);
    out.done = action == Action::Stay || out.state.steps_taken >= max_steps;
    return out;
}

GridEnv::GridEnv(Matrix embedding, GridPosition start, GridPosition target,
                 const ImbalanceTable& table, std::size_t max_steps, RewardConfig cfg)
    : target_(target), table_(table), max_steps_(max_steps), cfg_(cfg) {
    state_.embedding = std::move(embedding);
    state_.position = start;
    state_.steps_taken = 0;
}

std::pair<double, bool> GridEnv::step(Action a) {
    if (done_) throw StateError("GridEnv: step on finished episode");
    EnvResult r = env_step(state_, a, target_, table_, max_steps_, cfg_);
    state_ = std::move(r.state);
    done_ = r.done;
    return {r.reward, r.done};
}

void init_qnet_params(ParamStore& store, const QNetConfig& cfg, Rng& rng) {
    std::size_t in = cfg.embed_dim + kGroups + kCols;
    std::size_t h = cfg.hidden;
    store.add("q.trunk.w1", Matrix::glorot(in, h, rng));
    store.add("q.trunk.b1", Matrix(1, h));
    store.add("q.trunk.w2", Matrix::glorot(h, h, rng));
    store.add("q.trunk.b2", Matrix(1, h));
    store.add("q.head_q.w", Matrix::glorot(h, kActionCount, rng));
    store.add("q.head_q.b", Matrix(1, kActionCount));
    store.add("q.head_cls.w", Matrix::glorot(h, kGroups, rng));
    store.add("q.head_cls.b", Matrix(1, kGroups));
    store.add("q.head_reg.w", Matrix::glorot(h, 1, rng));
    store.add("q.head_reg.b", Matrix::filled(1, 1, cfg.reg_bias_init));
}

QOutput q_forward(const ParamStore& store, const Matrix& embedding,
                  const GridPosition& pos) {
    Matrix z2 = trunk_rows(store, state_input(embedding, pos));
    QOutput out;
    out.q = head_rows(store, z2, "q.head_q.w", "q.head_q.b");
    out.class_logits = head_rows(store, z2, "q.head_cls.w", "q.head_cls.b");
    out.age = head_rows(store, z2, "q.head_reg.w", "q.head_reg.b")(0, 0);
    return out;
}

namespace {

// Trunk plus heads from an already-assembled input node; rows carry
// independent states, so replay batches go through in one pass.
QTapeOut q_heads_tape(Tape& tape, ParamStore& store, Tape::NodeId in) {
    if (tape.value(in).cols() != store.value("q.trunk.w1").rows())
        throw DimensionError("q_forward_tape: input width " +
                             std::to_string(tape.value(in).cols()) +
                             " does not match trunk");
    auto z1 = tape.relu(tape.add_row_broadcast(
        tape.matmul(in, tape.param(store, "q.trunk.w1")),
        tape.param(store, "q.trunk.b1")));
    auto z2 = tape.relu(tape.add_row_broadcast(
        tape.matmul(z1, tape.param(store, "q.trunk.w2")),
        tape.param(store, "q.trunk.b2")));
    QTapeOut out;
    out.q = tape.add_row_broadcast(tape.matmul(z2, tape.param(store, "q.head_q.w")),
                                   tape.param(store, "q.head_q.b"));
    out.class_logits = tape.add_row_broadcast(
        tape.matmul(z2, tape.param(store, "q.head_cls.w")),
        tape.param(store, "q.head_cls.b"));
    out.age = tape.add_row_broadcast(tape.matmul(z2, tape.param(store, "q.head_reg.w")),
                                     tape.param(store, "q.head_reg.b"));
    return out;
}

}  // namespace

QTapeOut q_forward_tape(Tape& tape, ParamStore& store, Tape::NodeId embedding,
                        const GridPosition& pos) {
    Matrix onehots(1, kGroups + kCols);
    onehots(0, static_cast<std::size_t>(pos.row)) = 1.0;
    onehots(0, kGroups + static_cast<std::size_t>(pos.col)) = 1.0;
    auto in = tape.concat_cols(embedding, tape.constant(std::move(onehots)));
    return q_heads_tape(tape, store, in);
}

Action select_action(const Matrix& q_values, double epsilon, Rng& rng) {
    if (q_values.rows() != 1 || q_values.cols() != kActionCount)
        throw DimensionError("select_action: expected 1x5 values, got " +
                             q_values.shape_str());
    if (epsilon < 0.0 || epsilon > 1.0)
        throw DomainError("select_action: epsilon outside [0,1]");
    if (rng.uniform() < epsilon)
        return static_cast<Action>(rng.uniform_int(kActionCount));
    return static_cast<Action>(argmax_row(q_values));
}

double double_q_target(double r, bool done, const Matrix& q_next_online,
                       const Matrix& q_next_target, double gamma) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw DomainError("double_q_target: gamma must lie in (0,1)");
    if (done) return r;
    std::size_t best = argmax_row(q_next_online);
    return r + gamma * q_next_target(0, best);
}

double focal_loss(const Matrix& probabilities, int true_group, double tau) {
    if (probabilities.rows() != 1)
        throw DimensionError("focal_loss: expected a probability row");
    if (true_group < 0 || static_cast<std::size_t>(true_group) >= probabilities.cols())
        throw DomainError("focal_loss: true group out of range");
    double total = 0.0;
    for (std::size_t j = 0; j < probabilities.cols(); ++j) {
        if (probabilities(0, j) < 0.0)
            throw DomainError("focal_loss: negative probability");
        total += probabilities(0, j);
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw DomainError("focal_loss: probabilities sum to " + std::to_string(total));
    double p = probabilities(0, static_cast<std::size_t>(true_group));
    if (p < 1e-12) p = 1e-12;
    return -std::pow(1.0 - p, tau) * std::log(p);
}

double combined_loss(const Matrix& class_probs, int true_group, double age_pred,
                     double age_true, double eta, double tau) {
    if (eta < 0.0 || eta > 1.0) throw DomainError("combined_loss: eta outside [0,1]");
    return eta * focal_loss(class_probs, true_group, tau) +
           (1.0 - eta) * std::fabs(age_pred - age_true);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw DomainError("replay: capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (items_.size() < batch)
        throw StateError("replay: buffer holds " + std::to_string(items_.size()) +
                         " transitions, batch wants " + std::to_string(batch));
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k)
        out.push_back(items_[rng.uniform_int(items_.size())]);
    return out;
}

GridPosition start_position(const ParamStore& store, const Matrix& embedding) {
    QOutput probe = q_forward(store, embedding, {4, 4});
    return {static_cast<int>(argmax_row(probe.class_logits)), 4};
}

namespace {

// Transition states stacked one per row, current or next position one-hots.
Matrix stacked_inputs(const std::vector<Transition>& batch, bool next) {
    const std::size_t d = batch.front().embedding.cols();
    Matrix x(batch.size(), d + kGroups + kCols);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        const GridPosition& pos = next ? t.next_pos : t.pos;
        for (std::size_t j = 0; j < d; ++j) x(i, j) = t.embedding(0, j);
        x(i, d + static_cast<std::size_t>(pos.row)) = 1.0;
        x(i, d + kGroups + static_cast<std::size_t>(pos.col)) = 1.0;
    }
    return x;
}

Matrix copy_row(const Matrix& m, std::size_t i) {
    Matrix r(1, m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) r(0, j) = m(i, j);
    return r;
}

// One gradient step on a replayed batch: Huber on the Double-DQN targets plus
// lambda * (eta * focal + (1-eta) * |age error|) from the shared trunk. The
// whole batch runs as one stacked forward; per-item losses come off its rows.
void optimize_batch(ParamStore& store, const ParamStore& target_store,
                    const std::vector<Transition>& batch, const RlConfig& cfg,
                    AdamW& opt) {
    Matrix xnext = stacked_inputs(batch, true);
    Matrix q_online = head_rows(store, trunk_rows(store, xnext), "q.head_q.w",
                                "q.head_q.b");
    Matrix q_target = head_rows(target_store, trunk_rows(target_store, xnext),
                                "q.head_q.w", "q.head_q.b");

    Tape tape;
    auto in = tape.constant(stacked_inputs(batch, false));
    QTapeOut qo = q_heads_tape(tape, store, in);
    auto probs = tape.row_softmax(qo.class_logits);

    Tape::NodeId total = -1;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        double y = double_q_target(t.reward, t.done, copy_row(q_online, i),
                                   copy_row(q_target, i), cfg.gamma);
        auto qsa = tape.pick(qo.q, i, static_cast<std::size_t>(t.action));
        auto td = tape.sub(qsa, tape.constant(Matrix::filled(1, 1, y)));
        auto loss = tape.huber(td, 1.0);

        auto p = tape.clamp_min(
            tape.pick(probs, i, static_cast<std::size_t>(t.target_group)), 1e-12);
        auto one_minus = tape.clamp_min(tape.affine(p, 1.0, -1.0), 1e-12);
        auto focal = tape.scale(
            tape.hadamard(tape.pow_const(one_minus, cfg.tau_focal), tape.log(p)), -1.0);
        auto reg = tape.abs(tape.sub(tape.pick(qo.age, i, 0),
                                     tape.constant(Matrix::filled(1, 1,
                                                                  t.target_age))));
        auto combined = tape.add(tape.scale(focal, cfg.eta),
                                 tape.scale(reg, 1.0 - cfg.eta));
        auto item = tape.add(loss, tape.scale(combined, cfg.lambda));
        total = total < 0 ? item : tape.add(total, item);
    }
    auto mean = tape.scale(total, 1.0 / static_cast<double>(batch.size()));
    store.zero_grad();
    tape.backward(mean);
    opt.step(store);
    store.zero_grad();
}

}  // namespace

RlTrainStats train_prlae(ParamStore& store, std::vector<RlSample>& samples,
                         const RlConfig& cfg, uint64_t seed, AdamW& opt,
                         const std::function<void(std::size_t)>& after_episode) {
    if (samples.empty()) throw DomainError("train_prlae: empty sample set");

    std::array<long, 10> counts{};
    for (const RlSample& s : samples)
        ++counts[static_cast<std::size_t>(encode_age(s.age).row)];
    ImbalanceTable table = ImbalanceTable::from_counts(counts);

    ParamStore target_store = store;
    ReplayBuffer buffer(cfg.capacity);
    Rng rng_shuffle(Rng::mix(seed, 101));
    Rng rng_explore(Rng::mix(seed, 202));
    Rng rng_replay(Rng::mix(seed, 303));

    RlTrainStats stats;
    long total_planned = static_cast<long>(cfg.episodes) *
                         static_cast<long>(samples.size()) *
                         static_cast<long>(cfg.horizon);
    long anneal_steps = std::max(1L, total_planned / 2);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t pass = 0; pass < cfg.episodes; ++pass) {
        rng_shuffle.shuffle(order);
        double reward_sum = 0.0;
        long reward_count = 0;
        for (std::size_t idx : order) {
            const RlSample& s = samples[idx];
            GridPosition target = encode_age(s.age);
            GridEnv env(s.embedding, start_position(store, s.embedding), target,
                        table, cfg.horizon, cfg.reward);
            while (!env.done()) {
                GridPosition pos = env.state().position;
                Action a;
                if (cfg.one_shot) {
                    a = Action::Stay;
                } else {
                    double frac = std::min(
                        1.0, static_cast<double>(stats.env_steps) /
                                 static_cast<double>(anneal_steps));
                    double eps = cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
                    a = select_action(q_forward(store, s.embedding, pos).q, eps,
                                      rng_explore);
                }
                auto [r, done] = env.step(a);
                buffer.push(Transition{s.embedding, pos, a, r,
                                       env.state().position, done, target.row,
                                       static_cast<double>(s.age)});
                ++stats.env_steps;
                reward_sum += r;
                ++reward_count;
                if (buffer.size() >= cfg.batch) {
                    optimize_batch(store, target_store,
                                   buffer.sample(cfg.batch, rng_replay), cfg, opt);
                    ++stats.optimize_steps;
                    if (stats.optimize_steps % static_cast<long>(cfg.sync_interval) == 0)
                        target_store = store;
                }
            }
            if (after_episode) after_episode(idx);
        }
        stats.mean_episode_reward.push_back(
            reward_count > 0 ? reward_sum / static_cast<double>(reward_count) : 0.0);
    }
    return stats;
}

int predict_age(const ParamStore& store, const Matrix& embedding, const RlConfig& cfg) {
    if (cfg.one_shot) {
        QOutput probe = q_forward(store, embedding, {4, 4});
        int row = static_cast<int>(argmax_row(probe.class_logits));
        double age_hat = q_forward(store, embedding, {row, 4}).age;
        int col = clamp_grid(static_cast<int>(std::lround(age_hat)) - 10 * row);
        return decode_position({row, col});
    }
    GridPosition pos = start_position(store, embedding);
    for (std::size_t step = 0; step < cfg.horizon; ++step) {
        std::size_t a = argmax_row(q_forward(store, embedding, pos).q);
        if (static_cast<Action>(a) == Action::Stay) break;
        pos = apply_action(pos, static_cast<Action>(a));
    }
    return decode_position(pos);
}

}  // namespace agegraph
