#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "agegraph/matrix.hpp"
#include "agegraph/optimizer.hpp"
#include "agegraph/param_store.hpp"
#include "agegraph/rng.hpp"
#include "agegraph/tape.hpp"

namespace agegraph {

struct GridPosition {
    int row = 0;  // age group 0..9
    int col = 0;  // within-group value 0..9
    bool operator==(const GridPosition&) const = default;
};

// row = age/10, col = age%10; ages above 99 clamp to 99, negatives error.
GridPosition encode_age(int age);
int decode_position(const GridPosition& pos);

enum class Action { RowUp = 0, RowDown = 1, ColUp = 2, ColDown = 3, Stay = 4 };
inline constexpr std::size_t kActionCount = 5;

GridPosition apply_action(const GridPosition& pos, Action a);  // clamped to grid

struct ImbalanceTable {
    std::array<double, 10> ratio{};  // majority count / group count, >= 1

    static ImbalanceTable balanced();
    // Groups absent from training take the largest observed ratio.
    static ImbalanceTable from_counts(const std::array<long, 10>& counts);
};

struct RewardConfig {
    bool use_imbalance = true;  // off: rho fixed to 1
    bool use_distance = true;   // off: iota fixed to 1
};

// +rho on exact hit; -iota*sqrt(rho) for right row, wrong col; -iota*rho for
// wrong row. iota is the Manhattan distance, rho the target group's ratio.
double reward(const GridPosition& pos, const GridPosition& target,
              const ImbalanceTable& table, const RewardConfig& cfg = {});

struct AgentState {
    Matrix embedding;  // 1 x d
    GridPosition position;
    std::size_t steps_taken = 0;
};

struct EnvResult {
    AgentState state;
    double reward = 0.0;
    bool done = false;
};

// One MDP step: move (clamped), reward at the resulting position, done on
// Stay or when the horizon is reached. Stepping past the horizon errors.
EnvResult env_step(const AgentState& state, Action action, const GridPosition& target,
                   const ImbalanceTable& table, std::size_t max_steps,
                   const RewardConfig& cfg = {});

// Convenience wrapper that also refuses steps after a Stay.
class GridEnv {
public:
    GridEnv(Matrix embedding, GridPosition start, GridPosition target,
            const ImbalanceTable& table, std::size_t max_steps,
            RewardConfig cfg = {});
    const AgentState& state() const { return state_; }
    bool done() const { return done_; }
    // returns (reward, done)
    std::pair<double, bool> step(Action a);

private:
    AgentState state_;
    GridPosition target_;
    ImbalanceTable table_;
    std::size_t max_steps_;
    RewardConfig cfg_;
    bool done_ = false;
};

struct QNetConfig {
    std::size_t embed_dim = 64;
    std::size_t hidden = 64;
    double reg_bias_init = 49.5;  // centre of the age range
};

// Registers q.trunk.* and the three heads (5 action values, 10 group logits,
// 1 age scalar) fed by [embedding || one-hot row || one-hot col].
void init_qnet_params(ParamStore& store, const QNetConfig& cfg, Rng& rng);

struct QOutput {
    Matrix q;             // 1 x 5
    Matrix class_logits;  // 1 x 10
    double age = 0.0;
};

QOutput q_forward(const ParamStore& store, const Matrix& embedding,
                  const GridPosition& pos);

struct QTapeOut {
    Tape::NodeId q;
    Tape::NodeId class_logits;
    Tape::NodeId age;
};

QTapeOut q_forward_tape(Tape& tape, ParamStore& store, Tape::NodeId embedding,
                        const GridPosition& pos);

// Argmax with ties to the lowest index; explores uniformly with prob epsilon.
Action select_action(const Matrix& q_values, double epsilon, Rng& rng);

// y = r for terminal, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double double_q_target(double r, bool done, const Matrix& q_next_online,
                       const Matrix& q_next_target, double gamma);

// -(1 - p_true)^tau * log(p_true), p floored at 1e-12. The distribution must
// sum to 1 within 1e-9.
double focal_loss(const Matrix& probabilities, int true_group, double tau = 1.3);

// eta * focal + (1 - eta) * |age_pred - age_true|
double combined_loss(const Matrix& class_probs, int true_group, double age_pred,
                     double age_true, double eta = 0.5, double tau = 1.3);

struct Transition {
    Matrix embedding;
    GridPosition pos;
    Action action = Action::Stay;
    double reward = 0.0;
    GridPosition next_pos;
    bool done = false;
    int target_group = 0;
    double target_age = 0.0;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 10000);
    void push(Transition t);
    std::vector<Transition> sample(std::size_t batch, Rng& rng) const;
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // ring cursor once full
    std::vector<Transition> items_;
};

struct RlConfig {
    double gamma = 0.9;
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::size_t horizon = 20;
    std::size_t sync_interval = 500;
    std::size_t capacity = 10000;
    std::size_t batch = 32;
    double lambda = 1.0;     // aux-loss weight on top of the TD term
    double eta = 0.5;        // focal vs age-error mix inside the aux loss
    double tau_focal = 1.3;
    std::size_t episodes = 10;  // passes over the dataset
    bool one_shot = false;      // single aux-head placement instead of a walk
    RewardConfig reward;
    QNetConfig qnet;
};

struct RlSample {
    Matrix embedding;  // 1 x d
    int age = 0;
};

struct RlTrainStats {
    std::vector<double> mean_episode_reward;  // per pass
    long env_steps = 0;
    long optimize_steps = 0;
};

// Greedy start: classifier argmax row from a neutral probe position, column 4.
GridPosition start_position(const ParamStore& store, const Matrix& embedding);

// Shuffled passes over the samples; epsilon-greedy episodes fill the replay
// buffer, each env step takes one batched gradient step (TD Huber on Double-DQN
// targets plus lambda * combined aux loss), target net syncs periodically.
// after_episode, when set, runs after each episode with the sample index and
// may refresh that sample's embedding in place (co-training hook).
RlTrainStats train_prlae(ParamStore& store, std::vector<RlSample>& samples,
                         const RlConfig& cfg, uint64_t seed, AdamW& opt,
                         const std::function<void(std::size_t)>& after_episode = {});

int predict_age(const ParamStore& store, const Matrix& embedding, const RlConfig& cfg);

}  // namespace agegraph
