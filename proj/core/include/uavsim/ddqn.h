#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uavsim/map_pipeline.h"
#include "uavsim/q_network.h"

namespace uavsim {

/// One transition. Consecutive transitions share observation objects, so a
/// stored observation costs memory once.
struct Experience {
    std::shared_ptr<const Observation> observation;
    Action action = Action::Hover;
    double reward = 0.0;
    std::shared_ptr<const Observation> next_observation;
    bool terminal = false;
};

/// Bounded FIFO replay memory.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }
    const Experience& at(std::size_t i) const { return items_.at(i); }
    const Experience& latest() const { return items_.back(); }

private:
    std::size_t capacity_;
    std::deque<Experience> items_;
};

/// Combined experience replay: batch_size - 1 uniform draws (with
/// replacement) plus the newest transition, which is placed last.
std::vector<const Experience*> replay_sample(const ReplayMemory& memory, std::size_t batch_size,
                                             std::mt19937_64& rng);

/// Anything that can score a batch of observations (action_count x batch).
class QEvaluator {
public:
    virtual ~QEvaluator() = default;
    virtual Eigen::MatrixXd q_values(std::span<const Observation* const> batch) const = 0;
};

class NetworkEvaluator final : public QEvaluator {
public:
    NetworkEvaluator(const QNetwork& net, std::span<const double> params) : net_(net), params_(params) {}
    Eigen::MatrixXd q_values(std::span<const Observation* const> batch) const override {
        return net_.forward(params_, batch);
    }

private:
    const QNetwork& net_;
    std::span<const double> params_;
};

/// Double-Q targets: r + gamma * Q_target(s', argmax_a Q_online(s', a)),
/// or r alone for terminal transitions. The online evaluator only picks the
/// action; the target evaluator only values it.
Eigen::VectorXd td_targets(std::span<const Experience* const> batch, const QEvaluator& online,
                           const QEvaluator& target, double gamma);

/// Adaptive moment estimation over a flat parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                  double epsilon = 1e-8);
    void step(std::span<double> params, std::span<const double> grad);
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    std::int64_t t_ = 0;
    std::vector<double> m_, v_;
};

/// target <- (1 - tau) * target + tau * online
void soft_update(std::span<double> target, std::span<const double> online, double tau);

struct TrainConfig {
    double gamma = 0.95;
    double tau = 0.005;
    int batch_size = 128;
    int replay_capacity = 50000;
    double learning_rate = 3e-4;
    double temperature_start = 0.1;
    double temperature_end = 0.01;
    /// Steps over which the temperature anneals; 0 means half of total_steps.
    std::int64_t temperature_decay_steps = 0;
    std::int64_t total_steps = 2'000'000;
    int train_every = 1;
    /// Gradient steps start once the memory holds this many transitions;
    /// 0 means batch_size.
    int learning_starts = 0;
    std::int64_t checkpoint_every = 0;  // 0 = only the final checkpoint

    void validate() const;
    double temperature_at(std::int64_t step) const;
};

/// Online/target parameter pair with its optimizer.
class DdqnLearner {
public:
    DdqnLearner(const QNetwork& net, std::vector<double> initial_params, const TrainConfig& config);

    /// One gradient step on a combined-replay batch followed by a soft target
    /// update. Returns the pre-update batch loss. Throws std::runtime_error
    /// if the loss is not finite.
    double train_step(const ReplayMemory& memory, std::mt19937_64& rng);

    /// Same, on an explicit batch.
    double train_on_batch(std::span<const Experience* const> batch);

    const QNetwork& network() const { return net_; }
    std::span<const double> online() const { return online_; }
    std::span<const double> target() const { return target_; }
    std::vector<double>& online_mut() { return online_; }
    std::vector<double>& target_mut() { return target_; }

private:
    const QNetwork& net_;
    TrainConfig config_;
    std::vector<double> online_;
    std::vector<double> target_;
    std::vector<double> grad_;
    AdamOptimizer optimizer_;
};

/// Mean squared TD error of a batch, computed directly from Q-values.
double batch_loss(const Eigen::MatrixXd& q, std::span<const Experience* const> batch, const Eigen::VectorXd& targets);

}  // namespace uavsim
