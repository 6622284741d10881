#include "uavsim/ddqn.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uavsim {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay memory capacity must be positive");
}

void ReplayMemory::push(Experience e) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(e));
}

std::vector<const Experience*> replay_sample(const ReplayMemory& memory, std::size_t batch_size,
                                             std::mt19937_64& rng) {
    if (batch_size < 1) throw std::invalid_argument("replay_sample: batch_size must be >= 1");
    if (memory.empty()) throw std::invalid_argument("replay_sample: memory is empty");
    std::vector<const Experience*> batch;
    batch.reserve(batch_size);
    std::uniform_int_distribution<std::size_t> pick(0, memory.size() - 1);
    for (std::size_t i = 0; i + 1 < batch_size; ++i) batch.push_back(&memory.at(pick(rng)));
    batch.push_back(&memory.latest());
    return batch;
}

Eigen::VectorXd td_targets(std::span<const Experience* const> batch, const QEvaluator& online,
                           const QEvaluator& target, double gamma) {
    const auto n = static_cast<Eigen::Index>(batch.size());
    Eigen::VectorXd y(n);
    std::vector<const Observation*> next;
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = batch[i]->reward;
        if (!batch[i]->terminal && gamma != 0.0) {
            next.push_back(batch[i]->next_observation.get());
            rows.push_back(i);
        }
    }
    if (next.empty()) return y;

    const Eigen::MatrixXd q_online = online.q_values(next);
    const Eigen::MatrixXd q_target = target.q_values(next);
    for (std::size_t k = 0; k < next.size(); ++k) {
        Eigen::Index best = 0;
        for (Eigen::Index a = 1; a < q_online.rows(); ++a)
            if (q_online(a, k) > q_online(best, k)) best = a;
        y(rows[k]) += gamma * q_target(best, static_cast<Eigen::Index>(k));
    }
    return y;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {
    if (learning_rate < 0.0) throw std::invalid_argument("learning rate must be non-negative");
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
        throw std::invalid_argument("AdamOptimizer::step: size mismatch");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

void soft_update(std::span<double> target, std::span<const double> online, double tau) {
    if (target.size() != online.size()) throw std::invalid_argument("soft_update: size mismatch");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must lie in (0, 1]");
    if (tau == 1.0) {
        std::copy(online.begin(), online.end(), target.begin());
        return;
    }
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = (1.0 - tau) * target[i] + tau * online[i];
}

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("train.gamma must lie in [0, 1]");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("train.tau must lie in (0, 1]");
    if (batch_size < 1) throw std::invalid_argument("train.batch_size must be >= 1");
    if (replay_capacity < 1) throw std::invalid_argument("train.replay_capacity must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("train.learning_rate must be >= 0");
    if (!(temperature_start > 0.0) || !(temperature_end > 0.0))
        throw std::invalid_argument("train temperatures must be positive");
    if (temperature_decay_steps < 0) throw std::invalid_argument("train.temperature_decay_steps must be >= 0");
    if (total_steps < 0) throw std::invalid_argument("train.total_steps must be >= 0");
    if (train_every < 1) throw std::invalid_argument("train.train_every must be >= 1");
    if (learning_starts < 0) throw std::invalid_argument("train.learning_starts must be >= 0");
    if (checkpoint_every < 0) throw std::invalid_argument("train.checkpoint_every must be >= 0");
}

double TrainConfig::temperature_at(std::int64_t step) const {
    const std::int64_t decay = temperature_decay_steps > 0 ? temperature_decay_steps : total_steps / 2;
    if (decay <= 0 || step >= decay) return temperature_end;
    const double frac = static_cast<double>(step) / static_cast<double>(decay);
    return std::exp((1.0 - frac) * std::log(temperature_start) + frac * std::log(temperature_end));
}

DdqnLearner::DdqnLearner(const QNetwork& net, std::vector<double> initial_params, const TrainConfig& config)
    : net_(net),
      config_(config),
      online_(std::move(initial_params)),
      target_(online_),
      grad_(online_.size(), 0.0),
      optimizer_(online_.size(), config.learning_rate) {
    config_.validate();
    if (online_.size() != net_.parameter_count())
        throw std::invalid_argument("DdqnLearner: parameter vector does not match network");
}

double batch_loss(const Eigen::MatrixXd& q, std::span<const Experience* const> batch, const Eigen::VectorXd& targets) {
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double e = q(static_cast<int>(batch[i]->action), static_cast<Eigen::Index>(i)) - targets(i);
        sum += e * e;
    }
    return sum / static_cast<double>(batch.size());
}

double DdqnLearner::train_step(const ReplayMemory& memory, std::mt19937_64& rng) {
    const auto batch = replay_sample(memory, static_cast<std::size_t>(config_.batch_size), rng);
    return train_on_batch(batch);
}

double DdqnLearner::train_on_batch(std::span<const Experience* const> batch) {
    const NetworkEvaluator online(net_, online_);
    const NetworkEvaluator target(net_, target_);
    const Eigen::VectorXd y = td_targets(batch, online, target, config_.gamma);

    std::vector<const Observation*> obs;
    obs.reserve(batch.size());
    for (const Experience* e : batch) obs.push_back(e->observation.get());
    ForwardCache cache;
    const Eigen::MatrixXd q = net_.forward(online_, obs, &cache);

    const double loss = batch_loss(q, batch, y);
    if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite DDQN loss (" << loss << "); max |Q| = " << q.cwiseAbs().maxCoeff()
            << ", max |Y| = " << y.cwiseAbs().maxCoeff() << ", batch = " << batch.size();
        throw std::runtime_error(msg.str());
    }

    const double scale = 2.0 / static_cast<double>(batch.size());
    Eigen::MatrixXd grad_q = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const int a = static_cast<int>(batch[i]->action);
        grad_q(a, static_cast<Eigen::Index>(i)) = scale * (q(a, static_cast<Eigen::Index>(i)) - y(i));
    }
    std::fill(grad_.begin(), grad_.end(), 0.0);
    net_.backward(online_, cache, grad_q, grad_);
    optimizer_.step(online_, grad_);
    soft_update(target_, online_, config_.tau);
    return loss;
}

}  // namespace uavsim
