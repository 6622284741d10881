#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uavsim/ddqn.h"
#include "uavsim/evaluation.h"

namespace uavsim {

struct TrainingLogRow {
    std::int64_t step = 0;  // environment steps completed when the episode ended
    int episode = 0;
    double reward_sum = 0.0;
    double cr = 0.0;
    double cral = 0.0;
    bool landed = false;
    double loss_mean = 0.0;  // mean over the gradient steps of this episode, 0 if none
    double temperature = 0.0;
};

struct TrainingResult {
    std::vector<double> params;
    std::vector<TrainingLogRow> log;
    std::int64_t gradient_steps = 0;
    double seconds = 0.0;
};

struct TrainingHooks {
    std::function<void(std::int64_t step, std::span<const double> params)> on_checkpoint;
    std::function<void(const TrainingLogRow&)> on_episode;
};

/// Runs the DDQN loop: observe, sample an action from the softmax policy at
/// the scheduled temperature, step the world, store the transition and train
/// every `train_every` steps. Fully determined by `seed`.
TrainingResult train(const Setup& setup, const QNetwork& net, const TrainConfig& config, std::uint64_t seed,
                     const TrainingHooks& hooks = {});

std::string training_log_header();
std::string training_log_line(const TrainingLogRow& row);

}  // namespace uavsim
