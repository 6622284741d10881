#include "uavsim/trainer.h"

#include <chrono>
#include <cstdio>

#include "uavsim/util.h"

namespace uavsim {

TrainingResult train(const Setup& setup, const QNetwork& net, const TrainConfig& config, std::uint64_t seed,
                     const TrainingHooks& hooks) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();

    auto init_rng = make_rng(seed, streams::kInit);
    auto scenario_rng = make_rng(seed, streams::kScenario);
    auto channel_rng = make_rng(seed, streams::kChannel);
    auto policy_rng = make_rng(seed, streams::kPolicy);
    auto replay_rng = make_rng(seed, streams::kReplay);

    DdqnLearner learner(net, net.initial_parameters(init_rng), config);
    TrainingResult result;
    if (config.total_steps == 0) {
        result.params.assign(learner.online().begin(), learner.online().end());
        if (hooks.on_checkpoint) hooks.on_checkpoint(0, result.params);
        return result;
    }

    ReplayMemory memory(static_cast<std::size_t>(config.replay_capacity));
    const std::size_t learning_starts =
        static_cast<std::size_t>(config.learning_starts > 0 ? config.learning_starts : config.batch_size);

    EpisodeState state = new_episode(setup.env, setup.scenario, scenario_rng);
    auto obs = std::make_shared<const Observation>(assemble_observation(state, setup.spec));
    TrainingLogRow row;
    double loss_sum = 0.0;
    int loss_count = 0;

    for (std::int64_t t = 0; t < config.total_steps; ++t) {
        const double temperature = config.temperature_at(t);
        const auto q = net.forward(learner.online(), *obs);
        const Action action = sample_action(softmax_policy(q, temperature), policy_rng);
        const StepResult r = step(state, action, setup.step, channel_rng);
        auto next = std::make_shared<const Observation>(assemble_observation(state, setup.spec));
        memory.push({obs, action, r.reward.total(), next, r.terminal});
        row.reward_sum += r.reward.total();

        if (memory.size() >= learning_starts && (t + 1) % config.train_every == 0) {
            loss_sum += learner.train_step(memory, replay_rng);
            ++loss_count;
            ++result.gradient_steps;
        }

        if (r.terminal) {
            const EpisodeMetrics m = episode_metrics(state, row.reward_sum);
            row.step = t + 1;
            row.cr = m.cr;
            row.cral = m.cral;
            row.landed = m.landed;
            row.loss_mean = loss_count > 0 ? loss_sum / loss_count : 0.0;
            row.temperature = temperature;
            result.log.push_back(row);
            if (hooks.on_episode) hooks.on_episode(row);

            const int next_episode = row.episode + 1;
            row = TrainingLogRow{};
            row.episode = next_episode;
            loss_sum = 0.0;
            loss_count = 0;
            state = new_episode(setup.env, setup.scenario, scenario_rng);
            next = std::make_shared<const Observation>(assemble_observation(state, setup.spec));
        }
        obs = std::move(next);

        if (hooks.on_checkpoint && config.checkpoint_every > 0 && (t + 1) % config.checkpoint_every == 0 &&
            t + 1 < config.total_steps)
            hooks.on_checkpoint(t + 1, learner.online());
    }

    result.params.assign(learner.online().begin(), learner.online().end());
    if (hooks.on_checkpoint) hooks.on_checkpoint(config.total_steps, result.params);
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

std::string training_log_header() { return "step,episode,reward_sum,cr,cral,landed,loss_mean,temperature\n"; }

std::string training_log_line(const TrainingLogRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%lld,%d,%.6f,%.6f,%.6f,%d,%.8g,%.6g\n", static_cast<long long>(row.step),
                  row.episode, row.reward_sum, row.cr, row.cral, row.landed ? 1 : 0, row.loss_mean, row.temperature);
    return buf;
}

}  // namespace uavsim
