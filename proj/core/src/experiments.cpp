#include "uavsim/experiments.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "uavsim/trainer.h"
#include "uavsim/util.h"

namespace uavsim {

std::vector<GridSearchRow> grid_search(const GridSearchConfig& config,
                                       const std::function<void(const GridSearchRow&)>& on_row) {
    if (config.repeats < 1) throw std::invalid_argument("grid_search: repeats must be >= 1");
    if (config.steps < 0) throw std::invalid_argument("grid_search: steps must be >= 0");
    if (config.eval_episodes < 0) throw std::invalid_argument("grid_search: eval_episodes must be >= 0");

    std::vector<GridSearchRow> rows;
    auto add = [&rows](int l, int g, int r) {
        GridSearchRow row;
        row.local_size = l;
        row.global_scaling = g;
        row.repeat = r;
        rows.push_back(std::move(row));
    };
    for (int g : config.global_scalings)
        for (int l : config.local_sizes)
            for (int r = 0; r < config.repeats; ++r) add(l, g, r);
    if (config.include_disabled)
        for (int r = 0; r < config.repeats; ++r) add(0, 1, r);

    const int map_size = config.base.env->size();
    std::mutex report;
    parallel_for(rows.size(), [&](std::size_t i) {
        GridSearchRow& row = rows[i];
        const ObservationSpec spec{row.local_size, row.global_scaling};
        try {
            row.flatten_size = flatten_size(spec, map_size, config.network.kernels, config.network.conv_layers,
                                            config.network.kernel_size);
        } catch (const std::invalid_argument& e) {
            row.status = "infeasible";
            row.message = e.what();
        }
        if (row.flatten_size) {
            try {
                Setup setup = config.base;
                setup.spec = spec;
                TrainConfig train_cfg = config.train;
                train_cfg.total_steps = config.steps;
                const QNetwork net(config.network, spec, map_size);
                const std::uint64_t seed = make_rng(config.seed, streams::kGridSeed, i)();
                const TrainingResult trained = train(setup, net, train_cfg, seed);
                auto params = std::make_shared<const std::vector<double>>(trained.params);
                auto shared_net = std::make_shared<const QNetwork>(net);
                const EvaluationSummary eval =
                    evaluate(setup, greedy_network_policy(shared_net, params), config.eval_episodes, seed);
                row.status = "ok";
                row.mean_cr = eval.mean_cr;
                row.mean_cral = eval.mean_cral;
                row.landed_pct = eval.landed_pct;
                row.train_seconds = trained.seconds;
                row.steps_per_second = trained.seconds > 0.0 ? config.steps / trained.seconds : 0.0;
            } catch (const std::exception& e) {
                row.status = "failed";
                row.message = e.what();
            }
        }
        if (on_row) {
            std::lock_guard lock(report);
            on_row(row);
        }
    });
    return rows;
}

std::string grid_search_csv(const std::vector<GridSearchRow>& rows) {
    std::ostringstream out;
    out << "l,g,repeat,flatten_size,status,mean_cr,mean_cral,landed_pct,steps_per_second,train_seconds\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%s,%s,%.6f,%.6f,%.2f,%.3f,%.3f\n", r.local_size, r.global_scaling,
                      r.repeat, r.flatten_size ? std::to_string(*r.flatten_size).c_str() : "", r.status.c_str(),
                      r.mean_cr, r.mean_cral, r.landed_pct, r.steps_per_second, r.train_seconds);
        out << buf;
    }
    return out.str();
}

namespace {

// Owns a network, a filled replay memory and a learner for one spec so that
// timed rounds of several specs can be interleaved.
class ThroughputRig {
public:
    ThroughputRig(const Setup& base, const ObservationSpec& spec, const NetworkConfig& network,
                  const TrainConfig& train, std::uint64_t seed)
        : setup_(with_spec(base, spec)),
          net_(network, spec, setup_.env->size()),
          replay_rng_(make_rng(seed, streams::kReplay)),
          memory_(std::max<std::size_t>(static_cast<std::size_t>(train.batch_size), 256)) {
        auto init_rng = make_rng(seed, streams::kInit);
        auto scenario_rng = make_rng(seed, streams::kScenario);
        auto channel_rng = make_rng(seed, streams::kChannel);
        auto policy_rng = make_rng(seed, streams::kPolicy);

        // Same random-policy transitions for every spec.
        const Policy random = uniform_random_policy();
        EpisodeState state = new_episode(setup_.env, setup_.scenario, scenario_rng);
        auto obs = std::make_shared<const Observation>(assemble_observation(state, spec));
        while (memory_.size() < memory_.capacity()) {
            const Action a = random(state, *obs, policy_rng);
            const StepResult r = step(state, a, setup_.step, channel_rng);
            auto next = std::make_shared<const Observation>(assemble_observation(state, spec));
            memory_.push({obs, a, r.reward.total(), next, r.terminal});
            if (r.terminal) {
                state = new_episode(setup_.env, setup_.scenario, scenario_rng);
                next = std::make_shared<const Observation>(assemble_observation(state, spec));
            }
            obs = std::move(next);
        }
        learner_ = std::make_unique<DdqnLearner>(net_, net_.initial_parameters(init_rng), train);
    }

    void untimed(int steps) {
        for (int i = 0; i < steps; ++i) learner_->train_step(memory_, replay_rng_);
    }

    double timed(int steps) {
        const auto t0 = std::chrono::steady_clock::now();
        untimed(steps);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

private:
    static Setup with_spec(Setup s, const ObservationSpec& spec) {
        s.spec = spec;
        return s;
    }

    Setup setup_;
    QNetwork net_;
    std::mt19937_64 replay_rng_;
    ReplayMemory memory_;
    std::unique_ptr<DdqnLearner> learner_;
};

void check_step_counts(int steps, int warmup) {
    if (steps < 1 || warmup < 0) throw std::invalid_argument("gradient step benchmark: invalid step counts");
}

}  // namespace

double gradient_step_throughput(const Setup& base, const ObservationSpec& spec, const NetworkConfig& network,
                                const TrainConfig& train, int steps, int warmup, std::uint64_t seed) {
    check_step_counts(steps, warmup);
    ThroughputRig rig(base, spec, network, train, seed);
    rig.untimed(warmup);
    return steps / rig.timed(steps);
}

SpeedupResult speedup_benchmark(const Setup& base, const ObservationSpec& a, const ObservationSpec& b,
                                const NetworkConfig& network, const TrainConfig& train, int steps, int warmup,
                                std::uint64_t seed) {
    check_step_counts(steps, warmup);
    ThroughputRig rig_a(base, a, network, train, seed);
    ThroughputRig rig_b(base, b, network, train, seed);
    rig_a.untimed(warmup);
    rig_b.untimed(warmup);

    // Alternate in rounds so slow periods on a shared machine hit both specs.
    constexpr int kRounds = 10;
    double seconds_a = 0.0, seconds_b = 0.0;
    for (int k = 0; k < kRounds; ++k) {
        const int n = steps / kRounds + (k < steps % kRounds ? 1 : 0);
        if (n == 0) continue;
        seconds_a += rig_a.timed(n);
        seconds_b += rig_b.timed(n);
    }
    SpeedupResult r;
    r.steps_per_second_a = steps / seconds_a;
    r.steps_per_second_b = steps / seconds_b;
    r.ratio = r.steps_per_second_a / r.steps_per_second_b;
    return r;
}

}  // namespace uavsim
