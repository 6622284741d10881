#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/q_network.h"
#include "uavsim/scenarios.h"
#include "uavsim/world.h"

namespace uavsim {

/// End-of-episode performance. cr is the completed share of the initial
/// target mass; cral equals cr if the UAV landed and 0 otherwise.
struct EpisodeMetrics {
    double cr = 0.0;
    double cral = 0.0;
    bool landed = false;
    int steps_used = 0;
    int budget = 0;
    double reward_sum = 0.0;
};

/// An episode with no initial target counts as fully completed (cr = 1).
EpisodeMetrics episode_metrics(const EpisodeState& state, double reward_sum = 0.0);

/// Everything needed to run episodes on one map.
struct Setup {
    std::shared_ptr<const EnvironmentMap> env;
    ScenarioConfig scenario;
    StepContext step;
    ObservationSpec spec;
};

struct TrajectoryStep {
    int t = 0;
    Cell position;
    Action action = Action::Hover;
    double reward = 0.0;
    int battery = 0;
    double target_sum = 0.0;
    std::optional<std::size_t> device;  // DH: device served this step
    double collected = 0.0;
};

struct EpisodeTrace {
    Cell start;
    int budget = 0;
    std::vector<IoTDevice> devices;  // DH: initial devices
    TargetMap initial_target;
    std::vector<TrajectoryStep> steps;
};

/// Decides an action from the current state and its observation. Must be
/// callable concurrently from several episodes.
using Policy = std::function<Action(const EpisodeState&, const Observation&, std::mt19937_64&)>;

Policy greedy_network_policy(std::shared_ptr<const QNetwork> net, std::shared_ptr<const std::vector<double>> params);
Policy uniform_random_policy();

struct EvaluationSummary {
    Mission mission = Mission::CPP;
    std::string map;
    int episodes = 0;
    double mean_cr = 0.0;
    double mean_cral = 0.0;
    double landed_pct = 0.0;
    std::vector<EpisodeMetrics> per_episode;
};

/// Runs `episodes` Monte Carlo episodes; episode i draws its scenario and
/// channel from streams derived from (seed, i), so results do not depend on
/// the number of worker threads.
EvaluationSummary evaluate(const Setup& setup, const Policy& policy, int episodes, std::uint64_t seed,
                           std::vector<EpisodeTrace>* traces = nullptr);

/// Loads a checkpoint and evaluates its greedy policy. Throws CheckpointError
/// if the checkpoint does not fit the setup.
EvaluationSummary evaluate_checkpoint(const Checkpoint& checkpoint, const Setup& setup, int episodes,
                                      std::uint64_t seed, std::vector<EpisodeTrace>* traces = nullptr);

std::string episodes_csv(const EvaluationSummary& summary);
std::string summary_json(const EvaluationSummary& summary);
/// One JSON object per line: {t, position, action, reward, battery, target_sum, ...}.
std::string trajectory_jsonl(const EpisodeTrace& trace, Mission mission);
/// Episode context for renderers: start cell, budget, initial devices or
/// initial target cells.
std::string trajectory_meta_json(const EpisodeTrace& trace, Mission mission, const std::string& map_name);

}  // namespace uavsim
