#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uavsim/ddqn.h"
#include "uavsim/evaluation.h"

namespace uavsim {

struct GridSearchConfig {
    std::vector<int> local_sizes = {9, 17, 25, 33};
    std::vector<int> global_scalings = {2, 3, 5, 7};
    int repeats = 3;
    std::int64_t steps = 500'000;
    int eval_episodes = 200;
    bool include_disabled = true;  // adds `repeats` agents with l = 0, g = 1
    Setup base;
    NetworkConfig network;
    TrainConfig train;
    std::uint64_t seed = 0;
};

struct GridSearchRow {
    int local_size = 0;
    int global_scaling = 1;
    int repeat = 0;
    std::optional<int> flatten_size;  // empty when the cell is infeasible
    std::string status;               // "ok", "infeasible" or "failed"
    double mean_cr = 0.0;
    double mean_cral = 0.0;
    double landed_pct = 0.0;
    double steps_per_second = 0.0;
    double train_seconds = 0.0;
    std::string message;
};

/// Trains and evaluates `repeats` agents per (l, g) cell, plus the disabled
/// configuration. Rows come back in a fixed order regardless of threading:
/// g-major, then l, then repeat, disabled rows last. Infeasible cells and
/// runtime failures are recorded, not thrown.
std::vector<GridSearchRow> grid_search(const GridSearchConfig& config,
                                       const std::function<void(const GridSearchRow&)>& on_row = {});

std::string grid_search_csv(const std::vector<GridSearchRow>& rows);

struct SpeedupResult {
    double steps_per_second_a = 0.0;
    double steps_per_second_b = 0.0;
    /// throughput(a) / throughput(b): how many times faster `a` trains.
    double ratio = 0.0;
};

/// Gradient steps (forward + backward + optimizer + soft update) per second
/// for one observation spec, timed after `warmup` untimed steps on a replay
/// memory filled by a random policy from seeded scenarios.
double gradient_step_throughput(const Setup& base, const ObservationSpec& spec, const NetworkConfig& network,
                                const TrainConfig& train, int steps, int warmup, std::uint64_t seed);

SpeedupResult speedup_benchmark(const Setup& base, const ObservationSpec& a, const ObservationSpec& b,
                                const NetworkConfig& network, const TrainConfig& train, int steps, int warmup,
                                std::uint64_t seed);

}  // namespace uavsim
