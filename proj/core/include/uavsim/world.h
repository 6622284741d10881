#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uavsim/environment_map.h"
#include "uavsim/radio_channel.h"

namespace uavsim {

enum class Mission { CPP, DH };

std::string_view to_string(Mission m);
Mission mission_from_string(std::string_view s);

/// Action order is fixed: it indexes the Q-value vector.
enum class Action : int { North = 0, East = 1, South = 2, West = 3, Hover = 4, Land = 5 };
inline constexpr int kActionCount = 6;

std::string_view to_string(Action a);
/// Throws std::out_of_range for indices outside [0, 6).
Action action_from_index(int index);

struct RewardParams {
    double collection_scale = 0.4;  // per covered cell / per data unit
    double safety_penalty = -1.0;
    double movement_penalty = -0.2;
    double crash_penalty = -5.0;

    void validate() const;
};

/// Remaining target per cell: 0/1 coverage targets (CPP) or device data (DH).
struct TargetMap {
    Mission mission = Mission::CPP;
    int size = 0;
    std::vector<double> values;

    double& at(Cell c) { return values[static_cast<std::size_t>(c.row) * size + c.col]; }
    double at(Cell c) const { return values[static_cast<std::size_t>(c.row) * size + c.col]; }
    double sum() const;
};

/// Boolean M x M mask, row-major.
struct ViewMask {
    int size = 0;
    std::vector<std::uint8_t> cells;

    bool at(Cell c) const { return cells[static_cast<std::size_t>(c.row) * size + c.col] != 0; }
    int count() const;
};

/// Full MDP state plus the bookkeeping needed for metrics.
struct EpisodeState {
    std::shared_ptr<const EnvironmentMap> env;
    TargetMap target;
    std::vector<IoTDevice> devices;  // DH only
    Cell position;
    int battery = 0;
    int initial_battery = 0;
    double initial_target = 0.0;
    bool landed = false;
    bool crashed = false;

    bool terminal() const { return landed || crashed; }
    int steps_used() const { return initial_battery - battery; }
};

/// Builds a fresh episode state and validates the placement constraints.
EpisodeState make_episode(std::shared_ptr<const EnvironmentMap> env, TargetMap target,
                          std::vector<IoTDevice> devices, Cell start, int battery);

/// Reward split into its components; `total` is always their sum.
struct RewardBreakdown {
    double collection = 0.0;
    double safety = 0.0;
    double movement = 0.0;
    double crash = 0.0;
    double total() const { return collection + safety + movement + crash; }
};

struct StepResult {
    RewardBreakdown reward;
    bool terminal = false;
    bool vetoed = false;
    double collected = 0.0;          // cells covered or data units harvested
    std::optional<std::size_t> served_device;
};

struct StepContext {
    RewardParams rewards;
    ChannelParams channel;
};

/// Advances the state by one action. Throws std::logic_error when called on a
/// terminal state.
StepResult step(EpisodeState& state, Action action, const StepContext& ctx, ChannelRng& rng);

inline constexpr int kFieldOfViewRadius = 2;  // 5 x 5 camera footprint

/// Cells visible from `position`: the 5 x 5 square, clipped to the map,
/// without obstacle cells and without cells hidden behind obstacles.
ViewMask field_of_view(const EnvironmentMap& env, Cell position);

/// T <- T and not V. Returns the number of cells cleared.
int update_target_cpp(TargetMap& target, const ViewMask& view);

/// Rebuilds the DH target layer from device data.
void sync_dh_target(TargetMap& target, std::span<const IoTDevice> devices);

struct MissionSummary {
    double remaining_target = 0.0;
    double initial_target = 0.0;
    bool landed = false;
    bool crashed = false;
    int steps_used = 0;
};

MissionSummary mission_state(const EpisodeState& state);

}  // namespace uavsim
