#include "uavsim/world.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uavsim {

std::string_view to_string(Mission m) { return m == Mission::CPP ? "cpp" : "dh"; }

Mission mission_from_string(std::string_view s) {
    if (s == "cpp" || s == "CPP") return Mission::CPP;
    if (s == "dh" || s == "DH") return Mission::DH;
    throw std::invalid_argument("unknown mission '" + std::string(s) + "' (expected cpp or dh)");
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::North: return "north";
        case Action::East: return "east";
        case Action::South: return "south";
        case Action::West: return "west";
        case Action::Hover: return "hover";
        case Action::Land: return "land";
    }
    return "?";
}

Action action_from_index(int index) {
    if (index < 0 || index >= kActionCount)
        throw std::out_of_range("action index " + std::to_string(index) + " outside [0, 6)");
    return static_cast<Action>(index);
}

void RewardParams::validate() const {
    if (!(collection_scale > 0.0)) throw std::invalid_argument("rewards.collection_scale must be > 0");
    if (!(safety_penalty < 0.0) || !(movement_penalty < 0.0) || !(crash_penalty < 0.0))
        throw std::invalid_argument("reward penalties must be negative");
}

double TargetMap::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

int ViewMask::count() const {
    int n = 0;
    for (auto v : cells) n += v != 0;
    return n;
}

EpisodeState make_episode(std::shared_ptr<const EnvironmentMap> env, TargetMap target,
                          std::vector<IoTDevice> devices, Cell start, int battery) {
    if (!env) throw std::invalid_argument("make_episode: null environment");
    const int m = env->size();
    if (target.size != m || static_cast<int>(target.values.size()) != m * m)
        throw std::invalid_argument("make_episode: target map shape does not match environment");
    if (!env->on_map(start) || !env->is_landing(start))
        throw std::invalid_argument("make_episode: start " + to_string(start) + " is not a landing cell");
    if (battery <= 0) throw std::invalid_argument("make_episode: battery must be positive");

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double v = target.at({i, j});
            if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("make_episode: invalid target value");
            if (v > 0.0 && env->is_obstacle({i, j}))
                throw std::invalid_argument("make_episode: target on obstacle cell " + to_string(Cell{i, j}));
        }
    }
    if (target.mission == Mission::DH) {
        for (const auto& d : devices) {
            if (!env->on_map(d.position) || env->is_obstacle(d.position) || env->is_landing(d.position))
                throw std::invalid_argument("make_episode: device at invalid cell " + to_string(d.position));
            if (d.data_remaining > d.data_initial || d.data_remaining < 0.0)
                throw std::invalid_argument("make_episode: device data out of range");
        }
        sync_dh_target(target, devices);
    } else if (!devices.empty()) {
        throw std::invalid_argument("make_episode: devices given for a CPP mission");
    }

    EpisodeState s;
    s.env = std::move(env);
    s.target = std::move(target);
    s.devices = std::move(devices);
    s.position = start;
    s.battery = battery;
    s.initial_battery = battery;
    s.initial_target = s.target.sum();
    return s;
}

namespace {

Cell moved(Cell p, Action a) {
    switch (a) {
        case Action::North: return {p.row - 1, p.col};
        case Action::East: return {p.row, p.col + 1};
        case Action::South: return {p.row + 1, p.col};
        case Action::West: return {p.row, p.col - 1};
        default: return p;
    }
}

}  // namespace

StepResult step(EpisodeState& state, Action action, const StepContext& ctx, ChannelRng& rng) {
    if (state.terminal()) throw std::logic_error("step: episode already terminal");
    if (state.battery <= 0) throw std::logic_error("step: battery exhausted");
    const int index = static_cast<int>(action);
    if (index < 0 || index >= kActionCount) throw std::out_of_range("step: malformed action");

    const EnvironmentMap& env = *state.env;
    StepResult res;
    state.battery -= 1;

    if (action == Action::Land) {
        if (env.is_landing(state.position)) {
            state.landed = true;
        } else {
            res.vetoed = true;
        }
    } else if (action != Action::Hover) {
        const Cell next = moved(state.position, action);
        if (!env.on_map(next) || env.is_blocked(next)) {
            res.vetoed = true;
        } else {
            state.position = next;
        }
    }
    if (res.vetoed) res.reward.safety = ctx.rewards.safety_penalty;

    if (!state.landed) {
        if (state.target.mission == Mission::CPP) {
            res.collected = update_target_cpp(state.target, field_of_view(env, state.position));
        } else {
            const SlotResult slot = communication_slot(state.devices, env, state.position, ctx.channel, rng);
            res.collected = slot.collected;
            res.served_device = slot.device;
            sync_dh_target(state.target, state.devices);
        }
        res.reward.collection = ctx.rewards.collection_scale * res.collected;

        if (state.battery == 0) {
            state.crashed = true;
            res.reward.crash = ctx.rewards.crash_penalty;
        }
    }

    res.terminal = state.terminal();
    if (!res.terminal) res.reward.movement = ctx.rewards.movement_penalty;
    return res;
}

ViewMask field_of_view(const EnvironmentMap& env, Cell position) {
    const int m = env.size();
    ViewMask view{m, std::vector<std::uint8_t>(static_cast<std::size_t>(m) * m, 0)};
    for (int dr = -kFieldOfViewRadius; dr <= kFieldOfViewRadius; ++dr) {
        for (int dc = -kFieldOfViewRadius; dc <= kFieldOfViewRadius; ++dc) {
            const Cell c{position.row + dr, position.col + dc};
            if (!env.on_map(c) || env.is_obstacle(c)) continue;
            if (!line_of_sight(env, position, c)) continue;
            view.cells[static_cast<std::size_t>(c.row) * m + c.col] = 1;
        }
    }
    return view;
}

int update_target_cpp(TargetMap& target, const ViewMask& view) {
    if (target.mission != Mission::CPP) throw std::invalid_argument("update_target_cpp: not a CPP target");
    if (view.size != target.size || view.cells.size() != target.values.size())
        throw std::invalid_argument("update_target_cpp: shape mismatch");
    int cleared = 0;
    for (std::size_t k = 0; k < target.values.size(); ++k) {
        if (view.cells[k] && target.values[k] != 0.0) {
            target.values[k] = 0.0;
            ++cleared;
        }
    }
    return cleared;
}

void sync_dh_target(TargetMap& target, std::span<const IoTDevice> devices) {
    std::fill(target.values.begin(), target.values.end(), 0.0);
    for (const auto& d : devices) target.at(d.position) += d.data_remaining;
}

MissionSummary mission_state(const EpisodeState& state) {
    return {state.target.sum(), state.initial_target, state.landed, state.crashed, state.steps_used()};
}

}  // namespace uavsim
