#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "uavsim/environment_map.h"
#include "uavsim/world.h"

namespace uavsim {

template <typename T>
struct Range {
    T lo{};
    T hi{};
    friend bool operator==(const Range&, const Range&) = default;
};

struct ScenarioConfig {
    Mission mission = Mission::CPP;
    Range<int> movement_budget{50, 150};
    Range<int> cpp_shape_count{3, 8};
    Range<double> cpp_coverage_fraction{0.2, 0.5};
    Range<int> dh_device_count{3, 10};
    Range<double> dh_data{5.0, 20.0};

    void validate() const;
};

using ScenarioRng = std::mt19937_64;

/// Reads the JSON map format:
///   {"name": str, "size": int, "cell_size_m": float, "grid": [[code, ...], ...]}
/// Rows may also be given as plain strings ("..L#"). Throws
/// std::invalid_argument (with the path in the message) on any defect.
EnvironmentMap load_map(const std::filesystem::path& path);
EnvironmentMap map_from_json_text(const std::string& text, const std::string& origin = "<memory>");
std::string map_to_json_text(const EnvironmentMap& env);

/// Names of the maps compiled into the library.
std::vector<std::string> builtin_map_names();
/// Throws std::invalid_argument for an unknown name.
EnvironmentMap builtin_map(const std::string& name);

/// Resolves "builtin:<name>" or a file path.
EnvironmentMap resolve_map(const std::string& ref);

/// Union of random rectangles and ellipses, restricted to non-obstacle
/// cells, resampled as a whole until the covered share of non-obstacle
/// cells falls inside the configured fraction range.
TargetMap generate_cpp_target(const EnvironmentMap& env, const ScenarioConfig& config, ScenarioRng& rng);

/// Devices on distinct cells that are neither landing zone nor obstacle.
std::vector<IoTDevice> generate_dh_devices(const EnvironmentMap& env, const ScenarioConfig& config,
                                           ScenarioRng& rng);

/// Samples battery, start cell and mission target.
EpisodeState new_episode(std::shared_ptr<const EnvironmentMap> env, const ScenarioConfig& config, ScenarioRng& rng);

}  // namespace uavsim
