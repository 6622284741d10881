#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavsim/ddqn.h"
#include "uavsim/evaluation.h"
#include "uavsim/q_network.h"
#include "uavsim/scenarios.h"

namespace uavsim {

/// Raised for anything wrong with a configuration file or override.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, read from one JSON file.
struct RunConfig {
    Mission mission = Mission::CPP;
    std::string map = "builtin:manhattan32";  // file path or builtin:<name>
    ObservationSpec observation;
    NetworkConfig network;
    TrainConfig train;
    ScenarioConfig scenario;
    ChannelParams channel;
    RewardParams rewards;
    int eval_episodes = 200;
    std::string output_dir = "runs/default";
    std::uint64_t seed = 0;
};

/// Parses a JSON config; unspecified fields keep their defaults. `overrides`
/// are "dotted.key=value" strings applied before parsing; values are parsed
/// as JSON and fall back to plain strings. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
std::string run_config_to_json(const RunConfig& config);

/// Loads the map and checks that every section is consistent with it.
/// Throws ConfigError.
Setup make_setup(const RunConfig& config);

}  // namespace uavsim
