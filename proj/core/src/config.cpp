#include "uavsim/config.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace uavsim {

using Json = nlohmann::json;

namespace {

void apply_override(Json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::exception&) {
        value = raw;
    }

    Json* node = &root;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override '" + key + "': '" + parts[i] + "' is not a section");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = Json::object();
    }
    if (!node->is_object()) throw ConfigError("override '" + key + "' does not address a config field");
    (*node)[parts.back()] = std::move(value);
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void read_range(const Json& j, const char* key, Range<T>& out) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<T>>();
    if (v.size() != 2) throw ConfigError(std::string("scenario.") + key + " must be a [lo, hi] pair");
    out = {v[0], v[1]};
}

void check_keys(const Json& j, const char* section, std::initializer_list<const char*> known) {
    if (!j.is_object()) throw ConfigError(std::string("config section '") + section + "' must be an object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* n : known) ok = ok || k == n;
        if (!ok) throw ConfigError(std::string("unknown config key '") + section + "." + k + "'");
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::vector<std::string>& overrides) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);

    RunConfig c;
    try {
        check_keys(j, "<root>",
                   {"mission", "map", "seed", "output_dir", "eval_episodes", "observation", "network", "train",
                    "scenario", "channel", "rewards"});
        if (j.contains("mission")) c.mission = mission_from_string(j.at("mission").get<std::string>());
        read(j, "map", c.map);
        read(j, "seed", c.seed);
        read(j, "output_dir", c.output_dir);
        read(j, "eval_episodes", c.eval_episodes);

        if (j.contains("observation")) {
            const Json& o = j.at("observation");
            check_keys(o, "observation", {"local_size", "global_scaling"});
            read(o, "local_size", c.observation.local_size);
            read(o, "global_scaling", c.observation.global_scaling);
        }
        if (j.contains("scenario")) {
            const Json& s = j.at("scenario");
            check_keys(s, "scenario",
                       {"movement_budget", "cpp_shape_count", "cpp_coverage_fraction", "dh_device_count", "dh_data"});
            read_range(s, "movement_budget", c.scenario.movement_budget);
            read_range(s, "cpp_shape_count", c.scenario.cpp_shape_count);
            read_range(s, "cpp_coverage_fraction", c.scenario.cpp_coverage_fraction);
            read_range(s, "dh_device_count", c.scenario.dh_device_count);
            read_range(s, "dh_data", c.scenario.dh_data);
        }
        c.scenario.mission = c.mission;

        c.network.flying_time_scale = c.scenario.movement_budget.hi;
        if (j.contains("network")) {
            const Json& n = j.at("network");
            check_keys(n, "network",
                       {"conv_layers", "kernels", "kernel_size", "hidden", "input_channels", "flying_time_scale"});
            read(n, "conv_layers", c.network.conv_layers);
            read(n, "kernels", c.network.kernels);
            read(n, "kernel_size", c.network.kernel_size);
            read(n, "hidden", c.network.hidden);
            read(n, "input_channels", c.network.input_channels);
            read(n, "flying_time_scale", c.network.flying_time_scale);
        }
        if (j.contains("train")) {
            const Json& t = j.at("train");
            check_keys(t, "train",
                       {"gamma", "tau", "batch_size", "replay_capacity", "learning_rate", "temperature_start",
                        "temperature_end", "temperature_decay_steps", "total_steps", "train_every", "learning_starts",
                        "checkpoint_every"});
            read(t, "gamma", c.train.gamma);
            read(t, "tau", c.train.tau);
            read(t, "batch_size", c.train.batch_size);
            read(t, "replay_capacity", c.train.replay_capacity);
            read(t, "learning_rate", c.train.learning_rate);
            read(t, "temperature_start", c.train.temperature_start);
            read(t, "temperature_end", c.train.temperature_end);
            read(t, "temperature_decay_steps", c.train.temperature_decay_steps);
            read(t, "total_steps", c.train.total_steps);
            read(t, "train_every", c.train.train_every);
            read(t, "learning_starts", c.train.learning_starts);
            read(t, "checkpoint_every", c.train.checkpoint_every);
        }
        if (j.contains("channel")) {
            const Json& ch = j.at("channel");
            check_keys(ch, "channel",
                       {"uav_altitude_m", "los_exponent", "nlos_exponent", "shadowing_sigma_los_db",
                        "shadowing_sigma_nlos_db", "reference_snr_db", "step_time"});
            read(ch, "uav_altitude_m", c.channel.uav_altitude_m);
            read(ch, "los_exponent", c.channel.los_exponent);
            read(ch, "nlos_exponent", c.channel.nlos_exponent);
            read(ch, "shadowing_sigma_los_db", c.channel.shadowing_sigma_los_db);
            read(ch, "shadowing_sigma_nlos_db", c.channel.shadowing_sigma_nlos_db);
            read(ch, "reference_snr_db", c.channel.reference_snr_db);
            read(ch, "step_time", c.channel.step_time);
        }
        if (j.contains("rewards")) {
            const Json& r = j.at("rewards");
            check_keys(r, "rewards", {"collection_scale", "safety_penalty", "movement_penalty", "crash_penalty"});
            read(r, "collection_scale", c.rewards.collection_scale);
            read(r, "safety_penalty", c.rewards.safety_penalty);
            read(r, "movement_penalty", c.rewards.movement_penalty);
            read(r, "crash_penalty", c.rewards.crash_penalty);
        }

        c.network.validate();
        c.train.validate();
        c.scenario.validate();
        c.channel.validate();
        c.rewards.validate();
        if (c.eval_episodes < 0) throw ConfigError("eval_episodes must be >= 0");
    } catch (const ConfigError&) {
        throw;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), overrides);
}

std::string run_config_to_json(const RunConfig& c) {
    const auto range = [](const auto& r) { return Json::array({r.lo, r.hi}); };
    Json j = {
        {"mission", std::string(to_string(c.mission))},
        {"map", c.map},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"eval_episodes", c.eval_episodes},
        {"observation", {{"local_size", c.observation.local_size}, {"global_scaling", c.observation.global_scaling}}},
        {"network",
         {{"conv_layers", c.network.conv_layers},
          {"kernels", c.network.kernels},
          {"kernel_size", c.network.kernel_size},
          {"hidden", c.network.hidden},
          {"input_channels", c.network.input_channels},
          {"flying_time_scale", c.network.flying_time_scale}}},
        {"train",
         {{"gamma", c.train.gamma},
          {"tau", c.train.tau},
          {"batch_size", c.train.batch_size},
          {"replay_capacity", c.train.replay_capacity},
          {"learning_rate", c.train.learning_rate},
          {"temperature_start", c.train.temperature_start},
          {"temperature_end", c.train.temperature_end},
          {"temperature_decay_steps", c.train.temperature_decay_steps},
          {"total_steps", c.train.total_steps},
          {"train_every", c.train.train_every},
          {"learning_starts", c.train.learning_starts},
          {"checkpoint_every", c.train.checkpoint_every}}},
        {"scenario",
         {{"movement_budget", range(c.scenario.movement_budget)},
          {"cpp_shape_count", range(c.scenario.cpp_shape_count)},
          {"cpp_coverage_fraction", range(c.scenario.cpp_coverage_fraction)},
          {"dh_device_count", range(c.scenario.dh_device_count)},
          {"dh_data", range(c.scenario.dh_data)}}},
        {"channel",
         {{"uav_altitude_m", c.channel.uav_altitude_m},
          {"los_exponent", c.channel.los_exponent},
          {"nlos_exponent", c.channel.nlos_exponent},
          {"shadowing_sigma_los_db", c.channel.shadowing_sigma_los_db},
          {"shadowing_sigma_nlos_db", c.channel.shadowing_sigma_nlos_db},
          {"reference_snr_db", c.channel.reference_snr_db},
          {"step_time", c.channel.step_time}}},
        {"rewards",
         {{"collection_scale", c.rewards.collection_scale},
          {"safety_penalty", c.rewards.safety_penalty},
          {"movement_penalty", c.rewards.movement_penalty},
          {"crash_penalty", c.rewards.crash_penalty}}},
    };
    return j.dump(2) + "\n";
}

Setup make_setup(const RunConfig& config) {
    Setup s;
    try {
        s.env = std::make_shared<const EnvironmentMap>(resolve_map(config.map));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    s.scenario = config.scenario;
    s.scenario.mission = config.mission;
    s.step = {config.rewards, config.channel};
    s.spec = config.observation;
    try {
        s.spec.validate(s.env->size());
        flatten_size(s.spec, s.env->size(), config.network.kernels, config.network.conv_layers,
                     config.network.kernel_size);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("observation spec infeasible for map '") + s.env->name() + "': " + e.what());
    }
    return s;
}

}  // namespace uavsim
