#include "uavsim/scenarios.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "builtin_maps.h"

namespace uavsim {

using Json = nlohmann::json;

void ScenarioConfig::validate() const {
    auto check_int = [](const Range<int>& r, int min, const char* what) {
        if (r.lo > r.hi || r.lo < min)
            throw std::invalid_argument(std::string("scenario.") + what + " must be a non-empty range >= " +
                                        std::to_string(min));
    };
    check_int(movement_budget, 1, "movement_budget");
    check_int(cpp_shape_count, 1, "cpp_shape_count");
    check_int(dh_device_count, 1, "dh_device_count");
    if (!(cpp_coverage_fraction.lo > 0.0 && cpp_coverage_fraction.hi < 1.0 &&
          cpp_coverage_fraction.lo <= cpp_coverage_fraction.hi))
        throw std::invalid_argument("scenario.cpp_coverage_fraction must be a range inside (0, 1)");
    if (!(dh_data.lo > 0.0 && dh_data.lo <= dh_data.hi))
        throw std::invalid_argument("scenario.dh_data must be a positive, non-empty range");
}

EnvironmentMap map_from_json_text(const std::string& text, const std::string& origin) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw std::invalid_argument("map " + origin + ": invalid JSON: " + e.what());
    }
    try {
        const auto name = j.at("name").get<std::string>();
        const int size = j.at("size").get<int>();
        const double cell = j.value("cell_size_m", 10.0);
        std::vector<std::string> rows;
        for (const Json& row : j.at("grid")) {
            if (row.is_string()) {
                rows.push_back(row.get<std::string>());
                continue;
            }
            std::string r;
            for (const Json& code : row) {
                const auto s = code.get<std::string>();
                if (s.size() != 1) throw std::invalid_argument("map " + origin + ": unknown cell code '" + s + "'");
                r += s;
            }
            rows.push_back(std::move(r));
        }
        if (static_cast<int>(rows.size()) != size)
            throw std::invalid_argument("map " + origin + ": grid has " + std::to_string(rows.size()) +
                                        " rows but size is " + std::to_string(size));
        return EnvironmentMap::from_grid(name, cell, rows);
    } catch (const Json::exception& e) {
        throw std::invalid_argument("map " + origin + ": malformed field: " + e.what());
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        if (msg.rfind("map " + origin, 0) == 0) throw;
        throw std::invalid_argument("map " + origin + ": " + msg);
    }
}

EnvironmentMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open map file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return map_from_json_text(buf.str(), path.string());
}

std::string map_to_json_text(const EnvironmentMap& env) {
    std::ostringstream out;
    out << "{\n  \"name\": " << Json(env.name()).dump() << ",\n  \"size\": " << env.size()
        << ",\n  \"cell_size_m\": " << Json(env.cell_size_m()).dump() << ",\n  \"grid\": [\n";
    const auto rows = env.to_grid();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Json row = Json::array();
        for (char c : rows[i]) row.push_back(std::string(1, c));
        out << "    " << row.dump() << (i + 1 < rows.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

std::vector<std::string> builtin_map_names() {
    std::vector<std::string> names;
    for (const auto& m : detail::builtin_maps()) names.push_back(m.name);
    return names;
}

EnvironmentMap builtin_map(const std::string& name) {
    for (const auto& m : detail::builtin_maps())
        if (m.name == name) return EnvironmentMap::from_grid(m.name, m.cell_size_m, m.rows);
    throw std::invalid_argument("unknown builtin map '" + name + "'");
}

EnvironmentMap resolve_map(const std::string& ref) {
    static constexpr std::string_view kPrefix = "builtin:";
    if (ref.rfind(kPrefix, 0) == 0) return builtin_map(ref.substr(kPrefix.size()));
    return load_map(ref);
}

namespace {

int uniform_int(ScenarioRng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

void stamp_rectangle(std::vector<std::uint8_t>& mask, int m, ScenarioRng& rng) {
    const int max_side = std::max(2, m / 2);
    const int h = uniform_int(rng, 2, max_side);
    const int w = uniform_int(rng, 2, max_side);
    const int r0 = uniform_int(rng, 0, std::max(0, m - h));
    const int c0 = uniform_int(rng, 0, std::max(0, m - w));
    for (int r = r0; r < std::min(m, r0 + h); ++r)
        for (int c = c0; c < std::min(m, c0 + w); ++c) mask[static_cast<std::size_t>(r) * m + c] = 1;
}

void stamp_ellipse(std::vector<std::uint8_t>& mask, int m, ScenarioRng& rng) {
    const int max_radius = std::max(1, m / 4);
    const int ry = uniform_int(rng, 1, max_radius);
    const int rx = uniform_int(rng, 1, max_radius);
    const int cr = uniform_int(rng, 0, m - 1);
    const int cc = uniform_int(rng, 0, m - 1);
    for (int r = std::max(0, cr - ry); r <= std::min(m - 1, cr + ry); ++r) {
        for (int c = std::max(0, cc - rx); c <= std::min(m - 1, cc + rx); ++c) {
            const double dy = static_cast<double>(r - cr) / ry;
            const double dx = static_cast<double>(c - cc) / rx;
            if (dx * dx + dy * dy <= 1.0) mask[static_cast<std::size_t>(r) * m + c] = 1;
        }
    }
}

constexpr int kMaxTargetAttempts = 1000;

}  // namespace

TargetMap generate_cpp_target(const EnvironmentMap& env, const ScenarioConfig& config, ScenarioRng& rng) {
    config.validate();
    const int m = env.size();
    int available = 0;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) available += !env.is_obstacle({r, c});
    if (available == 0) throw std::invalid_argument("generate_cpp_target: map has no non-obstacle cells");

    std::vector<std::uint8_t> mask(static_cast<std::size_t>(m) * m);
    for (int attempt = 0; attempt < kMaxTargetAttempts; ++attempt) {
        std::fill(mask.begin(), mask.end(), 0);
        const int shapes = uniform_int(rng, config.cpp_shape_count.lo, config.cpp_shape_count.hi);
        for (int s = 0; s < shapes; ++s) {
            if (uniform_int(rng, 0, 1) == 0) stamp_rectangle(mask, m, rng);
            else stamp_ellipse(mask, m, rng);
        }
        int covered = 0;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                auto& v = mask[static_cast<std::size_t>(r) * m + c];
                if (env.is_obstacle({r, c})) v = 0;
                covered += v;
            }
        }
        const double fraction = static_cast<double>(covered) / available;
        if (fraction >= config.cpp_coverage_fraction.lo && fraction <= config.cpp_coverage_fraction.hi) {
            TargetMap t{Mission::CPP, m, std::vector<double>(mask.begin(), mask.end())};
            return t;
        }
    }
    throw std::runtime_error("generate_cpp_target: no target within coverage fraction [" +
                             std::to_string(config.cpp_coverage_fraction.lo) + ", " +
                             std::to_string(config.cpp_coverage_fraction.hi) + "] after " +
                             std::to_string(kMaxTargetAttempts) + " attempts on map '" + env.name() + "'");
}

std::vector<IoTDevice> generate_dh_devices(const EnvironmentMap& env, const ScenarioConfig& config,
                                           ScenarioRng& rng) {
    config.validate();
    std::vector<Cell> eligible;
    for (int r = 0; r < env.size(); ++r)
        for (int c = 0; c < env.size(); ++c)
            if (!env.is_obstacle({r, c}) && !env.is_landing({r, c})) eligible.push_back({r, c});

    const int count = uniform_int(rng, config.dh_device_count.lo, config.dh_device_count.hi);
    if (count > static_cast<int>(eligible.size()))
        throw std::invalid_argument("generate_dh_devices: " + std::to_string(count) + " devices but only " +
                                    std::to_string(eligible.size()) + " eligible cells");

    // Partial Fisher-Yates: the first `count` entries become a uniform
    // sample of distinct cells.
    std::vector<IoTDevice> devices;
    std::uniform_real_distribution<double> data(config.dh_data.lo, config.dh_data.hi);
    for (int k = 0; k < count; ++k) {
        const int pick = uniform_int(rng, k, static_cast<int>(eligible.size()) - 1);
        std::swap(eligible[k], eligible[pick]);
        const double amount = config.dh_data.lo == config.dh_data.hi ? config.dh_data.lo : data(rng);
        devices.push_back({eligible[k], amount, amount, k});
    }
    return devices;
}

EpisodeState new_episode(std::shared_ptr<const EnvironmentMap> env, const ScenarioConfig& config, ScenarioRng& rng) {
    config.validate();
    const int budget = uniform_int(rng, config.movement_budget.lo, config.movement_budget.hi);
    const auto landing = env->landing_cells();
    const Cell start = landing[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(landing.size()) - 1))];
    const int m = env->size();

    if (config.mission == Mission::CPP) {
        TargetMap target = generate_cpp_target(*env, config, rng);
        return make_episode(std::move(env), std::move(target), {}, start, budget);
    }
    auto devices = generate_dh_devices(*env, config, rng);
    TargetMap target{Mission::DH, m, std::vector<double>(static_cast<std::size_t>(m) * m, 0.0)};
    return make_episode(std::move(env), std::move(target), std::move(devices), start, budget);
}

}  // namespace uavsim
