#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "support/ddqn_toys.h"
#include "support/gradient_check.h"
#include "support/oracles.h"
#include "uavsim/config.h"
#include "uavsim/ddqn.h"
#include "uavsim/evaluation.h"
#include "uavsim/experiments.h"
#include "uavsim/map_pipeline.h"
#include "uavsim/q_network.h"
#include "uavsim/scenarios.h"
#include "uavsim/trainer.h"
#include "uavsim/world.h"

namespace {

using namespace uavsim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

NetworkConfig full_network(int channels) {
    NetworkConfig n;
    n.hidden = {256, 256, 256};
    n.input_channels = channels;
    return n;
}

Outcome flatten_table() {
    const auto t0 = Clock::now();
    auto env = std::make_shared<const EnvironmentMap>(builtin_map("manhattan32"));
    std::mt19937_64 rng(11);
    const EpisodeState state = new_episode(env, ScenarioConfig{}, rng);
    const NetworkConfig net_cfg = full_network(4);

    int mismatches = 0, checked = 0;
    auto check = [&](const ObservationSpec& spec, int want) {
        ++checked;
        const int formula = flatten_size(spec, 32, net_cfg.kernels, net_cfg.conv_layers, net_cfg.kernel_size);
        const QNetwork net(net_cfg, spec, 32);
        const std::vector<double> params(net.parameter_count(), 0.0);
        const auto features = net.flatten_features(params, assemble_observation(state, spec));
        if (formula != want || features.size() != want) {
            ++mismatches;
            std::cerr << "  flatten (" << spec.local_size << "," << spec.global_scaling << "): formula " << formula
                      << ", network " << features.size() << ", expected " << want << "\n";
        }
    };
    for (const auto& [lg, want] : oracle::flatten_table_m32()) check({lg.first, lg.second}, want);
    check({0, 1}, oracle::kFlattenDisabledM32);
    const double secs = seconds_since(t0);
    return {mismatches == 0 && checked == 17 && secs < 1.0,
            std::to_string(checked) + " configurations, " + std::to_string(mismatches) + " mismatches" +
                fmt(", %.2f s", secs)};
}

Outcome parameter_counts() {
    const auto t0 = Clock::now();
    struct Case {
        int channels, map;
        ObservationSpec spec;
        std::size_t want;
    };
    const std::vector<Case> cases = {{6, 32, {17, 3}, 1175302},
                                     {6, 50, {17, 5}, 978694},
                                     {4, 32, {17, 3}, 1173702},
                                     {4, 50, {17, 5}, 977094}};
    int bad = 0;
    std::string got;
    for (const auto& c : cases) {
        const std::size_t n = parameter_count(full_network(c.channels), c.spec, c.map);
        const std::size_t built = QNetwork(full_network(c.channels), c.spec, c.map).parameter_count();
        got += (got.empty() ? "" : " ") + std::to_string(n);
        if (n != c.want || built != c.want) ++bad;
    }
    const double secs = seconds_since(t0);
    return {bad == 0 && secs < 1.0, got + fmt(" (%.2f s)", secs)};
}

Tensor3<double> as_double(const Tensor3<float>& t) { return t.cast<double>(); }

Outcome pipeline_oracles() {
    std::mt19937_64 rng(2024);
    int instances = 0, failures = 0;
    const std::vector<double> env_pad{0.0, 1.0, 1.0};
    const std::vector<float> env_pad_f{0.0f, 1.0f, 1.0f};
    for (; instances < 1500; ++instances) {
        const int m = 2 + static_cast<int>(rng() % 24);
        const auto env = oracle::random_map(rng, m, 0.15, 0.15);
        const Cell p{static_cast<int>(rng() % m), static_cast<int>(rng() % m)};
        const int mc = centered_size(m);
        const int l = 1 + 2 * static_cast<int>(rng() % static_cast<unsigned>((mc + 1) / 2));
        const int g = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(mc, 9)));

        const auto layers = as_double(env.layers());
        const auto c = center_map<double>(layers, p, env_pad);
        bool ok = c == oracle::center(layers, p, env_pad);
        ok = ok && local_map(c, l) == oracle::crop(c, l);
        const auto pooled = global_map(c, g);
        const auto want = oracle::pool(c, g);
        for (std::size_t k = 0; ok && k < pooled.size(); ++k)
            ok = std::abs(pooled.values()[k] - want.values()[k]) <= 1e-12;

        // Mass: every pooled cell times g^2 equals the sum of its source block.
        const int n = mc / g;
        for (int ch = 0; ok && ch < c.channels(); ++ch) {
            double region = 0.0, mass = 0.0;
            for (int i = 0; i < n * g; ++i)
                for (int j = 0; j < n * g; ++j) region += c(ch, i, j);
            for (double v : pooled.channel(ch)) mass += v * g * g;
            ok = std::abs(mass - region) <= 1e-9 * std::max(1.0, std::abs(region));
        }

        // Translation: moving the UAV by (dr, dc) shifts the centered map by
        // the same offset, cell for cell.
        const Cell q{static_cast<int>(rng() % m), static_cast<int>(rng() % m)};
        const auto cq = center_map<double>(layers, q, env_pad);
        const int dr = q.row - p.row, dc = q.col - p.col;
        for (int i = 0; ok && i < mc; ++i)
            for (int j = 0; ok && j < mc; ++j)
                if (i + dr >= 0 && i + dr < mc && j + dc >= 0 && j + dc < mc) ok = cq(0, i, j) == c(0, i + dr, j + dc) &&
                                                                                 cq(2, i, j) == c(2, i + dr, j + dc);

        // The float path used by observations agrees with the oracles too.
        const auto cf = center_map<float>(env.layers(), p, env_pad_f);
        ok = ok && cf == oracle::center(env.layers(), p, env_pad_f) && local_map(cf, l) == oracle::crop(cf, l);

        if (!ok) ++failures;
    }
    return {failures == 0, std::to_string(instances) + " random instances, " + std::to_string(failures) + " failures"};
}

Outcome dynamics_invariants() {
    std::mt19937_64 rng(4242);
    const StepContext ctx;
    int violations = 0;
    const int episodes = 10000;
    long long steps = 0;
    auto violate = [&](const char* what, int episode) {
        if (violations++ < 5) std::cerr << "  episode " << episode << ": " << what << "\n";
    };
    for (int e = 0; e < episodes; ++e) {
        const int m = 4 + static_cast<int>(rng() % 12);
        auto env = std::make_shared<const EnvironmentMap>(oracle::random_map(rng, m));
        ScenarioConfig cfg;
        cfg.mission = e % 2 ? Mission::DH : Mission::CPP;
        cfg.movement_budget = {3, 60};
        cfg.cpp_shape_count = {1, 3};
        cfg.cpp_coverage_fraction = {0.01, 0.99};
        cfg.dh_device_count = {1, 3};
        cfg.dh_data = {0.5, 10.0};
        EpisodeState s;
        try {
            s = new_episode(env, cfg, rng);
        } catch (const std::exception&) {
            // Random maps can be too cramped for a scenario; draw again.
            --e;
            continue;
        }
        const int b0 = s.battery;
        double collected = 0.0, reward_sum = 0.0;
        int k = 0;
        while (!s.terminal()) {
            const auto prev = s.target.values;
            const auto r = step(s, action_from_index(static_cast<int>(rng() % kActionCount)), ctx, rng);
            ++k;
            ++steps;
            reward_sum += r.reward.total();
            collected += r.collected;
            if (s.battery != b0 - k) violate("battery not conserved", e);
            if (env->is_blocked(s.position)) violate("UAV on NFZ or obstacle", e);
            for (std::size_t i = 0; i < prev.size(); ++i)
                if (s.target.values[i] > prev[i]) {
                    violate("target increased", e);
                    break;
                }
            if (s.target.mission == Mission::DH) {
                double data = 0.0;
                for (const auto& d : s.devices) {
                    data += d.data_remaining;
                    if (d.data_remaining < 0.0 || d.data_remaining > d.data_initial) violate("device data out of range", e);
                    if (s.target.at(d.position) != d.data_remaining) violate("target does not mirror devices", e);
                }
                if (std::abs(data + collected - s.initial_target) > 1e-9) violate("data not conserved", e);
            }
        }
        if (std::abs(s.initial_target - s.target.sum() - collected) > 1e-9) violate("collected mass mismatch", e);
        if (s.landed && !env->is_landing(s.position)) violate("landed outside landing zone", e);
        const auto metrics = episode_metrics(s, reward_sum);
        if (!s.landed && metrics.cral != 0.0) violate("CRAL nonzero without landing", e);
        if (s.landed && metrics.cral != metrics.cr) violate("CRAL differs from CR after landing", e);
    }
    return {violations == 0, std::to_string(episodes) + " episodes, " + std::to_string(steps) + " steps, " +
                                 std::to_string(violations) + " violations"};
}

Outcome gradient_correctness() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::set<std::string> kinds;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto report = testing_support::gradient_check(seed);
        worst = std::max(worst, report.max_error);
        for (const auto& [name, err] : report.block_errors) {
            if (name.rfind("local.conv", 0) == 0) kinds.insert("local conv");
            else if (name.rfind("global.conv", 0) == 0) kinds.insert("global conv");
            else if (name.rfind("dense", 0) == 0) kinds.insert("dense");
            else if (name.rfind("q.", 0) == 0) kinds.insert("output");
        }
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-4 && kinds.size() == 4 && secs < 30.0,
            fmt("max relative error %.2e over 6 networks, ", worst) + std::to_string(kinds.size()) +
                fmt(" layer kinds, %.1f s", secs)};
}

Outcome ddqn_mechanics() {
    using testing_support::state_obs;
    using testing_support::TabularQ;
    bool ok = true;
    std::string detail;

    // Online argmax in s1 is action 1, the target's is action 0.
    const TabularQ online({{1, {1, 5, 0, 0, 0, 0}}, {2, {3, 0, 0, 0, 0, 0}}});
    const TabularQ target({{1, {10, 2, 0, 0, 0, 0}}, {2, {4, 1, 0, 0, 0, 0}}});
    const Experience e0{state_obs(0), Action::North, 1.0, state_obs(1), false};
    const Experience e1{state_obs(0), Action::East, 0.0, state_obs(2), false};
    const Experience e2{state_obs(0), Action::Land, -2.0, state_obs(1), true};
    const std::vector<const Experience*> batch{&e0, &e1, &e2};
    const auto y = td_targets(batch, online, target, 0.9);
    const bool td_ok = y(0) == 1.0 + 0.9 * 2.0 && y(0) != 1.0 + 0.9 * 10.0 && y(1) == 0.9 * 4.0 && y(2) == -2.0;
    ok = ok && td_ok;
    detail += fmt("double-Q target %.2f (vanilla %.2f)", y(0), 1.0 + 0.9 * 10.0);

    // theta' <- tau theta + (1 - tau) theta' contracts the gap by (1 - tau).
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    bool soft_ok = true;
    for (double tau : {0.005, 0.25, 0.5, 1.0}) {
        std::vector<double> on(64), tg(64);
        for (auto& v : on) v = u(rng);
        for (auto& v : tg) v = u(rng);
        const auto before = tg;
        soft_update(tg, on, tau);
        for (std::size_t i = 0; i < on.size(); ++i) {
            soft_ok = soft_ok && tg[i] == tau * on[i] + (1.0 - tau) * before[i];
            soft_ok = soft_ok && std::abs((tg[i] - on[i]) - (1.0 - tau) * (before[i] - on[i])) <= 1e-12;
        }
    }
    ok = ok && soft_ok;
    detail += soft_ok ? ", soft update exact" : ", soft update WRONG";

    // Combined experience replay: the newest transition is in every batch.
    ReplayMemory mem(50);
    int missing = 0, draws = 0;
    for (int k = 0; k < 500; ++k) {
        mem.push({state_obs(k), Action::Hover, static_cast<double>(k), state_obs(k + 1), false});
        const auto b = replay_sample(mem, 1 + static_cast<std::size_t>(k % 32), rng);
        ++draws;
        if (std::find(b.begin(), b.end(), &mem.latest()) == b.end() || b.back()->reward != k) ++missing;
    }
    ok = ok && missing == 0;
    detail += ", latest transition in " + std::to_string(draws - missing) + "/" + std::to_string(draws) + " batches";
    return {ok, detail};
}

RunConfig toy_config() {
    return load_run_config(fs::path(UAVSIM_SOURCE_DIR) / "configs" / "open8_cpp_toy.json");
}

Outcome learning_sanity() {
    const auto t0 = Clock::now();
    RunConfig cfg = toy_config();
    cfg.train.total_steps = 50000;
    const Setup setup = make_setup(cfg);
    const int episodes = 100;
    int passed = 0;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        auto net = std::make_shared<const QNetwork>(cfg.network, setup.spec, setup.env->size());
        const auto result = train(setup, *net, cfg.train, seed);
        const auto params = std::make_shared<const std::vector<double>>(result.params);
        const auto agent = evaluate(setup, greedy_network_policy(net, params), episodes, seed + 100);
        const auto random = evaluate(setup, uniform_random_policy(), episodes, seed + 100);
        const bool ok = agent.mean_cral >= random.mean_cral + 0.3 && agent.landed_pct >= 90.0;
        passed += ok;
        detail += fmt("seed %.0f: CRAL %.3f vs random %.3f, landed %.0f%%; ", static_cast<double>(seed), agent.mean_cral,
                      random.mean_cral, agent.landed_pct);
    }
    detail += fmt("%.0f s", seconds_since(t0));
    return {passed == 3, detail};
}

Outcome speedup_direction() {
    RunConfig cfg = load_run_config(fs::path(UAVSIM_SOURCE_DIR) / "configs" / "manhattan32_cpp.json");
    const Setup base = make_setup(cfg);
    TrainConfig train_cfg = cfg.train;
    train_cfg.batch_size = 1;
    const int steps = 1000, warmup = 20;
    const auto headline = speedup_benchmark(base, {17, 3}, {0, 1}, cfg.network, train_cfg, steps, warmup, 7);
    const auto order = speedup_benchmark(base, {9, 7}, {33, 2}, cfg.network, train_cfg, steps, warmup, 7);
    return {headline.ratio >= 2.0 && order.ratio > 1.0,
            fmt("(17,3)/disabled = %.2f (%.1f vs %.1f steps/s); (9,7)/(33,2) = %.2f", headline.ratio,
                headline.steps_per_second_a, headline.steps_per_second_b, order.ratio)};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "uavsim_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string config = (fs::path(UAVSIM_SOURCE_DIR) / "configs" / "open8_cpp_toy.json").string();
    std::ostringstream out, err;
    std::vector<std::string> logs, summaries;
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
        const auto dir = root / ("run" + std::to_string(k));
        ran = ran && cli::run({"train", "-c", config, "--steps", "4000", "--seed", "5", "-o", dir.string()}, out, err) ==
                         cli::kExitOk;
        ran = ran && cli::run({"eval", "--checkpoint", (dir / "checkpoint.json").string(), "--episodes", "50", "-o",
                               (dir / "eval").string()},
                              out, err) == cli::kExitOk;
        logs.push_back(slurp(dir / "training_log.csv"));
        summaries.push_back(slurp(dir / "eval" / "summary.json") + slurp(dir / "eval" / "episodes.csv"));
    }
    if (!ran) std::cerr << err.str();
    fs::remove_all(root);
    const bool same_log = logs[0] == logs[1] && !logs[0].empty();
    const bool same_summary = summaries[0] == summaries[1] && !summaries[0].empty();
    return {ran && same_log && same_summary,
            std::string("training log ") + (same_log ? "identical" : "DIFFERS") + " (" +
                std::to_string(std::count(logs[0].begin(), logs[0].end(), '\n')) + " lines), evaluation summary " +
                (same_summary ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
    // Optional argument: run only criteria whose name contains it.
    const std::string filter = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"flatten-size table", flatten_table},
        {"parameter counts", parameter_counts},
        {"map-pipeline oracles", pipeline_oracles},
        {"dynamics invariants", dynamics_invariants},
        {"gradient correctness", gradient_correctness},
        {"ddqn mechanics", ddqn_mechanics},
        {"learning sanity", learning_sanity},
        {"speedup direction", speedup_direction},
        {"determinism", determinism},
    };
    int failed = 0, ran = 0;
    for (const auto& [name, check] : criteria) {
        if (name.find(filter) == std::string::npos) continue;
        ++ran;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail << std::endl;
    }
    std::cout << (ran - failed) << "/" << ran << " acceptance criteria passed" << std::endl;
    return failed == 0 && ran > 0 ? 0 : 1;
}
