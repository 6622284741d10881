#include "uavsim/evaluation.h"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uavsim/util.h"

namespace uavsim {

using Json = nlohmann::json;

EpisodeMetrics episode_metrics(const EpisodeState& state, double reward_sum) {
    EpisodeMetrics m;
    const double remaining = state.target.sum();
    m.cr = state.initial_target > 0.0 ? (state.initial_target - remaining) / state.initial_target : 1.0;
    m.cr = std::clamp(m.cr, 0.0, 1.0);
    m.landed = state.landed;
    m.cral = m.landed ? m.cr : 0.0;
    m.steps_used = state.steps_used();
    m.budget = state.initial_battery;
    m.reward_sum = reward_sum;
    return m;
}

Policy greedy_network_policy(std::shared_ptr<const QNetwork> net, std::shared_ptr<const std::vector<double>> params) {
    return [net = std::move(net), params = std::move(params)](const EpisodeState&, const Observation& obs,
                                                               std::mt19937_64&) {
        const auto q = net->forward(*params, obs);
        return greedy_action(q);
    };
}

Policy uniform_random_policy() {
    return [](const EpisodeState&, const Observation&, std::mt19937_64& rng) {
        return static_cast<Action>(std::uniform_int_distribution<int>(0, kActionCount - 1)(rng));
    };
}

EvaluationSummary evaluate(const Setup& setup, const Policy& policy, int episodes, std::uint64_t seed,
                           std::vector<EpisodeTrace>* traces) {
    if (episodes < 0) throw std::invalid_argument("evaluate: episodes must be >= 0");
    EvaluationSummary summary;
    summary.mission = setup.scenario.mission;
    summary.map = setup.env->name();
    summary.episodes = episodes;
    summary.per_episode.resize(static_cast<std::size_t>(episodes));
    if (traces) traces->assign(static_cast<std::size_t>(episodes), {});

    parallel_for(static_cast<std::size_t>(episodes), [&](std::size_t i) {
        auto scenario_rng = make_rng(seed, streams::kEvalScenario, i);
        auto channel_rng = make_rng(seed, streams::kEvalChannel, i);
        auto policy_rng = make_rng(seed, streams::kPolicy, i);
        EpisodeState state = new_episode(setup.env, setup.scenario, scenario_rng);
        EpisodeTrace* trace = traces ? &(*traces)[i] : nullptr;
        if (trace) {
            trace->start = state.position;
            trace->budget = state.initial_battery;
            trace->devices = state.devices;
            trace->initial_target = state.target;
        }
        double reward_sum = 0.0;
        int t = 0;
        while (!state.terminal()) {
            const Observation obs = assemble_observation(state, setup.spec);
            const Action a = policy(state, obs, policy_rng);
            const StepResult r = step(state, a, setup.step, channel_rng);
            reward_sum += r.reward.total();
            if (trace) {
                trace->steps.push_back({t, state.position, a, r.reward.total(), state.battery, state.target.sum(),
                                        r.served_device, r.collected});
            }
            ++t;
        }
        summary.per_episode[i] = episode_metrics(state, reward_sum);
    });

    if (episodes > 0) {
        double cr = 0.0, cral = 0.0, landed = 0.0;
        for (const auto& m : summary.per_episode) {
            cr += m.cr;
            cral += m.cral;
            landed += m.landed ? 1.0 : 0.0;
        }
        summary.mean_cr = cr / episodes;
        summary.mean_cral = cral / episodes;
        summary.landed_pct = 100.0 * landed / episodes;
    }
    return summary;
}

EvaluationSummary evaluate_checkpoint(const Checkpoint& checkpoint, const Setup& setup, int episodes,
                                      std::uint64_t seed, std::vector<EpisodeTrace>* traces) {
    if (checkpoint.map_size != setup.env->size())
        throw CheckpointError("checkpoint was trained on a " + std::to_string(checkpoint.map_size) +
                              "-cell map, evaluation map '" + setup.env->name() + "' has " +
                              std::to_string(setup.env->size()));
    if (!(checkpoint.spec == setup.spec))
        throw CheckpointError("checkpoint observation spec (l=" + std::to_string(checkpoint.spec.local_size) +
                              ", g=" + std::to_string(checkpoint.spec.global_scaling) +
                              ") differs from the evaluation config");
    auto net = std::make_shared<const QNetwork>(checkpoint.network, checkpoint.spec, checkpoint.map_size);
    if (checkpoint.params.size() != net->parameter_count())
        throw CheckpointError("checkpoint parameter count does not match its architecture");
    auto params = std::make_shared<const std::vector<double>>(checkpoint.params);
    return evaluate(setup, greedy_network_policy(net, params), episodes, seed, traces);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string episodes_csv(const EvaluationSummary& summary) {
    std::ostringstream out;
    out << "episode,cr,cral,landed,steps_used,budget,reward_sum\n";
    for (std::size_t i = 0; i < summary.per_episode.size(); ++i) {
        const auto& m = summary.per_episode[i];
        out << i << ',' << fmt(m.cr) << ',' << fmt(m.cral) << ',' << (m.landed ? 1 : 0) << ',' << m.steps_used << ','
            << m.budget << ',' << fmt(m.reward_sum) << '\n';
    }
    return out.str();
}

std::string summary_json(const EvaluationSummary& summary) {
    Json j = {{"mission", std::string(to_string(summary.mission))},
              {"map", summary.map},
              {"episodes", summary.episodes},
              {"mean_cr", summary.mean_cr},
              {"mean_cral", summary.mean_cral},
              {"landed_pct", summary.landed_pct}};
    return j.dump(2) + "\n";
}

std::string trajectory_jsonl(const EpisodeTrace& trace, Mission mission) {
    std::ostringstream out;
    for (const auto& s : trace.steps) {
        Json j = {{"t", s.t},
                  {"position", {s.position.row, s.position.col}},
                  {"action", std::string(to_string(s.action))},
                  {"reward", s.reward},
                  {"battery", s.battery},
                  {"target_sum", s.target_sum}};
        if (mission == Mission::DH) {
            j["device"] = s.device ? Json(*s.device) : Json(nullptr);
            j["collected"] = s.collected;
        } else {
            j["covered"] = static_cast<int>(s.collected);
        }
        out << j.dump() << '\n';
    }
    return out.str();
}

std::string trajectory_meta_json(const EpisodeTrace& trace, Mission mission, const std::string& map_name) {
    Json j = {{"mission", std::string(to_string(mission))},
              {"map", map_name},
              {"start", {trace.start.row, trace.start.col}},
              {"budget", trace.budget},
              {"steps", trace.steps.size()}};
    if (mission == Mission::DH) {
        Json devices = Json::array();
        for (const auto& d : trace.devices)
            devices.push_back({{"position", {d.position.row, d.position.col}},
                               {"data", d.data_initial},
                               {"color_id", d.color_id}});
        j["devices"] = std::move(devices);
    } else {
        Json cells = Json::array();
        const int m = trace.initial_target.size;
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                if (trace.initial_target.at({r, c}) > 0.0) cells.push_back({r, c});
        j["target_cells"] = std::move(cells);
    }
    return j.dump(2) + "\n";
}

}  // namespace uavsim
