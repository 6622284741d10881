#include "cli.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "uavsim/config.h"
#include "uavsim/experiments.h"
#include "uavsim/trainer.h"
#include "uavsim/util.h"

namespace uavsim::cli {

namespace fs = std::filesystem;

namespace {

/// Bad invocation or configuration: exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

/// Creates `dir`, refusing to reuse a non-empty directory unless `overwrite`.
void prepare_output_dir(const fs::path& dir, bool overwrite) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw UsageError("output path " + dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir) && !overwrite)
            throw UsageError("output directory " + dir.string() + " is not empty (pass --overwrite to replace it)");
        if (overwrite) fs::remove_all(dir);
    }
    fs::create_directories(dir);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    try {
        return load_run_config(path, overrides);
    } catch (const ConfigError& e) {
        throw UsageError(std::string(e.what()));
    }
}

Setup setup_for(const RunConfig& config) {
    try {
        return make_setup(config);
    } catch (const ConfigError& e) {
        throw UsageError(std::string(e.what()));
    }
}

std::string summary_line(const EvaluationSummary& s) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << "mission=" << to_string(s.mission) << " map=" << s.map
        << " episodes=" << s.episodes << " mean_cr=" << s.mean_cr << " mean_cral=" << s.mean_cral
        << " landed_pct=" << std::setprecision(2) << s.landed_pct;
    return out.str();
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
    std::vector<int> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": '" + item + "' is not an integer");
        }
    }
    if (values.empty()) throw UsageError(std::string(flag) + " must list at least one value");
    return values;
}

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
    bool overwrite = false;
    std::int64_t seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
    auto* c = cmd->add_option("-c,--config", o.config, "Run configuration (JSON)");
    if (config_required) c->required();
    cmd->add_option("--set", o.overrides, "Override a config field, e.g. --set train.gamma=0.9");
    cmd->add_option("-o,--out", o.out, "Output directory (defaults to the config's output_dir)");
    cmd->add_flag("--overwrite", o.overwrite, "Replace a non-empty output directory");
    cmd->add_option("--seed", o.seed, "Seed for every random stream");
}

int cmd_train(const CommonOptions& o, std::int64_t steps, std::ostream& out) {
    RunConfig config = load_config(o.config, o.overrides);
    if (steps >= 0) config.train.total_steps = steps;
    if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) config.output_dir = o.out;
    const Setup setup = setup_for(config);
    const QNetwork net(config.network, setup.spec, setup.env->size());

    const fs::path dir = config.output_dir;
    prepare_output_dir(dir, o.overwrite);
    fs::create_directories(dir / "checkpoints");
    write_file(dir / "config.json", run_config_to_json(config));

    std::ofstream log(dir / "training_log.csv", std::ios::binary);
    if (!log) throw std::runtime_error("cannot write " + (dir / "training_log.csv").string());
    log << training_log_header();

    out << "training " << to_string(config.mission) << " on " << setup.env->name() << " for "
        << config.train.total_steps << " steps (" << net.parameter_count() << " parameters, flatten "
        << net.flattened_size() << ")\n";

    TrainingHooks hooks;
    hooks.on_episode = [&](const TrainingLogRow& row) { log << training_log_line(row); };
    hooks.on_checkpoint = [&](std::int64_t step, std::span<const double> params) {
        if (step == config.train.total_steps) {
            save_checkpoint(dir / "checkpoint.json", net, params);
        } else {
            save_checkpoint(dir / "checkpoints" / ("step_" + std::to_string(step) + ".json"), net, params);
        }
    };
    const TrainingResult result = train(setup, net, config.train, config.seed, hooks);
    log.flush();
    out << "finished: " << result.log.size() << " episodes, " << result.gradient_steps << " gradient steps, "
        << std::fixed << std::setprecision(1) << result.seconds << " s\n";
    out << "checkpoint: " << (dir / "checkpoint.json").string() << "\n";
    return kExitOk;
}

int cmd_eval(const CommonOptions& o, const std::string& checkpoint_path, int episodes, bool export_traj,
             std::ostream& out) {
    std::string config_path = o.config;
    if (config_path.empty()) config_path = (fs::path(checkpoint_path).parent_path() / "config.json").string();
    RunConfig config = load_config(config_path, o.overrides);
    if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
    if (episodes < 0) episodes = config.eval_episodes;
    if (episodes < 1) throw UsageError("--episodes must be >= 1");
    const fs::path dir = o.out.empty() ? fs::path(config.output_dir) / "eval" : fs::path(o.out);
    const Setup setup = setup_for(config);

    const Checkpoint ck = load_checkpoint(checkpoint_path);
    std::vector<EpisodeTrace> traces;
    const EvaluationSummary summary =
        evaluate_checkpoint(ck, setup, episodes, config.seed, export_traj ? &traces : nullptr);

    prepare_output_dir(dir, o.overwrite);
    write_file(dir / "episodes.csv", episodes_csv(summary));
    write_file(dir / "summary.json", summary_json(summary));
    if (export_traj) {
        const fs::path tdir = dir / "trajectories";
        fs::create_directories(tdir);
        for (std::size_t i = 0; i < traces.size(); ++i) {
            std::ostringstream name;
            name << "episode_" << std::setw(4) << std::setfill('0') << i;
            write_file(tdir / (name.str() + ".jsonl"), trajectory_jsonl(traces[i], summary.mission));
            write_file(tdir / (name.str() + ".meta.json"),
                       trajectory_meta_json(traces[i], summary.mission, setup.env->name()));
        }
    }
    out << summary_line(summary) << "\n";
    return kExitOk;
}

int cmd_gridsearch(const CommonOptions& o, const std::string& ls, const std::string& gs, int repeats,
                   std::int64_t steps, int episodes, std::ostream& out) {
    if (repeats < 1) throw UsageError("--repeats must be >= 1");
    if (steps < 0) throw UsageError("--steps must be >= 0");
    RunConfig config = load_config(o.config, o.overrides);
    if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
    if (!o.out.empty()) config.output_dir = o.out;

    GridSearchConfig gc;
    gc.local_sizes = parse_int_list(ls, "--l");
    gc.global_scalings = parse_int_list(gs, "--g");
    gc.repeats = repeats;
    gc.steps = steps;
    gc.eval_episodes = episodes >= 0 ? episodes : config.eval_episodes;
    gc.base = setup_for(config);
    gc.network = config.network;
    gc.train = config.train;
    gc.seed = config.seed;

    const fs::path dir = config.output_dir;
    prepare_output_dir(dir, o.overwrite);
    write_file(dir / "config.json", run_config_to_json(config));
    const auto rows = grid_search(gc, [&](const GridSearchRow& r) {
        out << "l=" << r.local_size << " g=" << r.global_scaling << " repeat=" << r.repeat << " status=" << r.status
            << " mean_cral=" << r.mean_cral << (r.message.empty() ? "" : " (" + r.message + ")") << "\n";
    });
    write_file(dir / "gridsearch.csv", grid_search_csv(rows));
    out << rows.size() << " rows written to " << (dir / "gridsearch.csv").string() << "\n";
    return kExitOk;
}

int cmd_bench(const CommonOptions& o, ObservationSpec a, ObservationSpec b, int steps, int warmup, int batch,
              std::ostream& out) {
    if (steps < 1 || warmup < 0) throw UsageError("--steps must be >= 1 and --warmup >= 0");
    RunConfig config = load_config(o.config, o.overrides);
    if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
    if (batch > 0) config.train.batch_size = batch;
    const Setup base = setup_for(config);
    const int m = base.env->size();
    for (const auto* spec : {&a, &b}) {
        try {
            flatten_size(*spec, m, config.network.kernels, config.network.conv_layers, config.network.kernel_size);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    const SpeedupResult r = speedup_benchmark(base, a, b, config.network, config.train, steps, warmup, config.seed);
    out << std::fixed << std::setprecision(3) << "a (l=" << a.local_size << ", g=" << a.global_scaling
        << "): " << r.steps_per_second_a << " steps/s\n"
        << "b (l=" << b.local_size << ", g=" << b.global_scaling << "): " << r.steps_per_second_b << " steps/s\n"
        << "speedup a/b: " << r.ratio << "\n";
    if (!o.out.empty()) {
        prepare_output_dir(o.out, o.overwrite);
        std::ostringstream j;
        j << std::setprecision(10) << "{\n  \"a\": {\"l\": " << a.local_size << ", \"g\": " << a.global_scaling
          << ", \"steps_per_second\": " << r.steps_per_second_a << "},\n  \"b\": {\"l\": " << b.local_size
          << ", \"g\": " << b.global_scaling << ", \"steps_per_second\": " << r.steps_per_second_b
          << "},\n  \"ratio\": " << r.ratio << "\n}\n";
        write_file(fs::path(o.out) / "speedup.json", j.str());
    }
    return kExitOk;
}

int cmd_export_maps(const std::string& dir, bool overwrite, std::ostream& out) {
    prepare_output_dir(dir, overwrite);
    for (const auto& name : builtin_map_names()) {
        const fs::path path = fs::path(dir) / (name + ".json");
        write_file(path, map_to_json_text(builtin_map(name)));
        out << path.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"UAV path planning simulator with DDQN training (CPP and DH missions)", "uavsim"};
    app.require_subcommand(1);

    CommonOptions common;
    std::int64_t steps = -1;
    std::string checkpoint;
    int episodes = -1;
    bool export_traj = false;
    std::string ls = "9,17,25,33";
    std::string gs = "2,3,5,7";
    int repeats = 3;
    std::int64_t grid_steps = 500000;
    ObservationSpec spec_a{17, 3};
    ObservationSpec spec_b{0, 1};
    int bench_steps = 1000;
    int warmup = 20;
    int batch = 0;
    std::string maps_dir;

    auto* train_cmd = app.add_subcommand("train", "Train a DDQN agent");
    add_common(train_cmd, common, true);
    train_cmd->add_option("--steps", steps, "Override train.total_steps");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on Monte Carlo scenarios");
    add_common(eval_cmd, common, false);
    eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
    eval_cmd->add_option("--episodes", episodes, "Number of episodes (default: eval_episodes from config)");
    eval_cmd->add_flag("--export-trajectories", export_traj, "Write one JSON-lines trajectory per episode");

    auto* grid_cmd = app.add_subcommand("gridsearch", "Train and evaluate agents over (l, g) combinations");
    add_common(grid_cmd, common, true);
    grid_cmd->add_option("--l", ls, "Comma-separated local map sizes");
    grid_cmd->add_option("--g", gs, "Comma-separated global map scalings");
    grid_cmd->add_option("--repeats", repeats, "Agents per combination");
    grid_cmd->add_option("--steps", grid_steps, "Training steps per agent");
    grid_cmd->add_option("--episodes", episodes, "Evaluation episodes per agent");

    auto* bench_cmd = app.add_subcommand("bench-speedup", "Compare gradient-step throughput of two observation specs");
    add_common(bench_cmd, common, true);
    bench_cmd->add_option("--a-l", spec_a.local_size, "Local size of spec A");
    bench_cmd->add_option("--a-g", spec_a.global_scaling, "Global scaling of spec A");
    bench_cmd->add_option("--b-l", spec_b.local_size, "Local size of spec B (baseline)");
    bench_cmd->add_option("--b-g", spec_b.global_scaling, "Global scaling of spec B (baseline)");
    bench_cmd->add_option("--steps", bench_steps, "Timed gradient steps per spec");
    bench_cmd->add_option("--warmup", warmup, "Untimed gradient steps per spec");
    bench_cmd->add_option("--batch", batch, "Override train.batch_size");

    auto* maps_cmd = app.add_subcommand("export-maps", "Write the bundled maps as JSON files");
    maps_cmd->add_option("-o,--out", maps_dir, "Output directory")->required();
    maps_cmd->add_flag("--overwrite", common.overwrite, "Replace a non-empty output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(common, steps, out);
        if (eval_cmd->parsed()) return cmd_eval(common, checkpoint, episodes, export_traj, out);
        if (grid_cmd->parsed()) return cmd_gridsearch(common, ls, gs, repeats, grid_steps, episodes, out);
        if (bench_cmd->parsed()) return cmd_bench(common, spec_a, spec_b, bench_steps, warmup, batch, out);
        if (maps_cmd->parsed()) return cmd_export_maps(maps_dir, common.overwrite, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    err << "error: no command given\n";
    return kExitUsage;
}

}  // namespace uavsim::cli
