#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "explab/agent/checkpoint.hpp"
#include "explab/errors.hpp"
#include "explab/gridworld/env_spec.hpp"
#include "explab/gridworld/gridworld.hpp"
#include "explab/harness/config.hpp"
#include "explab/harness/evaluate.hpp"
#include "explab/harness/plot.hpp"
#include "explab/harness/trainer.hpp"
#include "explab/schedule/table_ratios.hpp"

namespace fs = std::filesystem;
using namespace explab;

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("seed range must look like a:b");
    try {
        return {std::stoull(s.substr(0, colon)), std::stoull(s.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw ConfigError("seed range must look like a:b, got " + s);
    }
}

int cmd_train(const std::string& config, const std::vector<std::string>& overrides, bool quiet) {
    const auto cfg = harness::load_config(config, overrides);
    if (!quiet)
        std::cerr << "training " << to_string(cfg.method) << " on " << cfg.env << " for " << cfg.total_frames
                  << " frames x " << cfg.run_seeds.size() << " runs -> " << cfg.output_dir << '\n';
    const auto results = harness::run_experiment(cfg);
    bool ok = true;
    for (const auto& r : results) {
        std::cout << "run " << r.run_seed << ": " << (r.ok ? "ok" : "aborted (" + r.error_kind + ": " + r.error + ")")
                  << ", frames " << r.frames << ", episodes " << r.episodes << ", running mean "
                  << r.final_running_mean << '\n';
        ok = ok && r.ok;
    }
    return ok ? 0 : 3;
}

int cmd_eval(const std::string& checkpoint, const std::string& env, std::size_t episodes, const std::string& range,
             bool sample, std::uint64_t seed) {
    const auto ckpt = agent::load_checkpoint(checkpoint);
    const auto spec = gridworld::parse_env_spec(env.empty() ? ckpt.env_id : env);
    harness::EvalOptions opt;
    std::tie(opt.seed_begin, opt.seed_end) = parse_seed_range(range);
    opt.episodes = episodes;
    opt.policy = sample ? harness::EvalPolicy::Sample : harness::EvalPolicy::Greedy;
    opt.sample_seed = seed;
    const auto res = harness::evaluate(ckpt.params, spec, opt);
    std::cout << nlohmann::json{{"env", gridworld::to_string(spec)},
                                {"episodes", episodes},
                                {"mean_return", res.mean},
                                {"std_return", res.std},
                                {"success_rate", res.success_rate}}
                     .dump(2)
              << '\n';
    return 0;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out_dir, const std::string& column) {
    std::vector<harness::RunCurve> curves;
    for (const auto& pattern : inputs) {
        const auto files = harness::expand_glob(pattern);
        if (files.empty()) throw ConfigError("no files match " + pattern);
        for (const auto& f : files) curves.push_back(harness::read_run_curve(f, column));
    }
    const auto series = harness::aggregate_curves(curves);
    fs::create_directories(out_dir);
    {
        std::ofstream svg(fs::path(out_dir) / (column + ".svg"));
        svg << harness::render_svg(series, column);
    }
    std::ofstream csv(fs::path(out_dir) / (column + ".csv"));
    harness::write_aggregate_csv(csv, series);
    std::cout << "plotted " << curves.size() << " runs in " << series.size() << " series to " << out_dir << '\n';
    return 0;
}

int cmd_ratios(bool csv_only) {
    const auto cells = schedule::reproduce_ratio_table();
    if (!csv_only) {
        schedule::write_ratio_table_text(std::cout, cells);
        std::cout << '\n';
    }
    schedule::write_ratio_table_csv(std::cout, cells);
    return 0;
}

int cmd_render(const std::string& env, std::uint64_t seed) {
    const auto state = gridworld::generate(gridworld::parse_env_spec(env), seed);
    std::cout << gridworld::render_ascii(state);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exploration lab: gridworld RL with ranked self-imitation and count-based bonuses"};
    app.require_subcommand(1);

    std::string config;
    std::vector<std::string> overrides;
    bool quiet = false;
    auto* train = app.add_subcommand("train", "Run every seed of an experiment config");
    train->add_option("--config", config, "JSON experiment config")->required();
    train->add_option("--override", overrides, "dotted.key=value, repeatable");
    train->add_flag("--quiet", quiet, "No progress line on stderr");

    std::string checkpoint, env, range = "1000000:1000100";
    std::size_t episodes = 100;
    bool sample = false;
    std::uint64_t eval_seed = 0;
    auto* eval = app.add_subcommand("eval", "Roll out a checkpoint on held-out level seeds");
    eval->add_option("--checkpoint", checkpoint, "checkpoint.bin of a run")->required();
    eval->add_option("--env", env, "Environment (defaults to the checkpoint's)");
    eval->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
    eval->add_option("--seed-range", range, "Level seeds a:b (half-open)");
    eval->add_flag("--sample", sample, "Sample actions instead of taking the argmax");
    eval->add_option("--action-seed", eval_seed, "RNG seed for --sample");

    std::vector<std::string> inputs;
    std::string out_dir = "plots", column = "running_mean";
    auto* plot = app.add_subcommand("plot", "Mean/std curves across runs as SVG and CSV");
    plot->add_option("--inputs", inputs, "metrics.csv paths or globs")->required();
    plot->add_option("--out", out_dir, "Output directory");
    plot->add_option("--column", column, "Metrics column to plot");

    bool csv_only = false;
    auto* ratios = app.add_subcommand("ratios", "Expected on:off update ratios per environment and rollout size");
    ratios->add_flag("--csv", csv_only, "CSV only");

    std::string render_env;
    std::uint64_t render_seed = 0;
    auto* render = app.add_subcommand("render", "Print a generated level");
    render->add_option("--env", render_env, "Environment")->required();
    render->add_option("--seed", render_seed, "Level seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*train) return cmd_train(config, overrides, quiet);
        if (*eval) return cmd_eval(checkpoint, env, episodes, range, sample, eval_seed);
        if (*plot) return cmd_plot(inputs, out_dir, column);
        if (*ratios) return cmd_ratios(csv_only);
        if (*render) return cmd_render(render_env, render_seed);
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const NumericError& e) {
        return fail("numeric", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 4);
    }
    return 0;
}
