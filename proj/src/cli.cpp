#include "cast/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cast/config.hpp"

namespace cast {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve_config_path(const CliOptions& opt) {
    if (opt.config.empty()) throw ConfigError("no config given (use --config PATH)");
    if (fs::exists(opt.config)) return opt.config;
    if (!opt.config_dir.empty()) {
        const fs::path bundled = fs::path(opt.config_dir) / (opt.config + ".json");
        if (fs::exists(bundled)) return bundled.string();
    }
    throw ConfigError("config file '" + opt.config + "' not found");
}

RunConfig prepare(const CliOptions& opt) {
    RunConfig rc = load_config(resolve_config_path(opt));
    if (opt.seed) {
        rc.experiment.seed = *opt.seed;
        rc.snapshot["seed"] = *opt.seed;
    }
    if (opt.trials) {
        if (*opt.trials < 1) throw ConfigError("--trials must be >= 1");
        rc.experiment.trials = *opt.trials;
        rc.snapshot["trials"] = *opt.trials;
    }
    rc.experiment.threads = opt.threads;
    return rc;
}

fs::path output_path(const CliOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return fs::path(opt.out_dir) / name;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write '" + p.string() + "'");
    f << text;
    if (!f) throw Error("write failed for '" + p.string() + "'");
}

void write_manifest(const CliOptions& opt, const std::string& command, const RunConfig& rc,
                    double seconds, const std::vector<std::string>& outputs,
                    const json& extra = json::object()) {
    json m;
    m["tool"] = "cast_sim";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = rc.experiment.seed;
    m["config"] = rc.snapshot;
    m["wall_clock_seconds"] = seconds;
    m["outputs"] = outputs;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    const std::string suffix = command == "simulate" ? "" : "." + command;
    const fs::path p = output_path(opt, rc.experiment.experiment_id + suffix + ".manifest.json");
    write_text(p, m.dump(2) + "\n");
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string bound_flag(const CellResult& r) {
    if (std::isnan(r.bound_lower)) return "";
    const double ci = 1.96 * std::sqrt(r.success_se * r.success_se + r.bound_se * r.bound_se);
    return r.success_rate + ci >= r.bound_lower ? "1" : "0";
}

int run_experiment(const CliOptions& opt, std::ostream& out, const std::string& command,
                   bool with_bound) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig rc = prepare(opt);
    if (with_bound) {
        rc.experiment.bound.enabled = true;
        rc.snapshot["bound"]["enabled"] = true;
    }
    const std::vector<CellResult> results = run_sweep(rc.experiment);

    std::ostringstream csv;
    const std::vector<std::string> extra_cols =
        with_bound ? std::vector<std::string>{"bound_ok"} : std::vector<std::string>{};
    write_csv_header(csv, extra_cols);
    std::int64_t trials = 0;
    for (const auto& r : results) {
        trials += r.trials;
        if (with_bound)
            write_csv_row(csv, r, {bound_flag(r)});
        else
            write_csv_row(csv, r);
    }
    const std::string name = rc.experiment.experiment_id + (with_bound ? ".bound.csv" : ".csv");
    const fs::path p = output_path(opt, name);
    write_text(p, csv.str());
    write_manifest(opt, command, rc, seconds_since(t0), {p.string()});
    out << command << " " << rc.experiment.experiment_id << ": " << results.size() << " cells, "
        << trials << " trials -> " << p.string() << "\n";
    return 0;
}

}  // namespace

int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] { return run_experiment(opt, out, "simulate", false); });
}

int cmd_bound(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] { return run_experiment(opt, out, "bound", true); });
}

int cmd_latency(const CliOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const RunConfig rc = prepare(opt);
        LatencyCalibration cal = rc.experiment.latency;
        json extra = json::object();
        if (rc.latency.calibrate) {
            CalibrationTargets targets = rc.latency.targets;
            const CalibrationReport rep = calibrate_table1(targets, cal);
            cal = rep.cal;
            extra["calibration_max_abs_error_ms"] = rep.max_abs_error_ms;
        }
        extra["calibration"] = {
            {"t_prop_us", cal.t_prop_ms * 1e3},
            {"arrival_period_subframes", cal.arrival_period_sf},
            {"arrival_phase_subframes", cal.arrival_phase_sf},
            {"lte_grant_offset_us", cal.lte_grant_offset_ms * 1e3},
            {"lte_t_dec_us", cal.lte_t_dec_ms * 1e3},
            {"minislot_symbols", cal.minislot_symbols},
            {"minislot_t_dec_us", cal.minislot_t_dec_ms * 1e3},
            {"cast_t_dec_fixed_us", cal.cast_t_dec_fixed_ms * 1e3},
            {"cast_t_dec_per_sample_ns", cal.cast_t_dec_per_sample_ms * 1e6},
            {"table_m", cal.table_m}};

        std::ostringstream csv;
        csv << "experiment_id,dl_ul_ratio,pattern,m,lte_tdd_ms,minislot_nr_ms,cast_ms\n";
        std::size_t rows = 0;
        for (int m : rc.latency.m) {
            for (const auto& row : latency_table(rc.latency.patterns, cal, m, rc.experiment.n)) {
                csv << rc.experiment.experiment_id << "," << row.ratio << "," << row.pattern << ","
                    << m << "," << format_number(row.lte_ms) << ","
                    << format_number(row.minislot_ms) << "," << format_number(row.cast_ms) << "\n";
                ++rows;
            }
        }
        const fs::path p = output_path(opt, rc.experiment.experiment_id + ".latency.csv");
        write_text(p, csv.str());
        write_manifest(opt, "latency", rc, seconds_since(t0), {p.string()}, extra);
        out << "latency " << rc.experiment.experiment_id << ": " << rows << " rows -> "
            << p.string() << "\n";
        return 0;
    });
}

int run_cli(int argc, char** argv, const std::string& config_dir) {
    CLI::App app{"CAST grant-signalling simulator"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CliOptions opt;
    opt.config_dir = config_dir;
    std::uint64_t seed = 0;
    int trials = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "config file, or the name of a bundled config")->required();
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--threads", opt.threads, "worker threads (fallback: CAST_SIM_THREADS)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--trials", trials, "trials per cell override")->check(CLI::PositiveNumber);
    };
    CLI::App* sim = app.add_subcommand("simulate", "run a Monte Carlo sweep");
    CLI::App* bnd = app.add_subcommand("bound", "evaluate the success-probability bound with the sweep");
    CLI::App* lat = app.add_subcommand("latency", "evaluate the TDD access-latency model");
    for (CLI::App* s : {sim, bnd, lat}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed")) opt.seed = seed;
    if (chosen->count("--trials")) opt.trials = trials;

    if (chosen == sim) return cmd_simulate(opt, std::cout, std::cerr);
    if (chosen == bnd) return cmd_bound(opt, std::cout, std::cerr);
    return cmd_latency(opt, std::cout, std::cerr);
}

}  // namespace cast
