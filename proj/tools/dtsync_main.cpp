// Command-line front end: run one configuration, sweep a parameter axis, or
// cross-check the solvers against brute-force references.
//
// Exit codes: 0 success, 1 I/O failure, 2 infeasible or invalid
// configuration, 3 validation mismatch.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtsync/config.hpp"
#include "dtsync/environment.hpp"
#include "dtsync/oracle.hpp"
#include "dtsync/report.hpp"
#include "dtsync/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;

void write_file_or_throw(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) {
        throw dtsync::config::IoError("cannot open output path: " + path);
    }
    out << content;
    if (!out) {
        throw dtsync::config::IoError("failed while writing: " + path);
    }
}

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = dtsync::config::detail::trim(token);
        if (token.empty()) continue;
        values.push_back(dtsync::config::detail::parse_double("--values", token));
    }
    if (values.empty()) {
        throw dtsync::config::ConfigError("--values: empty list");
    }
    return values;
}

int run_simulate(const std::string& config_path, const std::string& output_override,
                 const std::string& trace_path, const std::string& episode_path, int threads) {
    const dtsync::config::RunConfig cfg = dtsync::config::load_config(config_path);

    if (!episode_path.empty()) {
        const dtsync::env::Episode episode = dtsync::env::generate_episode(
            cfg.scenario.params.num_devices, cfg.scenario.params.num_servers,
            cfg.scenario.params.horizon, cfg.scenario.params.slot_duration_s,
            cfg.scenario.environment, cfg.base_seed);
        std::ostringstream dump;
        dtsync::env::dump_episode(dump, episode);
        write_file_or_throw(episode_path, dump.str());
        std::cout << "wrote episode dump to " << episode_path << "\n";
    }

    std::vector<dtsync::report::ResultRow> rows;
    bool first_policy = true;
    for (const dtsync::sim::Policy& policy : cfg.policies) {
        const std::vector<dtsync::sim::Trace> traces = dtsync::sim::run_realizations(
            cfg.scenario, policy, cfg.realizations, cfg.base_seed, threads);
        const dtsync::sim::Metrics metrics =
            dtsync::sim::aggregate(traces, cfg.scenario.params);
        rows.push_back(dtsync::report::make_row(0.0, policy, metrics, cfg.base_seed));
        if (first_policy && !trace_path.empty()) {
            std::ostringstream dump;
            dtsync::report::write_trace(dump, traces.front());
            write_file_or_throw(trace_path, dump.str());
            std::cout << "wrote trace of first realization to " << trace_path << "\n";
        }
        first_policy = false;
    }

    const std::string out_path = output_override.empty() ? cfg.output : output_override;
    std::ostringstream csv;
    dtsync::report::write_csv(csv, rows);
    write_file_or_throw(out_path, csv.str());
    std::cout << "wrote " << rows.size() << " result row" << (rows.size() == 1 ? "" : "s")
              << " to " << out_path << "\n";
    return kExitOk;
}

int run_sweep(const std::string& config_path, const std::string& axis_name,
              const std::string& values_csv, const std::string& output_override, int threads) {
    const dtsync::config::RunConfig cfg = dtsync::config::load_config(config_path);

    dtsync::sim::SweepAxis axis;
    if (axis_name == "servers") {
        axis = dtsync::sim::SweepAxis::kServers;
    } else if (axis_name == "max_aoi") {
        axis = dtsync::sim::SweepAxis::kMaxAoi;
    } else if (axis_name == "beta") {
        axis = dtsync::sim::SweepAxis::kBeta;
    } else {
        throw dtsync::config::ConfigError("--axis must be servers, max_aoi or beta");
    }
    const std::vector<double> values = parse_value_list(values_csv);

    std::vector<dtsync::report::ResultRow> rows;
    for (const dtsync::sim::Policy& policy : cfg.policies) {
        const std::vector<dtsync::sim::SweepPoint> points = dtsync::sim::sweep(
            cfg.scenario, policy, axis, values, cfg.realizations, cfg.base_seed, threads);
        for (const dtsync::sim::SweepPoint& point : points) {
            auto [scenario, applied] =
                dtsync::sim::apply_sweep_value(cfg.scenario, policy, axis, point.value);
            rows.push_back(
                dtsync::report::make_row(point.value, applied, point.metrics, cfg.base_seed));
        }
    }

    const std::string out_path = output_override.empty() ? cfg.output : output_override;
    std::ostringstream csv;
    dtsync::report::write_csv(csv, rows);
    write_file_or_throw(out_path, csv.str());
    std::cout << "wrote " << rows.size() << " result rows to " << out_path << "\n";
    return kExitOk;
}

int run_validate(int size_limit, std::uint64_t seed) {
    const std::vector<dtsync::oracle::CheckResult> results =
        dtsync::oracle::run_validation(size_limit, seed);
    for (const dtsync::oracle::CheckResult& r : results) {
        std::printf("%-28s cases=%-5d max_rel_error=%-12.3g %s\n", r.name.c_str(), r.cases,
                    r.max_rel_error, r.pass ? "PASS" : "FAIL");
    }
    return dtsync::oracle::all_passed(results) ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital-twin synchronization simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    std::string trace_path;
    std::string episode_path;
    int threads = 1;

    CLI::App* simulate = app.add_subcommand("simulate", "Run every configured policy once");
    simulate->add_option("-c,--config", config_path, "Configuration file")->required();
    simulate->add_option("-o,--output", output_override, "Override the configured CSV path");
    simulate->add_option("--trace", trace_path, "Write the first realization's slot ledger here");
    simulate->add_option("--dump-episode", episode_path, "Write the base-seed episode record here");
    simulate->add_option("--threads", threads, "Worker threads across realizations");

    std::string axis_name;
    std::string values_csv;
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one axis over a list of values");
    sweep->add_option("-c,--config", config_path, "Configuration file")->required();
    sweep->add_option("-a,--axis", axis_name, "servers, max_aoi or beta")->required();
    sweep->add_option("-v,--values", values_csv, "Comma-separated values")->required();
    sweep->add_option("-o,--output", output_override, "Override the configured CSV path");
    sweep->add_option("--threads", threads, "Worker threads across realizations");

    int size_limit = 6;
    std::uint64_t seed = 12345;
    CLI::App* validate =
        app.add_subcommand("validate", "Cross-check solvers against brute-force references");
    validate->add_option("--size-limit", size_limit, "Largest enumerated instance size (2..7)");
    validate->add_option("--seed", seed, "Seed for the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInfeasible;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(config_path, output_override, trace_path, episode_path, threads);
        }
        if (sweep->parsed()) {
            return run_sweep(config_path, axis_name, values_csv, output_override, threads);
        }
        return run_validate(size_limit, seed);
    } catch (const dtsync::config::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const dtsync::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const dtsync::config::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
}
