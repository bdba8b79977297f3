// Command-line driver: strategy-grid runs and the three-portfolio comparison.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "homesim/engine.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kRuntimeError = 3 };

} // namespace

int main(int argc, char** argv)
{
    homesim::RunConfig config;
    std::string mode = "grid";
    std::string data_dir = config.data_dir.string();
    std::string out_dir = config.out_dir.string();

    CLI::App app{"Monte Carlo life-cycle simulator of homeowner strategies vs consumption-matched renters"};
    app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags override it");
    app.add_option("--data-dir", data_dir, "Directory with macro_panel.csv, life_table.csv, plf_table.csv");
    app.add_option("--countries", config.countries,
                   "Comma-separated ISO codes or groups US, UK, EUROPE; empty keeps all retained countries");
    app.add_option("--households", config.households, "Number of simulated households")->check(CLI::PositiveNumber);
    app.add_option("--seed", config.seed, "Master seed");
    app.add_option("--threads", config.threads, "Worker threads, 0 = hardware concurrency")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "Output directory for result CSVs");
    app.add_option("--mode", mode, "grid or comparison")->check(CLI::IsMember({"grid", "comparison"}));
    app.add_option("--dump-trajectories", config.dump_trajectories,
                   "Write base-strategy year records of the first N households to trajectories.csv");
    app.add_option("--down-fracs", config.down_fracs, "Down-payment fractions of the grid")->delimiter(',');
    app.add_option("--threshold-fracs", config.threshold_fracs, "Extra purchase thresholds of the grid")
        ->delimiter(',');
    app.add_option("--second-home", config.second_home, "Also run second-home strategies (true/false)");
    app.add_option("--second-down-fracs", config.second_down_fracs, "Second-home down-payment fractions")
        ->delimiter(',');
    app.add_option("--second-threshold-fracs", config.second_threshold_fracs, "Second-home purchase thresholds")
        ->delimiter(',');
    app.add_option("--replacement", config.replacement, "Social-security replacement rate of last income");
    app.add_option("--income-target", config.income_target, "exp(mean log earnings) at age 45, 2024 USD");
    app.add_option("--comparison-paths", config.comparison_paths, "Paths in comparison mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    config.data_dir = data_dir;
    config.out_dir = out_dir;

    try {
        config.validate();
        const auto start = std::chrono::steady_clock::now();
        const auto inputs = homesim::load_inputs(config);
        fmt::print(stderr, "panel: {} countries, {} country-years, fingerprint {}\n", inputs.panel.countries.size(),
                   inputs.panel.country_years(), inputs.panel_fingerprint);
        if (mode == "comparison") {
            const auto result = homesim::run_strategy_comparison(config, inputs);
            fmt::print("{}\n", homesim::write_comparison(result, config.out_dir).string());
        } else {
            const auto result = homesim::run_grid(config, inputs);
            for (const auto& file : homesim::write_tables(result, config.out_dir))
                fmt::print("{}\n", file.string());
            if (config.dump_trajectories > 0)
                fmt::print("{}\n", homesim::write_trajectories(config, inputs, config.out_dir).string());
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        fmt::print(stderr, "done in {:.1f}s\n", elapsed.count());
        return kOk;
    } catch (const homesim::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kConfigError;
    } catch (const homesim::DataError& e) {
        fmt::print(stderr, "data error: {}\n", e.what());
        return kDataError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRuntimeError;
    }
}
