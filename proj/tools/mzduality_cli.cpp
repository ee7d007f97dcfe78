// Command-line front end: run, validate and list experiment scenarios.
//
// Exit codes: 0 success, 2 invalid scenario or usage, 3 curve-fit failure,
// 4 I/O failure, 1 anything else.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mzduality/estimators.hpp"
#include "mzduality/scenario.hpp"

namespace fs = std::filesystem;
using namespace mzduality;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kInvalidConfig = 2;
constexpr int kFitFailure = 3;
constexpr int kIoFailure = 4;

// A path on disk wins; otherwise the argument may name a bundled scenario.
Scenario resolve(const std::string& arg) {
    if (fs::exists(arg)) {
        return load_scenario(arg);
    }
    const auto& builtin = builtin_scenarios();
    if (const auto it = builtin.find(arg); it != builtin.end()) {
        return parse_scenario(it->second);
    }
    throw IoError("no scenario file or bundled scenario named '" + arg + "'");
}

void print_diagnostics(const std::string& source, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
        std::cerr << source << ": " << d.message() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon Mach-Zehnder complementarity simulator"};
    app.require_subcommand(1);

    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Only report errors");

    std::string scenario_arg;
    std::string output_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> points;

    auto* run = app.add_subcommand("run", "Run a scenario and write CSV plus summary");
    run->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")->required();
    run->add_option("--output-dir", output_dir, "Directory for the CSV and summary");
    run->add_option("--seed", seed, "Override montecarlo.seed");
    run->add_option("--points", points, "Replace the grid step by this many points")
        ->check(CLI::PositiveNumber);
    run->add_flag("-q,--quiet", quiet, "Only report errors");

    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario_arg, "Scenario file or bundled scenario name")->required();

    auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidConfig;
    }

    try {
        if (*list) {
            for (const auto& [name, text] : builtin_scenarios()) {
                std::cout << name << "\n";
            }
            return kOk;
        }

        if (*validate) {
            try {
                resolve(scenario_arg);
            } catch (const ConfigError& e) {
                print_diagnostics(scenario_arg, e.diagnostics());
                return kInvalidConfig;
            }
            if (!quiet) {
                std::cout << scenario_arg << ": ok\n";
            }
            return kOk;
        }

        Scenario scenario = resolve(scenario_arg);
        if (seed) {
            if (scenario.monte_carlo) {
                scenario.monte_carlo->seed = *seed;
            } else if (!quiet) {
                std::cerr << "note: --seed ignored, scenario has no Monte Carlo section\n";
            }
        }
        if (points) {
            scenario.grid.points = *points;
        }
        const RunArtifacts out = run_scenario(scenario, {output_dir});
        if (!quiet) {
            std::cout << out.summary_text << "wrote " << out.csv.string() << " (" << out.rows
                      << " rows), " << out.summary.string() << "\n";
        }
        return kOk;
    } catch (const ConfigError& e) {
        print_diagnostics(scenario_arg, e.diagnostics());
        return kInvalidConfig;
    } catch (const FitError& e) {
        const FitReport& last = e.last_iterate();
        std::cerr << "fit failed: " << e.what() << " (last iterate: amplitude " << last.amplitude
                  << ", half_width " << last.half_width << ", center " << last.center << ")\n";
        return kFitFailure;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
