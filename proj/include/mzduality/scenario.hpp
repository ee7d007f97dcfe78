#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mzduality/beam.hpp"
#include "mzduality/interference.hpp"

namespace mzduality {

/*
 * Scenario files are line-oriented `key = value` text. Keys are dotted
 * (`geometry.waist_radius`); a `[section]` header prefixes the keys that
 * follow it. `#` starts a comment. Lengths take an optional unit suffix
 * (nm, um, mm, cm, m; bare numbers are metres), phases an optional `rad`.
 */

struct Diagnostic {
    std::string field;  // dotted key, or empty for file-level problems
    std::string reason;
    int line = 0;       // 1-based, 0 when the field is missing

    std::string message() const;
};

/// Invalid scenario content (CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  private:
    std::vector<Diagnostic> diagnostics_;
};

/// Unreadable input or unwritable output (CLI exit code 4).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ScanAxis { delay, tangential, radial, phase };
enum class Observables { analytic, estimated };

struct Geometry {
    double waist_radius = 82.5e-6;
    double wavelength = 808e-9;
    double reference_distance = 0.661;
};

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
    // When set, replaces `step` by this many evenly spaced points.
    std::optional<std::size_t> points;

    std::vector<double> values() const;
};

struct MonteCarloSpec {
    std::uint64_t pairs_per_point = 100000;
    std::optional<std::uint64_t> seed;
    std::size_t phases = 20;
    double coincidence_fraction = 1.0;
    double dark_counts = 0.0;
};

struct Scenario {
    std::string name;
    Geometry geometry;
    SpectralFilter filter{808e-9, 2.5e-9};
    double v_max = 1.0;
    // Fixed signal-2 displacement at the reference plane for delay and phase scans.
    Transverse displacement;
    ScanAxis axis = ScanAxis::tangential;
    Grid grid;
    Observables observables = Observables::analytic;
    double mean_rate = 1000.0;
    std::optional<MonteCarloSpec> monte_carlo;
    std::string output;  // file stem, defaults to name

    // Every violated constraint, each with its field path.
    std::vector<Diagnostic> check() const;
};

std::string_view to_string(ScanAxis axis);
std::string_view to_string(Observables observables);

/// Parses and validates scenario text. Throws ConfigError carrying every
/// diagnostic found.
Scenario parse_scenario(std::string_view text);

// Reads a file (IoError if unreadable) and parses it.
Scenario load_scenario(const std::filesystem::path& path);

/// Validation without execution. Empty result means the scenario is valid.
/// Throws IoError if the file cannot be read.
std::vector<Diagnostic> validate_scenario(const std::filesystem::path& path);

/// Built-in scenarios by name: fig4-delay, fig5-tangential, fig5-radial,
/// fig6-duality.
const std::map<std::string, std::string, std::less<>>& builtin_scenarios();

// Parses a length such as "82.5 um"; nullopt on malformed input.
std::optional<double> parse_length(std::string_view text);

struct RunOptions {
    std::filesystem::path output_dir = ".";
};

struct RunArtifacts {
    std::filesystem::path csv;
    std::filesystem::path summary;
    std::size_t rows = 0;
    std::string summary_text;
};

/// Runs the scan, writing `<stem>.csv` and `<stem>.summary.txt` into the
/// output directory. Throws FitError when a curve fit fails and IoError when
/// files cannot be written.
RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace mzduality
