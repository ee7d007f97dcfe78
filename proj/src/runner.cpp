#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "mzduality/duality.hpp"
#include "mzduality/estimators.hpp"
#include "mzduality/interference.hpp"
#include "mzduality/random.hpp"
#include "mzduality/scenario.hpp"

namespace mzduality {

namespace {

constexpr double kDualitySlack = 0.02;

std::string num(double v) { return fmt::format("{:.10g}", v); }

class Table {
  public:
    explicit Table(std::vector<std::string> header) : columns_(header.size()) { add(header); }

    void add(const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += (i ? "," : "") + row[i];
        }
        text_ += line + "\n";
    }

    const std::string& text() const { return text_; }
    std::size_t columns() const { return columns_; }

  private:
    std::size_t columns_;
    std::string text_;
};

class Summary {
  public:
    void line(std::string_view key, const std::string& value) {
        text_ += fmt::format("{}: {}\n", key, value);
    }
    void section(std::string_view name) { text_ += fmt::format("[{}]\n", name); }
    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("error while writing " + path.string());
    }
}

// Seed for grid point i, independent of every other point.
std::uint64_t point_seed(std::uint64_t seed, std::size_t i) { return mix64(seed ^ mix64(i + 1)); }

std::vector<double> phase_grid(std::size_t n) {
    std::vector<double> phases(n);
    for (std::size_t k = 0; k < n; ++k) {
        phases[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    }
    return phases;
}

ArmConfiguration arms_for(const Scenario& s) {
    // Signal 2 leaves the common waist tilted so that it lands `displacement`
    // away from signal 1 at the reference plane.
    const GaussianMode reference(s.geometry.waist_radius, s.geometry.wavelength);
    const double z = s.geometry.reference_distance;
    const GaussianMode tilted =
        reference.with_tilt({s.displacement.tangential / z, s.displacement.radial / z});
    return {reference, tilted, 0.0, 0.0};
}

void common_summary(Summary& out, const Scenario& s, std::size_t rows) {
    const GaussianMode mode(s.geometry.waist_radius, s.geometry.wavelength);
    out.line("scenario", s.name);
    out.line("axis", std::string(to_string(s.axis)));
    out.line("observables", std::string(to_string(s.observables)));
    out.line("points", std::to_string(rows));
    out.section("analytic");
    out.line("rayleigh_range_mm", num(rayleigh_range(mode) * 1e3));
    out.line("mode_radius_at_reference_mm",
             num(propagated_radius(s.geometry.waist_radius, s.geometry.reference_distance,
                                   s.geometry.wavelength) *
                 1e3));
    out.line("coherence_length_um", num(coherence_length(s.filter) * 1e6));
    out.line("v_max", num(s.v_max));
}

std::pair<Table, Summary> run_displacement(const Scenario& s, const std::vector<double>& grid) {
    const bool tangential = s.axis == ScanAxis::tangential;
    const double w = propagated_radius(s.geometry.waist_radius, s.geometry.reference_distance,
                                       s.geometry.wavelength);
    const bool estimated = s.observables == Observables::estimated;

    std::vector<std::string> header{tangential ? "delta_y_mm" : "delta_x_mm", "visibility_analytic",
                                    "distinguishability_model", "duality_model"};
    if (estimated) {
        header.insert(header.end(), {"visibility_estimated", "distinguishability_estimated",
                                     "distinguishability_ci_low", "distinguishability_ci_high",
                                     "duality_estimated"});
    }
    Table table(header);

    std::vector<DataPoint> v_analytic, d_model, v_est, d_est;
    double max_dual_est = 0.0;
    std::size_t above_one = 0;
    std::size_t violations = 0;
    const std::vector<double> phases = estimated ? phase_grid(s.monte_carlo->phases) : std::vector<double>{};

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double delta = grid[i];
        const DualityModel model{w, s.v_max, tangential ? Transverse{delta, 0.0} : Transverse{0.0, delta}};
        const double v = model_visibility(model);
        const double d = model_distinguishability(model);
        v_analytic.push_back({delta, v});
        d_model.push_back({delta, d});
        std::vector<std::string> row{num(delta * 1e3), num(v), num(d), num(duality_audit(v, d).value)};

        if (estimated) {
            const auto& mc = *s.monte_carlo;
            const ClickOptions opts{mc.pairs_per_point, mc.coincidence_fraction, mc.dark_counts};
            const ClickStream stream =
                simulate_clicks(model, s.filter, 0.0, phases, opts, point_seed(*mc.seed, i));
            const double v_hat = estimate_visibility(stream);
            const Estimate d_hat = estimate_distinguishability(stream);
            const double dual = duality_audit(v_hat, std::min(1.0, std::abs(d_hat.value))).value;
            max_dual_est = std::max(max_dual_est, dual);
            above_one += dual > 1.0 ? 1 : 0;
            violations += dual > 1.0 + kDualitySlack ? 1 : 0;
            v_est.push_back({delta, v_hat});
            d_est.push_back({delta, d_hat.value});
            row.insert(row.end(), {num(v_hat), num(d_hat.value), num(d_hat.ci95.lower),
                                   num(d_hat.ci95.upper), num(dual)});
        }
        table.add(row);
    }

    Summary out;
    common_summary(out, s, grid.size());
    out.line("theoretical_half_width_mm", num(w * 1e3));
    const FitReport fit = fit_gaussian_falloff(v_analytic);
    out.line("fit_amplitude", num(fit.amplitude));
    out.line("fit_half_width_mm", num(fit.half_width * 1e3));
    out.line("fit_center_mm", num(fit.center * 1e3));

    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < v_analytic.size(); ++i) {
        const double dual = duality_audit(v_analytic[i].value, d_model[i].value).value;
        lo = std::min(lo, dual);
        hi = std::max(hi, dual);
    }
    out.line("duality_model_min", num(lo));
    out.line("duality_model_max", num(hi));

    if (estimated) {
        out.section("estimated");
        out.line("seed", std::to_string(*s.monte_carlo->seed));
        out.line("pairs_per_phase", std::to_string(s.monte_carlo->pairs_per_point));
        out.line("phases", std::to_string(s.monte_carlo->phases));
        const FitReport vf = fit_gaussian_falloff(v_est);
        out.line("fit_amplitude", num(vf.amplitude));
        out.line("fit_amplitude_ci95", num(vf.ci_amplitude.lower) + " " + num(vf.ci_amplitude.upper));
        out.line("fit_half_width_mm", num(vf.half_width * 1e3));
        out.line("fit_half_width_ci95_mm",
                 num(vf.ci_half_width.lower * 1e3) + " " + num(vf.ci_half_width.upper * 1e3));
        const FitReport df = fit_distinguishability_curve(d_est, vf);
        out.line("distinguishability_fit_center_mm", num(df.center * 1e3));
        out.line("distinguishability_fit_rss", num(df.rss));
        out.line("duality_estimated_max", num(max_dual_est));
        // Shot noise alone pushes estimates a little past 1 once D is near 1.
        out.line("duality_estimated_above_one", std::to_string(above_one));
        out.line("duality_bound_violations", std::to_string(violations));
        out.line("duality_bound_slack", num(kDualitySlack));
    }
    return {std::move(table), std::move(out)};
}

std::pair<Table, Summary> run_fringes(const Scenario& s, const std::vector<double>& grid) {
    const bool delay_axis = s.axis == ScanAxis::delay;
    const bool estimated = s.observables == Observables::estimated;
    const double mean = estimated ? 0.5 * static_cast<double>(s.monte_carlo->pairs_per_point) : s.mean_rate;
    const ArmConfiguration arms = arms_for(s);

    const ScanResult expected = delay_axis ? fringe_scan(arms, s.filter, grid, mean, s.v_max)
                                           : phase_scan(arms, s.filter, grid, mean, s.v_max);

    std::vector<std::string> header{delay_axis ? "delay_um" : "phase_rad", "counts_expected"};
    if (estimated) {
        header.push_back("counts_simulated");
    }
    Table table(header);
    ScanResult simulated = expected;
    for (std::size_t i = 0; i < expected.points.size(); ++i) {
        const auto& p = expected.points[i];
        std::vector<std::string> row{num(delay_axis ? p.abscissa * 1e6 : p.abscissa), num(p.value)};
        if (estimated) {
            Engine rng = substream(*s.monte_carlo->seed, i);
            const double mu = p.value + s.monte_carlo->dark_counts;
            const auto n = mu > 0.0 ? std::poisson_distribution<std::uint64_t>(mu)(rng) : 0;
            simulated.points[i].value = static_cast<double>(n);
            row.push_back(std::to_string(n));
        }
        table.add(row);
    }

    Summary out;
    common_summary(out, s, grid.size());
    const double v_t = transverse_visibility(arms);
    out.line("transverse_visibility", num(v_t));
    out.line("fringe_period_um", num(s.geometry.wavelength * 1e6));
    if (delay_axis) {
        const double lc = coherence_length(s.filter);
        out.line("peak_fringe_visibility", num(s.v_max * v_t));
        out.line("fringe_visibility_at_coherence_length", num(s.v_max * v_t * coherence_envelope(s.filter, lc)));
    } else {
        out.line("visibility_expected", num(extract_visibility(expected)));
    }
    if (estimated) {
        out.section("estimated");
        out.line("seed", std::to_string(*s.monte_carlo->seed));
        out.line("mean_counts", num(mean));
        if (!delay_axis) {
            out.line("visibility_estimated", num(extract_visibility(simulated)));
        }
    }
    return {std::move(table), std::move(out)};
}

}  // namespace

RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options) {
    if (auto diags = scenario.check(); !diags.empty()) {
        throw ConfigError(std::move(diags));
    }
    const std::vector<double> grid = scenario.grid.values();
    if (grid.empty()) {
        throw ConfigError({{"scan.stop", "grid is empty", 0}});
    }

    auto [table, summary] = scenario.axis == ScanAxis::tangential || scenario.axis == ScanAxis::radial
                                ? run_displacement(scenario, grid)
                                : run_fringes(scenario, grid);

    std::error_code ec;
    std::filesystem::create_directories(options.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + options.output_dir.string() + ": " + ec.message());
    }
    RunArtifacts out;
    out.csv = options.output_dir / (scenario.output + ".csv");
    out.summary = options.output_dir / (scenario.output + ".summary.txt");
    out.rows = grid.size();
    out.summary_text = summary.text();
    write_file(out.csv, table.text());
    write_file(out.summary, out.summary_text);
    return out;
}

}  // namespace mzduality
