#include "mzduality/duality.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mzduality/random.hpp"

namespace mzduality {

namespace {

double displacement_sq(const DualityModel& m) {
    return m.delta.tangential * m.delta.tangential + m.delta.radial * m.delta.radial;
}

// Distinct from the phase-point streams, which use indices 0..n-1.
constexpr std::uint64_t kBootstrapStream = ~std::uint64_t{0};

}  // namespace

void DualityModel::validate() const {
    if (!(w > 0.0)) {
        throw std::invalid_argument("w must be > 0");
    }
    if (!(v_max >= 0.0 && v_max <= 1.0)) {
        throw std::invalid_argument("v_max must lie in [0, 1]");
    }
    if (!std::isfinite(delta.tangential) || !std::isfinite(delta.radial)) {
        throw std::invalid_argument("displacement must be finite");
    }
}

double model_visibility(const DualityModel& model) {
    model.validate();
    return model.v_max * std::exp(-displacement_sq(model) / (2.0 * model.w * model.w));
}

double model_distinguishability(const DualityModel& model) {
    model.validate();
    return std::sqrt(-std::expm1(-displacement_sq(model) / (model.w * model.w)));
}

void ClickStream::validate() const {
    const auto n = phase_grid.size();
    if (signal_counts.size() != n || coincidence_path1.size() != n ||
        coincidence_path2.size() != n) {
        throw std::invalid_argument("click stream arrays must share the phase grid length");
    }
}

ClickStream simulate_clicks(const DualityModel& model, const SpectralFilter& filter, double delay,
                            std::span<const double> phase_grid, const ClickOptions& options,
                            std::uint64_t seed) {
    if (options.pairs_per_phase == 0) {
        throw std::invalid_argument("pairs_per_phase must be > 0");
    }
    if (!(options.coincidence_fraction >= 0.0) || !(options.dark_counts >= 0.0)) {
        throw std::invalid_argument("coincidence fraction and dark counts must be >= 0");
    }
    const double v_eff = model_visibility(model) * coherence_envelope(filter, delay);
    const double d = model_distinguishability(model);
    const double n = static_cast<double>(options.pairs_per_phase);
    const double p1 = 0.5 * (1.0 + d);

    ClickStream out;
    out.seed = seed;
    out.phase_grid.assign(phase_grid.begin(), phase_grid.end());
    const std::size_t points = phase_grid.size();
    out.signal_counts.resize(points);
    out.coincidence_path1.resize(points);
    out.coincidence_path2.resize(points);

    for (std::size_t i = 0; i < points; ++i) {
        Engine rng = substream(seed, i);
        const double mean = 0.5 * n * (1.0 + v_eff * std::cos(phase_grid[i])) + options.dark_counts;
        out.signal_counts[i] = mean > 0.0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;

        const double mean_coinc = n * options.coincidence_fraction;
        const std::uint64_t total =
            mean_coinc > 0.0 ? std::poisson_distribution<std::uint64_t>(mean_coinc)(rng) : 0;
        const std::uint64_t path1 =
            total > 0 ? std::binomial_distribution<std::uint64_t>(total, p1)(rng) : 0;
        out.coincidence_path1[i] = path1;
        out.coincidence_path2[i] = total - path1;
    }
    return out;
}

Estimate estimate_distinguishability(const ClickStream& stream, int resamples) {
    stream.validate();
    const auto estimate = [&](auto&& index_of) {
        double r1 = 0.0;
        double r2 = 0.0;
        for (std::size_t k = 0; k < stream.phase_grid.size(); ++k) {
            const std::size_t i = index_of(k);
            r1 += static_cast<double>(stream.coincidence_path1[i]);
            r2 += static_cast<double>(stream.coincidence_path2[i]);
        }
        return r1 + r2 > 0.0 ? (r1 - r2) / (r1 + r2) : std::nan("");
    };

    const double value = estimate([](std::size_t k) { return k; });
    if (std::isnan(value)) {
        throw EstimateError("distinguishability undefined: no coincidences recorded");
    }
    if (resamples <= 0) {
        return {value, {value, value}};
    }

    Engine rng = substream(stream.seed, kBootstrapStream);
    std::uniform_int_distribution<std::size_t> pick(0, stream.phase_grid.size() - 1);
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        const double v = estimate([&](std::size_t) { return pick(rng); });
        if (!std::isnan(v)) {
            draws.push_back(v);
        }
    }
    Interval ci = draws.empty() ? Interval{value, value} : percentile_interval(draws);
    ci.lower = std::min(ci.lower, value);
    ci.upper = std::max(ci.upper, value);
    return {value, ci};
}

double estimate_visibility(const ClickStream& stream) {
    stream.validate();
    ScanResult scan;
    scan.axis_label = "phase_rad";
    scan.value_kind = ValueKind::counts;
    scan.fringe_period = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < stream.phase_grid.size(); ++i) {
        scan.points.push_back({stream.phase_grid[i], static_cast<double>(stream.signal_counts[i])});
    }
    return extract_visibility(scan);
}

DualityAudit duality_audit(double v, double d) {
    if (!(v >= 0.0 && v <= 1.0) || !(d >= 0.0 && d <= 1.0)) {
        throw std::invalid_argument("visibility and distinguishability must lie in [0, 1]");
    }
    const double value = d * d + v * v;
    return {value, value > 1.0};
}

}  // namespace mzduality
