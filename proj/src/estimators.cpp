#include "mzduality/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "mzduality/random.hpp"

namespace mzduality {

namespace {

double raw_extrema_visibility(const ScanResult& scan) {
    const auto [lo, hi] = std::minmax_element(
        scan.points.begin(), scan.points.end(),
        [](const ScanPoint& a, const ScanPoint& b) { return a.value < b.value; });
    const double sum = hi->value + lo->value;
    if (!(sum > 0.0)) {
        throw EstimateError("visibility undefined: all counts are zero");
    }
    return (hi->value - lo->value) / sum;
}

struct GaussianParams {
    double amplitude;
    double center;
    double sigma;
};

double gaussian_rss(std::span<const DataPoint> points, const GaussianParams& p) {
    double rss = 0.0;
    for (const auto& pt : points) {
        const double r = pt.value - gaussian_falloff(p.amplitude, p.center, p.sigma, pt.displacement);
        rss += r * r;
    }
    return rss;
}

struct LmOutcome {
    GaussianParams params;
    double rss;
    int iterations;
    bool converged;
};

LmOutcome levenberg_marquardt(std::span<const DataPoint> points, GaussianParams p,
                              const FitOptions& options) {
    double rss = gaussian_rss(points, p);
    double damping = 1e-3;
    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (const auto& pt : points) {
            const double u = pt.displacement - p.center;
            const double g = std::exp(-u * u / (2.0 * p.sigma * p.sigma));
            const Eigen::Vector3d j(g, p.amplitude * g * u / (p.sigma * p.sigma),
                                    p.amplitude * g * u * u / (p.sigma * p.sigma * p.sigma));
            const double r = pt.value - p.amplitude * g;
            jtj += j * j.transpose();
            jtr += j * r;
        }

        // Raise the damping until a step lowers the residual, or give up once
        // no representable step does.
        for (;;) {
            Eigen::Matrix3d a = jtj;
            a.diagonal() *= 1.0 + damping;
            const Eigen::Vector3d step = a.ldlt().solve(jtr);
            const GaussianParams trial{p.amplitude + step[0], p.center + step[1],
                                       std::abs(p.sigma + step[2])};
            // Trust region: sigma may at most halve or double and the centre
            // move by one width per step. Unbounded steps from a wide start
            // jump into spikes that fit a single noisy point.
            const bool bounded = trial.sigma >= 0.5 * p.sigma && trial.sigma <= 2.0 * p.sigma &&
                                 std::abs(step[1]) <= p.sigma;
            const double trial_rss = step.allFinite() && trial.sigma > 0.0 && bounded
                                         ? gaussian_rss(points, trial)
                                         : std::numeric_limits<double>::infinity();
            if (trial_rss <= rss) {
                const double scale_c = std::max(std::abs(p.sigma), std::abs(p.center));
                const bool small = std::abs(step[0]) <= options.step_tolerance * std::max(1.0, std::abs(p.amplitude)) &&
                                   std::abs(step[1]) <= options.step_tolerance * scale_c &&
                                   std::abs(step[2]) <= options.step_tolerance * p.sigma;
                const bool stalled = rss - trial_rss <= 1e-15 * rss;
                p = trial;
                rss = trial_rss;
                damping = std::max(damping / 10.0, 1e-12);
                if (small || stalled || rss == 0.0) {
                    return {p, rss, it, true};
                }
                break;
            }
            damping *= 10.0;
            if (damping > 1e16) {
                return {p, rss, it, true};
            }
        }
    }
    return {p, rss, options.max_iterations, false};
}

FitReport report_from(const GaussianParams& p, double rss, int iterations) {
    FitReport r;
    r.amplitude = p.amplitude;
    r.center = p.center;
    r.half_width = p.sigma;
    r.rss = rss;
    r.iterations = iterations;
    r.ci_amplitude = {p.amplitude, p.amplitude};
    r.ci_center = {p.center, p.center};
    r.ci_half_width = {p.sigma, p.sigma};
    return r;
}

Interval widen_to(Interval i, double v) { return {std::min(i.lower, v), std::max(i.upper, v)}; }

double best_center(std::span<const DataPoint> points, double sigma, double lo, double hi) {
    // Coarse grid first; the residual in c can have shallow side minima when
    // data points sit on both branches of the cusp.
    constexpr int grid = 400;
    double best = lo;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double c = lo + (hi - lo) * i / grid;
        const double rss = distinguishability_rss(points, c, sigma);
        if (rss < best_rss) {
            best_rss = rss;
            best = c;
        }
    }
    const double cell = (hi - lo) / grid;
    const auto [c, rss] = boost::math::tools::brent_find_minima(
        [&](double c) { return distinguishability_rss(points, c, sigma); },
        std::max(lo, best - cell), std::min(hi, best + cell), std::numeric_limits<double>::digits / 2);
    return rss <= best_rss ? c : best;
}

}  // namespace

Interval percentile_interval(std::vector<double> samples, double level) {
    if (samples.empty()) {
        throw EstimateError("percentile interval of an empty sample");
    }
    std::sort(samples.begin(), samples.end());
    const double tail = 0.5 * (1.0 - level);
    const auto at = [&](double q) {
        const double pos = q * static_cast<double>(samples.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const std::size_t j = std::min(i + 1, samples.size() - 1);
        return samples[i] + (pos - static_cast<double>(i)) * (samples[j] - samples[i]);
    };
    return {at(tail), at(1.0 - tail)};
}

double extract_visibility(const ScanResult& scan) {
    if (scan.points.empty()) {
        throw EstimateError("visibility undefined: empty scan");
    }
    const bool all_zero = std::all_of(scan.points.begin(), scan.points.end(),
                                      [](const ScanPoint& p) { return p.value == 0.0; });
    if (all_zero) {
        throw EstimateError("visibility undefined: all counts are zero");
    }
    if (!scan.fringe_period || scan.points.size() < 3) {
        return raw_extrema_visibility(scan);
    }

    const double omega = 2.0 * std::numbers::pi / *scan.fringe_period;
    const auto n = static_cast<Eigen::Index>(scan.points.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd counts(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = scan.points[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(omega * p.abscissa);
        design(i, 2) = std::sin(omega * p.abscissa);
        counts[i] = p.value;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) {
        return raw_extrema_visibility(scan);
    }
    const Eigen::Vector3d coeff = qr.solve(counts);
    const double offset = coeff[0];
    if (!(offset > 0.0)) {
        throw EstimateError("visibility undefined: fitted mean count is not positive");
    }
    return std::min(1.0, std::hypot(coeff[1], coeff[2]) / offset);
}

double gaussian_falloff(double amplitude, double center, double half_width, double displacement) {
    const double u = (displacement - center) / half_width;
    return amplitude * std::exp(-0.5 * u * u);
}

FitReport fit_gaussian_falloff(std::span<const DataPoint> points, const FitOptions& options) {
    if (points.size() < 4) {
        throw FitError("Gaussian falloff fit needs at least 4 points", {});
    }
    const auto [dmin, dmax] = std::minmax_element(
        points.begin(), points.end(),
        [](const DataPoint& a, const DataPoint& b) { return a.displacement < b.displacement; });
    const double span = dmax->displacement - dmin->displacement;
    if (!(span > 0.0)) {
        throw FitError("Gaussian falloff fit needs distinct displacements", {});
    }

    // Start from the largest value; on ties the smallest displacement wins.
    const DataPoint* peak = &points.front();
    for (const auto& p : points) {
        if (p.value > peak->value ||
            (p.value == peak->value && p.displacement < peak->displacement)) {
            peak = &p;
        }
    }
    const GaussianParams start{peak->value, peak->displacement, 0.5 * span};

    const bool flat = std::all_of(points.begin(), points.end(),
                                  [&](const DataPoint& p) { return p.value == points.front().value; });
    if (flat) {
        throw FitError("constant data: half-width is unbounded", report_from(start, 0.0, 0));
    }

    const LmOutcome fit = levenberg_marquardt(points, start, options);
    FitReport report = report_from(fit.params, fit.rss, fit.iterations);
    if (!fit.converged) {
        throw FitError("Gaussian falloff fit did not converge in " +
                           std::to_string(options.max_iterations) + " iterations",
                       report);
    }
    if (fit.params.sigma > 1e3 * span) {
        throw FitError("half-width diverged: data carry no falloff", report);
    }

    if (options.bootstrap_resamples > 0 && fit.rss > 0.0) {
        const std::size_t n = points.size();
        // Residuals are inflated by sqrt(n / (n - p)) to undo the fit's shrinkage.
        const double inflate = n > 3 ? std::sqrt(static_cast<double>(n) / static_cast<double>(n - 3)) : 1.0;
        std::vector<double> fitted(n), residuals(n);
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] = gaussian_falloff(fit.params.amplitude, fit.params.center, fit.params.sigma,
                                         points[i].displacement);
            residuals[i] = inflate * (points[i].value - fitted[i]);
        }

        Engine rng = substream(options.seed, 0);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> amps, centers, widths;
        std::vector<DataPoint> resample(n);
        for (int b = 0; b < options.bootstrap_resamples; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                resample[i] = {points[i].displacement, fitted[i] + residuals[pick(rng)]};
            }
            const LmOutcome r = levenberg_marquardt(resample, fit.params, options);
            if (r.converged && r.params.sigma < 1e3 * span) {
                amps.push_back(r.params.amplitude);
                centers.push_back(r.params.center);
                widths.push_back(r.params.sigma);
            }
        }
        if (!widths.empty()) {
            report.ci_amplitude = widen_to(percentile_interval(amps), report.amplitude);
            report.ci_center = widen_to(percentile_interval(centers), report.center);
            report.ci_half_width = widen_to(percentile_interval(widths), report.half_width);
        }
    }
    return report;
}

double distinguishability_curve(double center, double sigma, double displacement) {
    const double u = (displacement - center) / sigma;
    return std::sqrt(-std::expm1(-u * u));
}

double distinguishability_rss(std::span<const DataPoint> points, double center, double sigma) {
    double rss = 0.0;
    for (const auto& p : points) {
        const double r = p.value - distinguishability_curve(center, sigma, p.displacement);
        rss += r * r;
    }
    return rss;
}

FitReport fit_distinguishability_curve(std::span<const DataPoint> points, const FitReport& reference,
                                       const FitOptions& options) {
    if (!(reference.half_width > 0.0) || !std::isfinite(reference.half_width)) {
        throw FitError("reference fit has no valid half-width", reference);
    }
    if (points.empty()) {
        throw FitError("distinguishability fit needs data", {});
    }
    const auto [dmin, dmax] = std::minmax_element(
        points.begin(), points.end(),
        [](const DataPoint& a, const DataPoint& b) { return a.displacement < b.displacement; });
    const double lo = dmin->displacement;
    const double hi = dmax->displacement;
    const double sigma = reference.half_width;

    FitReport report;
    report.amplitude = 1.0;
    report.half_width = sigma;
    report.center = hi > lo ? best_center(points, sigma, lo, hi) : lo;
    report.rss = distinguishability_rss(points, report.center, sigma);
    report.ci_amplitude = {1.0, 1.0};
    report.ci_half_width = reference.ci_half_width;
    report.ci_center = {report.center, report.center};

    if (options.bootstrap_resamples > 0 && report.rss > 0.0 && hi > lo) {
        const std::size_t n = points.size();
        std::vector<double> fitted(n), residuals(n);
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] = distinguishability_curve(report.center, sigma, points[i].displacement);
            residuals[i] = points[i].value - fitted[i];
        }
        Engine rng = substream(options.seed, 1);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::vector<double> centers;
        std::vector<DataPoint> resample(n);
        for (int b = 0; b < options.bootstrap_resamples; ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                resample[i] = {points[i].displacement, fitted[i] + residuals[pick(rng)]};
            }
            centers.push_back(best_center(resample, sigma, lo, hi));
        }
        report.ci_center = widen_to(percentile_interval(centers), report.center);
    }
    return report;
}

}  // namespace mzduality
