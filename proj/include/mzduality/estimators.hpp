#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mzduality/interference.hpp"

namespace mzduality {

/// Raised when an observable has no defined value for the given data.
class EstimateError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const { return lower <= v && v <= upper; }
};

/// Result of a visibility or distinguishability curve fit. For a Gaussian
/// falloff A exp(-(d - c)^2 / (2 sigma^2)), `half_width` is sigma, the
/// displacement at which the curve is down to A / sqrt(e).
struct FitReport {
    double amplitude = 0.0;
    double half_width = 0.0;
    double center = 0.0;
    double rss = 0.0;
    Interval ci_amplitude;
    Interval ci_half_width;
    Interval ci_center;
    int iterations = 0;
};

/// Carries the last iterate of a fit that did not converge.
class FitError : public std::runtime_error {
  public:
    FitError(const std::string& what, FitReport last) : std::runtime_error(what), last_(last) {}

    const FitReport& last_iterate() const { return last_; }

  private:
    FitReport last_;
};

// Percentile interval of a bootstrap sample, e.g. level 0.95 for 2.5..97.5 %.
Interval percentile_interval(std::vector<double> samples, double level = 0.95);

struct DataPoint {
    double displacement;
    double value;
};

/*!
 * Fringe visibility (S_max - S_min) / (S_max + S_min).
 *
 * When the scan carries a fringe period, S is fitted by least squares to
 * offset + a cos(2 pi t / P) + b sin(2 pi t / P) and the extrema of the fit
 * are used, which removes the upward bias raw extrema pick up from counting
 * noise. Without a period the raw extrema are used.
 */
double extract_visibility(const ScanResult& scan);

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-12;
    int bootstrap_resamples = 400;
    std::uint64_t seed = 0x5eed;
};

double gaussian_falloff(double amplitude, double center, double half_width, double displacement);

// Levenberg-damped Gauss-Newton fit of A exp(-(d - c)^2 / (2 sigma^2)).
FitReport fit_gaussian_falloff(std::span<const DataPoint> points, const FitOptions& options = {});

// sqrt(1 - exp(-(d - c)^2 / sigma^2))
double distinguishability_curve(double center, double sigma, double displacement);

/// Fits the centre of the distinguishability curve with sigma taken from a
/// visibility fit.
FitReport fit_distinguishability_curve(std::span<const DataPoint> points, const FitReport& reference,
                                       const FitOptions& options = {});

// Residual sum of squares of the distinguishability curve against `points`.
double distinguishability_rss(std::span<const DataPoint> points, double center, double sigma);

}  // namespace mzduality
