#pragma once

// Test-only reference computations. None of these call into the library's
// quadrature, fitting or simulation code paths.

#include <cstdint>
#include <functional>

namespace oracle {

// Values computed once with 30-digit mpmath and frozen here.
inline constexpr double kRayleighRange = 0.02646344678031625;       // m, w0=82.5 um, 808 nm
inline constexpr double kRadiusAtReference = 0.002062323414004997;  // m, z = 661 mm
inline constexpr double kCoherenceLength = 8.312522621339773e-05;   // m, 808 nm / 2.5 nm
inline constexpr double kOnAxisShiftedIntensity = 1.8710941655794973;  // |1 + e^-1|^2
inline constexpr double kVisibilityAtW = 0.6065306597126334;         // e^-1/2
inline constexpr double kVisibilityAt3W = 0.011108996538242306;      // e^-4.5

/// Composite Simpson rule on a tensor grid with n (even) intervals per axis.
double simpson_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                  double y1, int n);

double simpson_1d(const std::function<double(double)>& f, double a, double b, int n);

/// Normalised cross-correlation of two shifted real Gaussian field profiles,
/// evaluated from its integral form by Simpson quadrature.
double cross_correlation_visibility(double delta_y, double w);

/// Standard error of a fitted sinusoid amplitude-to-offset ratio for
/// Poisson counts with total mean `total` spread over the grid.
double visibility_standard_error(double total_counts);

}  // namespace oracle
