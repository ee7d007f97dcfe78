#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mzduality/beam.hpp"

namespace mzduality {

/// Interference filter in front of the detector fibre.
struct SpectralFilter {
    double center_wavelength;
    double fwhm_bandwidth;

    // Throws std::invalid_argument unless 0 < fwhm < center / 10.
    void validate() const;
};

/*!
 * The two Mach-Zehnder arms as seen behind the second beam splitter.
 *
 * `phase` is the arm phase applied to mode 2 as exp(-i phase); `delay` is
 * the path-length difference, which for a single frequency adds a phase of
 * 2 pi delay / lambda on top of it.
 */
struct ArmConfiguration {
    GaussianMode mode_1;
    GaussianMode mode_2;
    double phase = 0.0;
    double delay = 0.0;

    // Throws std::invalid_argument if the two modes differ in wavelength.
    void validate() const;

    ArmConfiguration with_phase(double phase_, double delay_ = 0.0) const;
};

enum class ValueKind { counts, rate, visibility, distinguishability };

struct ScanPoint {
    double abscissa;
    double value;
};

/// A 1-D sweep. Abscissae are strictly increasing, values finite.
struct ScanResult {
    std::string axis_label;
    std::vector<ScanPoint> points;
    ValueKind value_kind = ValueKind::counts;
    // Carrier period along the abscissa when the scan is a fringe record.
    std::optional<double> fringe_period;

    // Throws std::invalid_argument when the invariants above do not hold.
    void validate() const;
};

double superposed_intensity(const ArmConfiguration& config, double x, double y, double z);

/// Counting rate of the detector mode: integral of superposed_intensity over
/// the transverse plane at z. Throws QuadratureError on non-convergence.
double detector_rate(const ArmConfiguration& config, double z, double relative_tolerance = 1e-8);

// exp(-dy^2 / (2 w^2))
double visibility_analytic(double delta_y, double w);

/*!
 * Fringe visibility from four detector rates at relative phases 0, pi/2, pi,
 * 3 pi/2. This is (R_max - R_min) / (R_max + R_min) over all phases, which
 * for a real mode overlap is the same as using the rates at 0 and pi.
 */
double visibility_numeric(const ArmConfiguration& config, double z);

// lambda^2 / (pi * fwhm)
double coherence_length(const SpectralFilter& filter);

/// Longitudinal coherence envelope, exp(-ln2 (delay / l_c)^2); 1/2 at l_c.
double coherence_envelope(const SpectralFilter& filter, double delay);

// Transverse visibility times the coherence envelope at `delay`.
double fringe_visibility_at(const ArmConfiguration& config, const SpectralFilter& filter,
                            double delay);

/*!
 * Detector counts versus path delay:
 *   S = mean_rate (1 + V_t gamma(delay) cos(2 pi delay / lambda + phase))
 * with V_t the transverse visibility of the two modes (independent of z
 * for freely propagating modes) and gamma the coherence envelope. A
 * `visibility_ceiling` below 1 scales V_t for interferometer imperfections.
 */
ScanResult fringe_scan(const ArmConfiguration& config, const SpectralFilter& filter,
                       std::span<const double> delays, double mean_rate,
                       double visibility_ceiling = 1.0);

// Same fringe model at fixed config.delay, swept over the arm phase.
ScanResult phase_scan(const ArmConfiguration& config, const SpectralFilter& filter,
                      std::span<const double> phases, double mean_rate,
                      double visibility_ceiling = 1.0);

// Transverse visibility of the arm pair, evaluated at the waist plane of mode 1.
double transverse_visibility(const ArmConfiguration& config);

}  // namespace mzduality
