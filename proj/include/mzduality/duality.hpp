#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mzduality/beam.hpp"
#include "mzduality/estimators.hpp"
#include "mzduality/interference.hpp"

namespace mzduality {

/*!
 * Reduced description of the complementarity experiment at the reference
 * plane: mode radius `w`, the visibility ceiling of the real interferometer,
 * and the transverse displacement of the signal-2 mode. Tangential and
 * radial displacements add in quadrature.
 */
struct DualityModel {
    double w;
    double v_max;
    Transverse delta;

    // Throws std::invalid_argument unless w > 0 and 0 <= v_max <= 1.
    void validate() const;
};

// v_max * exp(-|delta|^2 / (2 w^2))
double model_visibility(const DualityModel& model);

/// sqrt(1 - exp(-|delta|^2 / w^2)): the which-path knowledge of two pure
/// Gaussian modes. The ceiling v_max is not applied here, so
/// D^2 + V^2 = 1 - (1 - v_max^2) exp(-|delta|^2 / w^2).
double model_distinguishability(const DualityModel& model);

/// Simulated detector record for one displacement.
struct ClickStream {
    std::vector<double> phase_grid;
    std::vector<std::uint64_t> signal_counts;
    std::vector<std::uint64_t> coincidence_path1;
    std::vector<std::uint64_t> coincidence_path2;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument when the arrays differ in length.
    void validate() const;
};

struct ClickOptions {
    std::uint64_t pairs_per_phase = 100000;
    // Expected idler coincidences per generated pair.
    double coincidence_fraction = 1.0;
    // Expected uncorrelated detector clicks added per phase point.
    double dark_counts = 0.0;
};

/*!
 * Per phase point i, with its own generator substream(seed, i):
 *   signal      ~ Poisson(n/2 (1 + V_eff cos phi) + dark)
 *   coincidence ~ Poisson(n * coincidence_fraction), split binomially into
 *                 path 1 / path 2 with p1 = (1 + D) / 2
 * where V_eff = model_visibility * coherence_envelope(delay) and D =
 * model_distinguishability. The result depends only on the inputs.
 */
ClickStream simulate_clicks(const DualityModel& model, const SpectralFilter& filter, double delay,
                            std::span<const double> phase_grid, const ClickOptions& options,
                            std::uint64_t seed);

struct Estimate {
    double value;
    Interval ci95;
};

/// (sum R1 - sum R2) / (sum R1 + sum R2) with a percentile bootstrap over
/// phase points. Throws EstimateError when no coincidences were recorded.
Estimate estimate_distinguishability(const ClickStream& stream, int resamples = 1000);

// Sinusoid-fit visibility of the signal counts over the phase grid.
double estimate_visibility(const ClickStream& stream);

struct DualityAudit {
    double value;  // d^2 + v^2
    bool violates_bound;
};

DualityAudit duality_audit(double v, double d);

}  // namespace mzduality
