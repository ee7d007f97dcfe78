#include "mzduality/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mzduality/quadrature.hpp"

namespace mzduality {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gaussian tails beyond six field radii carry less than exp(-72) of the power.
constexpr double kTruncationRadii = 6.0;

double total_phase(const ArmConfiguration& config) {
    return config.phase + kTwoPi * config.delay / config.mode_1.wavelength();
}

Box integration_box(const ArmConfiguration& config, double z) {
    const Transverse c1 = config.mode_1.center_at(z);
    const Transverse c2 = config.mode_2.center_at(z);
    const double h1 = kTruncationRadii * radius_at(config.mode_1, z);
    const double h2 = kTruncationRadii * radius_at(config.mode_2, z);
    return {std::min(c1.radial - h1, c2.radial - h2), std::max(c1.radial + h1, c2.radial + h2),
            std::min(c1.tangential - h1, c2.tangential - h2),
            std::max(c1.tangential + h1, c2.tangential + h2)};
}

ScanResult fringe_record(std::string label, double period) {
    ScanResult scan;
    scan.axis_label = std::move(label);
    scan.value_kind = ValueKind::counts;
    scan.fringe_period = period;
    return scan;
}

void check_scan_inputs(double mean_rate, double ceiling) {
    if (!(mean_rate > 0.0)) {
        throw std::invalid_argument("mean_rate must be > 0");
    }
    if (!(ceiling >= 0.0 && ceiling <= 1.0)) {
        throw std::invalid_argument("visibility ceiling must lie in [0, 1]");
    }
}

}  // namespace

void SpectralFilter::validate() const {
    if (!(center_wavelength > 0.0)) {
        throw std::invalid_argument("filter center wavelength must be > 0");
    }
    if (!(fwhm_bandwidth > 0.0) || !(fwhm_bandwidth < center_wavelength / 10.0)) {
        throw std::invalid_argument("filter bandwidth must lie in (0, center/10)");
    }
}

void ArmConfiguration::validate() const {
    if (mode_1.wavelength() != mode_2.wavelength()) {
        throw std::invalid_argument("both arm modes must share one wavelength");
    }
    if (!std::isfinite(phase) || !std::isfinite(delay)) {
        throw std::invalid_argument("arm phase and delay must be finite");
    }
}

ArmConfiguration ArmConfiguration::with_phase(double phase_, double delay_) const {
    ArmConfiguration copy = *this;
    copy.phase = phase_;
    copy.delay = delay_;
    return copy;
}

void ScanResult::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].value) || !std::isfinite(points[i].abscissa)) {
            throw std::invalid_argument("scan values must be finite");
        }
        if (i > 0 && !(points[i].abscissa > points[i - 1].abscissa)) {
            throw std::invalid_argument("scan abscissae must be strictly increasing");
        }
    }
}

double superposed_intensity(const ArmConfiguration& config, double x, double y, double z) {
    const ComplexAmplitude u1 = mode_amplitude(config.mode_1, x, y, z);
    const ComplexAmplitude u2 = mode_amplitude(config.mode_2, x, y, z);
    return std::norm(u1 + u2 * std::polar(1.0, -total_phase(config)));
}

double detector_rate(const ArmConfiguration& config, double z, double relative_tolerance) {
    config.validate();
    const auto integrand = [&](double x, double y) { return superposed_intensity(config, x, y, z); };
    return integrate_2d(integrand, integration_box(config, z), relative_tolerance).value;
}

double visibility_analytic(double delta_y, double w) {
    if (!(w > 0.0)) {
        throw std::invalid_argument("beam radius must be > 0");
    }
    return std::exp(-delta_y * delta_y / (2.0 * w * w));
}

double visibility_numeric(const ArmConfiguration& config, double z) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    double rates[4];
    for (int i = 0; i < 4; ++i) {
        rates[i] = detector_rate(config.with_phase(i * half_pi), z);
    }
    // R(phi) = N + 2 Re(O exp(-i phi)); the four samples give N and |O|.
    const double sum = 0.5 * (rates[0] + rates[2]);
    const double re = 0.25 * (rates[0] - rates[2]);
    const double im = 0.25 * (rates[1] - rates[3]);
    if (!(sum > 0.0)) {
        throw std::domain_error("visibility undefined: zero detector rate");
    }
    return std::clamp(2.0 * std::hypot(re, im) / sum, 0.0, 1.0);
}

double coherence_length(const SpectralFilter& filter) {
    filter.validate();
    const double lambda = filter.center_wavelength;
    return lambda * lambda / (std::numbers::pi * filter.fwhm_bandwidth);
}

double coherence_envelope(const SpectralFilter& filter, double delay) {
    const double r = delay / coherence_length(filter);
    return std::exp(-std::numbers::ln2 * r * r);
}

double transverse_visibility(const ArmConfiguration& config) {
    return visibility_numeric(config.with_phase(0.0), config.mode_1.waist_z());
}

double fringe_visibility_at(const ArmConfiguration& config, const SpectralFilter& filter,
                            double delay) {
    return transverse_visibility(config) * coherence_envelope(filter, delay);
}

ScanResult fringe_scan(const ArmConfiguration& config, const SpectralFilter& filter,
                       std::span<const double> delays, double mean_rate,
                       double visibility_ceiling) {
    check_scan_inputs(mean_rate, visibility_ceiling);
    config.validate();
    const double lambda = config.mode_1.wavelength();
    const double v_t = visibility_ceiling * transverse_visibility(config);

    ScanResult scan = fringe_record("delay_m", lambda);
    scan.points.reserve(delays.size());
    for (const double d : delays) {
        const double local = v_t * coherence_envelope(filter, d);
        scan.points.push_back({d, mean_rate * (1.0 + local * std::cos(kTwoPi * d / lambda + config.phase))});
    }
    scan.validate();
    return scan;
}

ScanResult phase_scan(const ArmConfiguration& config, const SpectralFilter& filter,
                      std::span<const double> phases, double mean_rate,
                      double visibility_ceiling) {
    check_scan_inputs(mean_rate, visibility_ceiling);
    config.validate();
    const double local = visibility_ceiling * transverse_visibility(config) *
                         coherence_envelope(filter, config.delay);
    const double carrier = kTwoPi * config.delay / config.mode_1.wavelength();

    ScanResult scan = fringe_record("phase_rad", kTwoPi);
    scan.points.reserve(phases.size());
    for (const double phi : phases) {
        scan.points.push_back({phi, mean_rate * (1.0 + local * std::cos(carrier + phi))});
    }
    scan.validate();
    return scan;
}

}  // namespace mzduality
