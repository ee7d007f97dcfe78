#include "mzduality/beam.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mzduality {

namespace {

void require_paraxial(Transverse tilt) {
    if (!(std::abs(tilt.tangential) < kMaxParaxialTilt) ||
        !(std::abs(tilt.radial) < kMaxParaxialTilt)) {
        throw std::invalid_argument("tilt components must satisfy |tilt| < " +
                                    std::to_string(kMaxParaxialTilt) + " rad (paraxial)");
    }
}

}  // namespace

GaussianMode::GaussianMode(double waist_radius, double wavelength, double waist_z,
                           Transverse tilt, Transverse offset)
    : waist_radius_(waist_radius),
      wavelength_(wavelength),
      waist_z_(waist_z),
      tilt_(tilt),
      offset_(offset) {
    if (!(waist_radius > 0.0) || !std::isfinite(waist_radius)) {
        throw std::invalid_argument("waist_radius must be > 0");
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw std::invalid_argument("wavelength must be > 0");
    }
    if (!std::isfinite(waist_z) || !std::isfinite(offset.tangential) ||
        !std::isfinite(offset.radial)) {
        throw std::invalid_argument("mode position must be finite");
    }
    require_paraxial(tilt);
}

double GaussianMode::wavenumber() const { return 2.0 * std::numbers::pi / wavelength_; }

Transverse GaussianMode::center_at(double z) const {
    const double zeta = z - waist_z_;
    return {offset_.tangential + tilt_.tangential * zeta, offset_.radial + tilt_.radial * zeta};
}

GaussianMode GaussianMode::with_offset(Transverse offset) const {
    return GaussianMode(waist_radius_, wavelength_, waist_z_, tilt_, offset);
}

GaussianMode GaussianMode::with_tilt(Transverse tilt) const {
    return GaussianMode(waist_radius_, wavelength_, waist_z_, tilt, offset_);
}

double rayleigh_range(const GaussianMode& mode) {
    return std::numbers::pi * mode.waist_radius() * mode.waist_radius() / mode.wavelength();
}

double propagated_radius(double waist_radius, double z, double wavelength) {
    const double ratio = z * wavelength / (waist_radius * waist_radius * std::numbers::pi);
    return waist_radius * std::sqrt(1.0 + ratio * ratio);
}

double radius_at(const GaussianMode& mode, double z) {
    return propagated_radius(mode.waist_radius(), z - mode.waist_z(), mode.wavelength());
}

ComplexAmplitude mode_amplitude(const GaussianMode& mode, double x, double y, double z) {
    using namespace std::complex_literals;
    const double zeta = z - mode.waist_z();
    const double w0 = mode.waist_radius();
    const ComplexAmplitude q = 1.0 - 1i * (zeta / rayleigh_range(mode));

    const Transverse c = mode.center_at(z);
    const double dx = x - c.radial;
    const double dy = y - c.tangential;
    const ComplexAmplitude envelope = std::exp(-(dx * dx + dy * dy) / (w0 * w0 * q)) / q;

    const Transverse t = mode.tilt();
    if (t.tangential == 0.0 && t.radial == 0.0) {
        return envelope;
    }
    const double k = mode.wavenumber();
    const double tilt_sq = t.tangential * t.tangential + t.radial * t.radial;
    const double phase = -k * (t.radial * x + t.tangential * y) + 0.5 * k * tilt_sq * zeta;
    return envelope * std::polar(1.0, phase);
}

}  // namespace mzduality
