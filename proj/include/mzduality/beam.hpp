#pragma once

#include <complex>

namespace mzduality {

using ComplexAmplitude = std::complex<double>;

/// Transverse pair in the reference frame of the SPDC cone. The tangential
/// component runs along the ring (y), the radial one across it (x).
struct Transverse {
    double tangential = 0.0;
    double radial = 0.0;
};

/// Largest tilt magnitude (radians) accepted by the paraxial model.
inline constexpr double kMaxParaxialTilt = 0.1;

/*!
 * Fundamental Gaussian (TEM00) mode.
 *
 * The field is normalised so that the on-axis amplitude at the waist is 1.
 * `offset` is the transverse centre in the waist plane; a tilt moves the
 * centre linearly with propagation distance, so the centre at axial position
 * z is offset + tilt * (z - waist_z).
 */
class GaussianMode {
  public:
    // Throws std::invalid_argument on a non-positive radius/wavelength or a
    // non-paraxial tilt.
    GaussianMode(double waist_radius, double wavelength, double waist_z = 0.0,
                 Transverse tilt = {}, Transverse offset = {});

    double waist_radius() const { return waist_radius_; }
    double wavelength() const { return wavelength_; }
    double waist_z() const { return waist_z_; }
    Transverse tilt() const { return tilt_; }
    Transverse offset() const { return offset_; }

    double wavenumber() const;

    // Transverse centre of the mode at axial position z.
    Transverse center_at(double z) const;

    GaussianMode with_offset(Transverse offset) const;
    GaussianMode with_tilt(Transverse tilt) const;

  private:
    double waist_radius_;
    double wavelength_;
    double waist_z_;
    Transverse tilt_;
    Transverse offset_;
};

// pi * w0^2 / lambda
double rayleigh_range(const GaussianMode& mode);

/// Field (1/e) radius after propagating a distance z from a waist of radius
/// `waist_radius`: w0 * sqrt(1 + (z lambda / (w0^2 pi))^2).
double propagated_radius(double waist_radius, double z, double wavelength);

// Radius of `mode` at axial position z (measured from the crystal plane).
double radius_at(const GaussianMode& mode, double z);

/*!
 * Complex amplitude of the mode at (x, y, z), where x is radial and y
 * tangential.
 *
 * With zeta = z - waist_z and q = 1 - i zeta lambda / (w0^2 pi):
 *
 *   U = exp(-(x'^2 + y'^2) / (w0^2 q)) / q
 *       * exp(-i k (tilt . r)) * exp(i k |tilt|^2 zeta / 2)
 *
 * with (x', y') measured from center_at(z). The last factor is the uniform
 * phase that makes a tilted beam an exact paraxial solution; it has unit
 * modulus.
 */
ComplexAmplitude mode_amplitude(const GaussianMode& mode, double x, double y, double z);

}  // namespace mzduality
