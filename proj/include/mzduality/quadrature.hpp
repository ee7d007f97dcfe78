#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace mzduality {

/// Raised when adaptive quadrature stops short of the requested tolerance.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double achieved_tolerance)
        : std::runtime_error(what), achieved_(achieved_tolerance) {}

    double achieved_tolerance() const { return achieved_; }

  private:
    double achieved_;
};

struct Box {
    double x_min, x_max;
    double y_min, y_max;
};

struct QuadratureResult {
    double value = 0.0;
    double relative_error = 0.0;  // estimated, relative to the integral of |f|
};

/*!
 * Adaptive 2-D integral of f(x, y) over an axis-aligned box, by nested
 * adaptive Gauss-Kronrod rules. Throws QuadratureError when the estimated
 * relative error exceeds `relative_tolerance` after `max_depth` bisections.
 */
QuadratureResult integrate_2d(const std::function<double(double, double)>& f, const Box& box,
                              double relative_tolerance = 1e-8, unsigned max_depth = 20);

}  // namespace mzduality
