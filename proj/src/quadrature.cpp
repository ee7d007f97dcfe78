#include "mzduality/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace mzduality {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

}  // namespace

QuadratureResult integrate_2d(const std::function<double(double, double)>& f, const Box& box,
                              double relative_tolerance, unsigned max_depth) {
    const auto slice = [&](double y) { return [&f, y](double x) { return f(x, y); }; };

    // Slices far out in the tails are tiny; asking them for relative accuracy
    // only burns evaluations. Each slice gets an absolute budget scaled to the
    // largest slice seen on a coarse probe instead.
    double scale = 0.0;
    constexpr int probes = 17;
    for (int i = 0; i < probes; ++i) {
        const double y = box.y_min + (box.y_max - box.y_min) * i / (probes - 1);
        double error = 0.0;
        double l1 = 0.0;
        Rule::integrate(slice(y), box.x_min, box.x_max, 0, 0.0, &error, &l1);
        scale = std::max(scale, l1);
    }
    // The error estimate combines outer and worst inner errors and is
    // conservative; when it lands just above the target, both budgets are
    // tightened before giving up.
    double achieved = 0.0;
    double value = 0.0;
    for (const double tighten : {1.0, 0.1, 0.01}) {
        const double slice_budget = 0.01 * tighten * relative_tolerance * scale;
        const double floor_tol = 0.01 * tighten * relative_tolerance;

        double worst_slice_error = 0.0;
        auto inner = [&](double y) {
            double error = 0.0;
            double l1 = 0.0;
            const double coarse = Rule::integrate(slice(y), box.x_min, box.x_max, 0, 0.0, &error, &l1);
            if (error <= slice_budget) {
                worst_slice_error = std::max(worst_slice_error, error);
                return coarse;
            }
            const double tol = std::clamp(slice_budget / l1, floor_tol, 0.1);
            const double v = Rule::integrate(slice(y), box.x_min, box.x_max, max_depth, tol, &error, &l1);
            worst_slice_error = std::max(worst_slice_error, error);
            return v;
        };

        double error = 0.0;
        double l1 = 0.0;
        value = Rule::integrate(inner, box.y_min, box.y_max, max_depth, tighten * relative_tolerance, &error,
                                &l1);
        achieved = l1 > 0.0 ? (error + worst_slice_error * (box.y_max - box.y_min)) / l1 : 0.0;
        if (std::isfinite(value) && achieved <= relative_tolerance) {
            return {value, achieved};
        }
    }
    throw QuadratureError(fmt::format("2-D quadrature did not reach relative tolerance {:g} "
                                      "(achieved {:g})",
                                      relative_tolerance, achieved),
                          achieved);
}

}  // namespace mzduality
