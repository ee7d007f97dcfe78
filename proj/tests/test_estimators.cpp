#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "mzduality/estimators.hpp"

using namespace mzduality;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kW = 2.06e-3;

ScanResult phase_record(const std::vector<double>& values) {
    ScanResult scan;
    scan.axis_label = "phase_rad";
    scan.fringe_period = 2 * kPi;
    for (std::size_t i = 0; i < values.size(); ++i) {
        scan.points.push_back({2 * kPi * static_cast<double>(i) / static_cast<double>(values.size()), values[i]});
    }
    return scan;
}

std::vector<DataPoint> gaussian_points(double a, double sigma, double c, double noise, std::uint64_t seed,
                                       int n = 13, double span = 6e-3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> eps(0.0, noise);
    std::vector<DataPoint> pts;
    for (int i = 0; i < n; ++i) {
        const double d = -span + 2 * span * i / (n - 1);
        pts.push_back({d, gaussian_falloff(a, c, sigma, d) + (noise > 0 ? eps(rng) : 0.0)});
    }
    return pts;
}

}  // namespace

TEST_CASE("extract_visibility") {
    CHECK(extract_visibility(phase_record(std::vector<double>(20, 7.0))) == Approx(0.0).epsilon(1e-15));

    std::vector<double> full;
    for (int i = 0; i < 360; ++i) {
        full.push_back(1.0 + std::cos(2 * kPi * i / 360.0));
    }
    CHECK(extract_visibility(phase_record(full)) == Approx(1.0).epsilon(1e-12));

    std::vector<double> partial;
    for (int i = 0; i < 24; ++i) {
        partial.push_back(100.0 * (1.0 + 0.6065 * std::cos(2 * kPi * i / 24.0 + 0.3)));
    }
    CHECK(extract_visibility(phase_record(partial)) == Approx(0.6065).epsilon(1e-9));

    SUBCASE("scale invariance") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(10.0, 20.0);
        std::vector<double> noisy;
        for (int i = 0; i < 30; ++i) {
            noisy.push_back(u(rng));
        }
        const double v = extract_visibility(phase_record(noisy));
        for (double& x : noisy) {
            x *= 37.5;
        }
        CHECK(extract_visibility(phase_record(noisy)) == Approx(v).epsilon(1e-12));
    }
    SUBCASE("raw extrema without a fringe period") {
        ScanResult scan;
        scan.points = {{0, 3.0}, {1, 1.0}, {2, 2.0}};
        CHECK(extract_visibility(scan) == Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("undefined cases") {
        CHECK_THROWS_AS(extract_visibility(phase_record(std::vector<double>(10, 0.0))), EstimateError);
        CHECK_THROWS_AS(extract_visibility(ScanResult{}), EstimateError);
    }
}

TEST_CASE("percentile interval") {
    std::vector<double> s;
    for (int i = 0; i <= 100; ++i) {
        s.push_back(i);
    }
    const Interval ci = percentile_interval(s, 0.95);
    CHECK(ci.lower == Approx(2.5));
    CHECK(ci.upper == Approx(97.5));
}

TEST_CASE("Gaussian falloff fit recovers noiseless parameters") {
    const auto pts = gaussian_points(0.90, kW, 0.0, 0.0, 1);
    const FitReport r = fit_gaussian_falloff(pts);
    CHECK(r.amplitude == Approx(0.90).epsilon(1e-6));
    CHECK(r.half_width == Approx(kW).epsilon(1e-6));
    CHECK(std::abs(r.center) < 1e-6 * kW);
    CHECK(r.rss < 1e-20);

    SUBCASE("off-centre data") {
        const auto shifted = gaussian_points(0.93, 2.7e-3, 0.4e-3, 0.0, 1, 25, 8e-3);
        const FitReport s = fit_gaussian_falloff(shifted);
        CHECK(s.amplitude == Approx(0.93).epsilon(1e-6));
        CHECK(s.half_width == Approx(2.7e-3).epsilon(1e-6));
        CHECK(s.center == Approx(0.4e-3).epsilon(1e-6));
    }
    SUBCASE("the half-width is the 1/sqrt(e) point") {
        CHECK(gaussian_falloff(r.amplitude, r.center, r.half_width, r.center + r.half_width) ==
              Approx(r.amplitude / std::sqrt(std::exp(1.0))).epsilon(1e-15));
        CHECK(gaussian_falloff(r.amplitude, r.center, r.half_width, r.center - r.half_width) ==
              Approx(r.amplitude / std::sqrt(std::exp(1.0))).epsilon(1e-15));
    }
}

TEST_CASE("Gaussian falloff fit on noisy data") {
    const auto pts = gaussian_points(0.90, kW, 0.0, 0.05, 2016);
    const FitReport r = fit_gaussian_falloff(pts);
    CHECK(r.half_width > 1.9e-3);
    CHECK(r.half_width < 2.5e-3);
    CHECK(r.ci_half_width.contains(r.half_width));
    CHECK(r.ci_amplitude.contains(r.amplitude));
    CHECK(r.ci_center.contains(r.center));
    CHECK(r.ci_half_width.upper > r.ci_half_width.lower);
    CHECK(r.rss > 0.0);
}

TEST_CASE("bootstrap intervals shrink like 1/sqrt(n)") {
    // Mean interval width over an ensemble at n and 4n points; the ratio
    // should be close to 2.
    const auto mean_width = [](int n) {
        double total = 0.0;
        const int reps = 20;
        for (int s = 0; s < reps; ++s) {
            const auto pts = gaussian_points(0.90, kW, 0.0, 0.05, 100 + s, n);
            const FitReport r = fit_gaussian_falloff(pts);
            total += r.ci_half_width.upper - r.ci_half_width.lower;
        }
        return total / reps;
    };
    const double ratio = mean_width(13) / mean_width(52);
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.6);
}

TEST_CASE("degenerate fits are diagnosed") {
    std::vector<DataPoint> flat;
    for (int i = 0; i < 8; ++i) {
        flat.push_back({i * 1e-3, 0.4});
    }
    try {
        fit_gaussian_falloff(flat);
        FAIL("expected FitError");
    } catch (const FitError& e) {
        CHECK(e.last_iterate().amplitude == Approx(0.4));
    }
    const std::vector<DataPoint> few{{0, 1}, {1, 0.5}, {2, 0.1}};
    CHECK_THROWS_AS(fit_gaussian_falloff(few), FitError);
    const std::vector<DataPoint> same_x{{1, 1}, {1, 0.5}, {1, 0.1}, {1, 0.2}};
    CHECK_THROWS_AS(fit_gaussian_falloff(same_x), FitError);

    FitOptions starved;
    starved.max_iterations = 1;
    CHECK_THROWS_AS(fit_gaussian_falloff(gaussian_points(0.9, kW, 1e-3, 0.0, 1), starved), FitError);
}

TEST_CASE("distinguishability curve fit") {
    FitReport reference;
    reference.amplitude = 0.9;
    reference.half_width = kW;

    std::vector<DataPoint> pts;
    for (int i = 0; i <= 24; ++i) {
        const double d = -6e-3 + 0.5e-3 * i;
        pts.push_back({d, distinguishability_curve(0.3e-3, kW, d)});
    }
    const FitReport r = fit_distinguishability_curve(pts, reference);
    CHECK(r.center == Approx(0.3e-3).epsilon(1e-6));
    CHECK(r.rss < 1e-12);
    CHECK(r.half_width == kW);

    SUBCASE("a perturbed reference width fits worse") {
        FitReport wider = reference;
        wider.half_width *= 1.1;
        CHECK(fit_distinguishability_curve(pts, wider).rss > r.rss);
        CHECK(distinguishability_rss(pts, 0.3e-3, 1.1 * kW) > distinguishability_rss(pts, 0.3e-3, kW));
    }
    SUBCASE("noisy data through the origin") {
        std::mt19937_64 rng(8);
        std::normal_distribution<double> eps(0.0, 0.01);
        std::vector<DataPoint> noisy;
        for (int i = 0; i <= 24; ++i) {
            const double d = -6e-3 + 0.5e-3 * i;
            noisy.push_back({d, distinguishability_curve(0.0, kW, d) + eps(rng)});
        }
        const FitReport n = fit_distinguishability_curve(noisy, reference);
        CHECK(n.ci_center.contains(0.0));
        CHECK(n.ci_center.contains(n.center));
    }
    SUBCASE("invalid reference") {
        CHECK_THROWS_AS(fit_distinguishability_curve(pts, FitReport{}), FitError);
    }
}
