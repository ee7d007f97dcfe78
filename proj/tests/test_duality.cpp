#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "mzduality/duality.hpp"
#include "oracles.hpp"

using namespace mzduality;
using doctest::Approx;

namespace {

constexpr double kW = 2.06e-3;
const SpectralFilter kFilter{808e-9, 2.5e-9};

std::vector<double> phases(int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(2 * std::numbers::pi * i / n);
    }
    return out;
}

DualityModel tangential(double dy, double v_max = 0.9, double w = kW) { return {w, v_max, {dy, 0.0}}; }

}  // namespace

TEST_CASE("model visibility") {
    CHECK(model_visibility(tangential(0.0)) == Approx(0.90).epsilon(1e-15));
    CHECK(model_visibility(tangential(kW, 1.0)) == Approx(oracle::kVisibilityAtW).epsilon(1e-15));
    CHECK(model_visibility(tangential(2.2e-3)) == Approx(0.5088352235466196).epsilon(1e-12));
    CHECK(model_visibility({kW, 1.0, {0.6 * kW, 0.8 * kW}}) == Approx(oracle::kVisibilityAtW).epsilon(1e-15));
    CHECK_THROWS(model_visibility(tangential(0.0, 1.2)));
    CHECK_THROWS(model_visibility(tangential(0.0, 0.9, 0.0)));
}

TEST_CASE("model distinguishability") {
    CHECK(model_distinguishability(tangential(0.0)) == 0.0);
    CHECK(model_distinguishability(tangential(20 * kW)) == Approx(1.0).epsilon(1e-15));

    // Half overlap: D^2 + V^2 = 1 - (1 - 0.81) / 2.
    const double half = kW * std::sqrt(std::numbers::ln2);
    const auto m = tangential(half);
    CHECK(duality_audit(model_visibility(m), model_distinguishability(m)).value == Approx(0.905).epsilon(1e-12));
}

TEST_CASE("complementarity bound holds for the model") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> delta(-5 * kW, 5 * kW), vmax(0.0, 1.0);
    double prev_d = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double dy = 5 * kW * i / 400.0;
        const double d = model_distinguishability(tangential(dy));
        if (i > 0) {
            CHECK(d > prev_d);
        }
        prev_d = d;
    }
    for (int i = 0; i < 2000; ++i) {
        const DualityModel m{kW, vmax(rng), {delta(rng), delta(rng)}};
        const double v = model_visibility(m);
        const double d = model_distinguishability(m);
        const double sum = d * d + v * v;
        CHECK(sum <= 1.0 + 1e-15);
        CHECK(sum >= m.v_max * m.v_max - 1e-15);
        const double expected = 1.0 - (1.0 - m.v_max * m.v_max) *
                                          std::exp(-(m.delta.tangential * m.delta.tangential +
                                                     m.delta.radial * m.delta.radial) / (kW * kW));
        CHECK(sum == Approx(expected).epsilon(1e-12));
        const DualityModel pure{kW, 1.0, m.delta};
        CHECK(duality_audit(model_visibility(pure), model_distinguishability(pure)).value ==
              Approx(1.0).epsilon(1e-12));
    }
    CHECK(duality_audit(model_visibility(tangential(0.0)), 0.0).value == Approx(0.81).epsilon(1e-15));
}

TEST_CASE("duality audit") {
    CHECK(duality_audit(1.0, 0.0).value == 1.0);
    CHECK_FALSE(duality_audit(1.0, 0.0).violates_bound);
    CHECK(duality_audit(0.9, 0.0).value == Approx(0.81).epsilon(1e-15));
    CHECK(duality_audit(0.508, 0.76).value == Approx(0.835664).epsilon(1e-12));
    CHECK(duality_audit(0.9, 0.9).violates_bound);
    CHECK_THROWS(duality_audit(1.1, 0.0));
    CHECK_THROWS(duality_audit(0.5, -0.1));
}

TEST_CASE("click simulation is reproducible and order independent") {
    const auto grid = phases(20);
    const ClickOptions opts{20000, 1.0, 0.0};
    const auto a = simulate_clicks(tangential(kW), kFilter, 0.0, grid, opts, 99);
    const auto b = simulate_clicks(tangential(kW), kFilter, 0.0, grid, opts, 99);
    CHECK(a.signal_counts == b.signal_counts);
    CHECK(a.coincidence_path1 == b.coincidence_path1);
    CHECK(a.coincidence_path2 == b.coincidence_path2);

    // Each phase point has its own stream: truncating the grid does not
    // change the points that remain.
    const std::vector<double> head(grid.begin(), grid.begin() + 7);
    const auto c = simulate_clicks(tangential(kW), kFilter, 0.0, head, opts, 99);
    for (std::size_t i = 0; i < head.size(); ++i) {
        CHECK(c.signal_counts[i] == a.signal_counts[i]);
        CHECK(c.coincidence_path1[i] == a.coincidence_path1[i]);
    }

    SUBCASE("different seeds agree within five standard errors") {
        const auto d = simulate_clicks(tangential(kW), kFilter, 0.0, grid, opts, 100);
        const double total = 0.5 * 20000.0 * 20;
        const double se = oracle::visibility_standard_error(total);
        CHECK(std::abs(estimate_visibility(a) - estimate_visibility(d)) < 5 * std::sqrt(2.0) * se);
        const double coinc = 20000.0 * 20;
        const double d_se = 1.0 / std::sqrt(coinc);
        CHECK(std::abs(estimate_distinguishability(a, 0).value - estimate_distinguishability(d, 0).value) <
              5 * std::sqrt(2.0) * d_se);
    }
}

TEST_CASE("click simulation limits") {
    const auto grid = phases(20);
    SUBCASE("indistinguishable modes split coincidences evenly") {
        const auto s = simulate_clicks(tangential(0.0), kFilter, 0.0, grid, {200000, 1.0, 0.0}, 1);
        CHECK(std::abs(estimate_distinguishability(s, 0).value) < 5.0 / std::sqrt(200000.0 * 20));
    }
    SUBCASE("no coherence gives flat fringes") {
        const auto s = simulate_clicks(tangential(0.0, 0.0), kFilter, 0.0, grid, {100000, 1.0, 0.0}, 2);
        CHECK(estimate_visibility(s) < 5 * oracle::visibility_standard_error(0.5 * 100000.0 * 20));
    }
    SUBCASE("outside the coherence length the fringes vanish") {
        const auto s = simulate_clicks(tangential(0.0), kFilter, 20 * coherence_length(kFilter), grid,
                                       {100000, 1.0, 0.0}, 3);
        CHECK(estimate_visibility(s) < 5 * oracle::visibility_standard_error(0.5 * 100000.0 * 20));
    }
    SUBCASE("visibility ceiling recovered at measurement statistics") {
        const auto s = simulate_clicks(tangential(0.0), kFilter, 0.0, grid, {100000, 1.0, 0.0}, 4);
        CHECK(std::abs(estimate_visibility(s) - 0.90) < 0.02);
    }
    SUBCASE("dark counts dilute the visibility") {
        const double n = 100000.0;
        const auto s = simulate_clicks(tangential(0.0), kFilter, 0.0, grid, {100000, 1.0, n / 2}, 5);
        CHECK(estimate_visibility(s) == Approx(0.45).epsilon(0.02));
    }
    CHECK_THROWS(simulate_clicks(tangential(0.0), kFilter, 0.0, grid, {0, 1.0, 0.0}, 1));
}

TEST_CASE("distinguishability estimator") {
    ClickStream s;
    s.phase_grid = {0.0, 1.0};
    s.signal_counts = {0, 0};
    s.coincidence_path1 = {50, 50};
    s.coincidence_path2 = {50, 50};
    CHECK(estimate_distinguishability(s).value == 0.0);

    s.coincidence_path2 = {0, 0};
    CHECK(estimate_distinguishability(s).value == 1.0);

    s.coincidence_path1 = {100, 200};
    s.coincidence_path2 = {60, 40};
    const Estimate e = estimate_distinguishability(s);
    CHECK(e.value == Approx(0.5).epsilon(1e-15));
    CHECK(e.ci95.contains(0.5));

    s.coincidence_path1 = {0, 0};
    s.coincidence_path2 = {0, 0};
    CHECK_THROWS_AS(estimate_distinguishability(s), EstimateError);

    s.coincidence_path2 = {0};
    CHECK_THROWS_AS(estimate_distinguishability(s), std::invalid_argument);
}

TEST_CASE("estimated duality stays under the bound") {
    const auto grid = phases(20);
    for (int i = 0; i <= 16; ++i) {
        const auto m = tangential(2 * kW * i / 16.0);
        const auto s = simulate_clicks(m, kFilter, 0.0, grid, {10000, 1.0, 0.0}, 1000 + i);
        const double v = estimate_visibility(s);
        const double d = std::min(1.0, std::abs(estimate_distinguishability(s, 0).value));
        CHECK(duality_audit(v, d).value <= 1.02);
    }
}
