#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "pointerlab/grid.hpp"
#include "pointerlab/wavefunction.hpp"

using namespace pointerlab;

namespace {

Grid default_grid() { return Grid(-12.0, 12.0, 4801); }

Wavefunction unit_gaussian(const Grid& g) {
    const double pref = std::pow(2.0 * std::numbers::pi, -0.25);
    return Wavefunction::sampled(
        g, [&](double x) { return pref * std::exp(-x * x / 4.0); });
}

}  // namespace

TEST_CASE("grid construction and validation") {
    const Grid g(-12.0, 12.0, 4801);
    CHECK(g.size() == 4801);
    CHECK(g.spacing() == doctest::Approx(0.005).epsilon(1e-14));
    CHECK(g.x(0) == -12.0);
    CHECK(g.x(4800) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(g.x(2400) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(make_grid(-1.0, 1.0, 3).size() == 3);

    CHECK_THROWS_AS(Grid(-1.0, 1.0, 4), std::invalid_argument);  // even
    CHECK_THROWS_AS(Grid(-1.0, 1.0, 1), std::invalid_argument);  // too few
    CHECK_THROWS_AS(Grid(1.0, -1.0, 5), std::invalid_argument);  // reversed
    CHECK_THROWS_AS(Grid(1.0, 1.0, 5), std::invalid_argument);   // empty
}

TEST_CASE("simpson integrates cubics exactly") {
    const Grid g(-1.0, 1.0, 11);
    std::vector<double> f(11);
    for (int i = 0; i < 11; ++i) {
        const double x = g.x(i);
        f[static_cast<std::size_t>(i)] = x * x * x + 2.0 * x * x + 1.0;
    }
    CHECK(std::abs(simpson(g, f) - 10.0 / 3.0) < 1e-14);
    // trapezoid is only second order on the same data
    CHECK(std::abs(trapezoid(g, f) - 10.0 / 3.0) > 1e-3);
}

TEST_CASE("simpson and trapezoid reject mismatched sample counts") {
    const Grid g(-1.0, 1.0, 5);
    std::vector<double> f(4, 1.0);
    CHECK_THROWS_AS(simpson(g, f), std::invalid_argument);
    CHECK_THROWS_AS(trapezoid(g, f), std::invalid_argument);
}

TEST_CASE("norm converges under grid refinement") {
    const Grid coarse(-12.0, 12.0, 301);
    const Grid fine(-12.0, 12.0, 601);
    const double n1 = norm_squared(unit_gaussian(coarse));
    const double n2 = norm_squared(unit_gaussian(fine));
    CHECK(std::abs(n1 - n2) < 1e-6);
    CHECK(std::abs(n2 - 1.0) < 1e-8);
}

TEST_CASE("inner product is conjugate symmetric bitwise") {
    const Grid g = default_grid();
    const auto a = Wavefunction::sampled(g, [](double x) {
        return std::exp(-x * x / 3.0) * complex(std::cos(2.0 * x), std::sin(2.0 * x));
    });
    const auto b = Wavefunction::sampled(g, [](double x) {
        return std::exp(-(x - 1.0) * (x - 1.0) / 5.0) *
               complex(std::cos(0.7 * x * x), std::sin(0.7 * x * x));
    });
    CHECK(inner_product(a, b) == std::conj(inner_product(b, a)));
}

TEST_CASE("characteristic function of the unit gaussian") {
    // <psi0 | e^{i k x} | psi0> = exp(-k^2 sigma^2 / 2) at k = 3, sigma = 1
    const Grid g = default_grid();
    const auto psi = unit_gaussian(g);
    const double got = std::abs(inner_product(psi, apply_linear_phase(psi, 3.0)));
    const double expected = 0.011108996538242306;  // e^{-9/2}
    CHECK(std::abs(got / expected - 1.0) < 1e-10);
}

TEST_CASE("apply_linear_phase preserves the norm") {
    const Grid g = default_grid();
    const auto psi = unit_gaussian(g);
    CHECK(std::abs(norm_squared(apply_linear_phase(psi, 17.3)) -
                   norm_squared(psi)) < 1e-14);
}

TEST_CASE("normalize produces a unit state and keeps phases") {
    const Grid g = default_grid();
    auto scaled = Wavefunction::sampled(g, [](double x) {
        return 3.7 * std::exp(-x * x / 4.0) * complex(0.0, 1.0);
    });
    const auto unit = normalize(scaled);
    CHECK(std::abs(norm(unit) - 1.0) < 1e-12);
    CHECK(unit.value(2400).real() == 0.0);  // pure phase survives
    CHECK(unit.value(2400).imag() > 0.0);

    auto zero = Wavefunction::sampled(g, [](double) { return 0.0; });
    CHECK_THROWS_AS(normalize(zero), std::invalid_argument);
}

TEST_CASE("wavefunction size must match the grid") {
    const Grid g(-1.0, 1.0, 5);
    CHECK_THROWS_AS(Wavefunction(g, std::vector<complex>(4)),
                    std::invalid_argument);
    const Grid g2(-1.0, 1.0, 7);
    const auto a = Wavefunction::sampled(g, [](double) { return 1.0; });
    const auto b = Wavefunction::sampled(g2, [](double) { return 1.0; });
    CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
    CHECK_THROWS_AS(abs_overlap(a, b), std::invalid_argument);
}

TEST_CASE("translate moves amplitudes node-exactly") {
    const Grid g = default_grid();
    const auto psi = unit_gaussian(g);
    const auto out = translate(psi, 2.0);  // 400 steps
    CHECK(out.value(2800) == psi.value(2400));
    CHECK(out.value(401) == psi.value(1));
    CHECK(out.value(0) == complex(0.0, 0.0));

    // overlap with the analytically shifted profile
    const double pref = std::pow(2.0 * std::numbers::pi, -0.25);
    const auto shifted = Wavefunction::sampled(g, [&](double x) {
        return pref * std::exp(-(x - 2.0) * (x - 2.0) / 4.0);
    });
    CHECK(std::abs(inner_product(out, shifted)) > 1.0 - 1e-6);

    CHECK_THROWS_AS(translate(psi, 0.0123), std::invalid_argument);
}

TEST_CASE("translate guards dropped mass") {
    const Grid g = default_grid();
    const double pref = std::pow(2.0 * std::numbers::pi, -0.25);
    const auto near_edge = Wavefunction::sampled(g, [&](double x) {
        return pref * std::exp(-(x - 10.0) * (x - 10.0) / 4.0);
    });
    CHECK_THROWS_AS(translate(near_edge, 3.0), WindowError);
    double lost = 0.0;
    const auto clipped =
        translate(near_edge, 3.0, TranslatePolicy::allow_loss, &lost);
    CHECK(lost > 1e-6);
    CHECK(std::abs(norm_squared(near_edge) - norm_squared(clipped) - lost) <
          1e-12);
}

TEST_CASE("box overlap is one half under half-edged sampling") {
    // Boxes of unit height on [-0.75, 0.25] and [-0.25, 0.75], sampled with
    // the midpoint value 1/2 at their edge nodes. The edges sit on
    // even-index nodes, which makes the composite Simpson sum of the product
    // close exactly: M = 1/2 to rounding.
    const Grid g(-1.0, 1.0, 641);
    auto box = [&](double lo, double hi) {
        return Wavefunction::sampled(g, [&](double x) {
            const double eps = 1e-12;
            if (std::abs(x - lo) < eps || std::abs(x - hi) < eps) return 0.5;
            return (x > lo && x < hi) ? 1.0 : 0.0;
        });
    };
    const auto a = box(-0.75, 0.25);
    const auto b = box(-0.25, 0.75);
    CHECK(std::abs(abs_overlap(a, b) - 0.5) < 1e-8);
}

TEST_CASE("boundary mass: flat density and gaussian tails") {
    const Grid g(-10.0, 10.0, 2001);
    const auto flat = Wavefunction::sampled(
        g, [](double) { return std::sqrt(1.0 / 20.0); });
    CHECK(std::abs(norm_squared(flat) - 1.0) < 1e-12);
    CHECK(std::abs(boundary_mass(flat, 0.1) - 0.2) < 1e-13);

    const double pref = std::pow(2.0 * std::numbers::pi, -0.25);
    const auto psi = Wavefunction::sampled(
        g, [&](double x) { return pref * std::exp(-x * x / 4.0); });
    const double tail = boundary_mass(psi, 0.1);  // mass beyond +/- 8
    CHECK(tail < 1e-12);
    CHECK(std::abs(tail / 1.2441921148543658e-15 - 1.0) < 0.01);

    CHECK_THROWS_AS(boundary_mass(psi, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(boundary_mass(psi, 0.5), std::invalid_argument);
}
