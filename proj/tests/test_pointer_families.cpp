#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "pointerlab/grid.hpp"
#include "pointerlab/pointer_families.hpp"
#include "pointerlab/wavefunction.hpp"

using namespace pointerlab;

namespace {

Grid default_grid() { return Grid(-12.0, 12.0, 4801); }

double modulus_std(const Wavefunction& psi) {
    const Grid& g = psi.grid();
    std::vector<double> rho(static_cast<std::size_t>(g.size()));
    std::vector<double> xr(static_cast<std::size_t>(g.size()));
    std::vector<double> xxr(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i) {
        const double r = std::norm(psi.value(i));
        rho[static_cast<std::size_t>(i)] = r;
        xr[static_cast<std::size_t>(i)] = g.x(i) * r;
        xxr[static_cast<std::size_t>(i)] = g.x(i) * g.x(i) * r;
    }
    const double n = simpson(g, rho);
    const double mean = simpson(g, xr) / n;
    return std::sqrt(simpson(g, xxr) / n - mean * mean);
}

double max_pointwise_diff(const Wavefunction& a, const Wavefunction& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.value(i) - b.value(i)));
    return m;
}

}  // namespace

TEST_CASE("gaussian initial pointer: peak value and norm") {
    const Grid g = default_grid();
    const auto psi = gaussian_initial(g, GaussianParams{1.0, 1.0, 1.0});
    CHECK(std::abs(psi.value(2400).real() - 0.6316187777460647) < 1e-15);
    CHECK(psi.value(2400).imag() == 0.0);
    CHECK(std::abs(norm_squared(psi) - 1.0) < 1e-10);

    CHECK_THROWS_AS(gaussian_initial(g, GaussianParams{-1.0, 1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(gaussian_initial(g, GaussianParams{1.0, -1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("gaussian post pair at t = 0 keeps the initial modulus") {
    const Grid g = default_grid();
    const GaussianParams p{1.0, 1.0, 0.0};
    const auto psi0 = gaussian_initial(g, p);
    const auto pair = gaussian_post(g, p);
    double dmax = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        dmax = std::max(dmax, std::abs(std::abs(pair.plus.value(i)) -
                                       std::abs(psi0.value(i))));
        dmax = std::max(dmax, std::abs(std::abs(pair.minus.value(i)) -
                                       std::abs(psi0.value(i))));
    }
    CHECK(dmax < 1e-14);
    // the only remaining distinction is the +/- g momentum kick, so the
    // formal overlap is the characteristic function at 2g
    const double absI = std::abs(inner_product(pair.plus, pair.minus));
    CHECK(std::abs(absI / std::exp(-2.0) - 1.0) < 1e-10);
}

TEST_CASE("gaussian post pair spreads and separates") {
    const Grid g = default_grid();
    const auto pair = gaussian_post(g, GaussianParams{1.0, 1.0, 1.0});
    CHECK(std::abs(norm_squared(pair.plus) - 1.0) < 1e-10);
    CHECK(std::abs(norm_squared(pair.minus) - 1.0) < 1e-10);
    // modulus variance sigma_t^2 = sigma0^2 (1 + t^2 / (4 sigma0^4))
    CHECK(std::abs(modulus_std(pair.plus) - std::sqrt(1.25)) < 1e-8);

    // peak positions at +/- g t / 2
    int imax = 0;
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(pair.plus.value(i)) > std::abs(pair.plus.value(imax)))
            imax = i;
    CHECK(std::abs(g.x(imax) - 0.5) < 2.0 * g.spacing());
}

TEST_CASE("gaussian post pair respects the window guard") {
    const Grid g = default_grid();
    CHECK_THROWS_AS(gaussian_post(g, GaussianParams{1.0, 1.0, 20.0}),
                    WindowError);
    try {
        gaussian_post(g, GaussianParams{1.0, 1.0, 20.0});
    } catch (const WindowError& e) {
        CHECK(e.mass() > kGuardMass);
    }
}

TEST_CASE("squeezed family reduces to the gaussian one at C = 0") {
    const Grid g = default_grid();
    const auto sq = squeezed_initial(g, SqueezedParams{1.0, 1.0, 1.0, 0.0});
    const auto ga = gaussian_initial(g, GaussianParams{1.0, 1.0, 1.0});
    CHECK(max_pointwise_diff(sq, ga) < 1e-10);

    const auto sp = squeezed_post(g, SqueezedParams{1.0, 1.0, 1.0, 0.0});
    const auto gp = gaussian_post(g, GaussianParams{1.0, 1.0, 1.0});
    CHECK(max_pointwise_diff(sp.plus, gp.plus) < 1e-10);
    CHECK(max_pointwise_diff(sp.minus, gp.minus) < 1e-10);
}

TEST_CASE("squeezed moduli follow sigma0 sqrt(1 + (C + tau)^2)") {
    // strongly squeezed point: sigma0 = 1e-4, C = -100
    const SqueezedParams p{1e-4, 10.0, 1e-4, -100.0};

    const Grid g0(-0.1, 0.1, 4001);
    const auto psi0 = squeezed_initial(g0, p);
    CHECK(std::abs(norm_squared(psi0) - 1.0) < 1e-12);
    CHECK(std::abs(modulus_std(psi0) / 0.010000499987500626 - 1.0) < 1e-8);

    // after t = 1e-4 the width has rebounded to ~0.49
    const Grid gt(-5.0, 5.0, 4801);
    const auto pair = squeezed_post(gt, p);
    CHECK(std::abs(modulus_std(pair.plus) / 0.49000001020408157 - 1.0) < 1e-8);
    CHECK(std::abs(modulus_std(pair.minus) / 0.49000001020408157 - 1.0) < 1e-8);
}

TEST_CASE("squeezed posts stay normalized for generic C") {
    const Grid g = default_grid();
    const auto pair = squeezed_post(g, SqueezedParams{1.0, 1.0, 1.0, 0.8});
    CHECK(std::abs(norm_squared(pair.plus) - 1.0) < 1e-12);
    CHECK(std::abs(norm_squared(pair.minus) - 1.0) < 1e-12);
}

TEST_CASE("tilt exponent u and its inverse") {
    CHECK(faithful_u(FaithfulParams{complex(-0.5, 0.0)}) == complex(0.0, 0.0));

    const double g1 = -1.0 / (2.0 * std::cosh(2.0));
    const complex u = faithful_u(FaithfulParams{complex(g1, 0.0)});
    CHECK(std::abs(u - complex(1.0, 0.0)) < 1e-12);

    // positive gamma1 lands on the branch with the constant imaginary part
    const complex u2 = 2.0 * faithful_u(FaithfulParams{complex(0.25, 0.0)});
    CHECK(std::abs(u2.real() - 1.3169578969248168) < 1e-12);
    CHECK(std::abs(u2.imag() - std::numbers::pi) < 1e-12);

    CHECK(std::abs(gamma1_for_tilt(0.05) - (-0.4993756503804445)) < 1e-15);
    CHECK(std::abs(gamma1_for_tilt(0.2) - (-0.49016399882236267)) < 1e-15);
    for (double up : {0.05, 0.2, 1.3}) {
        const complex r =
            faithful_u(FaithfulParams{complex(gamma1_for_tilt(up), 0.0)});
        CHECK(std::abs(2.0 * r.real() - up) < 1e-12);
        CHECK(std::abs(r.imag()) < 1e-12);
    }

    CHECK_THROWS_AS(faithful_u(FaithfulParams{complex(0.0, 0.7)}),
                    std::invalid_argument);
}

TEST_CASE("seed recovery applies the constant member factor") {
    const Grid g = default_grid();
    const auto seed = gaussian_envelope(g, 1.0);
    FaithfulParams p;
    p.gamma1 = complex(gamma1_for_tilt(0.1), 0.0);
    p.theta = std::numbers::pi / 4.0;
    p.s = 1.0;
    p.m = 1;
    const auto out = faithful_from_seed(seed, p);
    // exp(-u' + i pi/2) followed by renormalization leaves the factor i
    double dmax = 0.0;
    for (int i = 0; i < g.size(); ++i)
        dmax = std::max(dmax, std::abs(out.value(i) -
                                       complex(0.0, 1.0) * seed.value(i)));
    CHECK(dmax < 1e-12);
}

TEST_CASE("faithful pair: equal moduli and constant relative phase") {
    const Grid g = default_grid();
    const auto seed = gaussian_envelope(g, 1.0);
    FaithfulParams p;
    p.gamma1 = complex(gamma1_for_tilt(0.1), 0.0);
    p.theta = 0.3;
    p.s = 0.5;
    const auto pair = faithful_post_states(seed, p);
    CHECK(std::abs(norm_squared(pair.plus) - 1.0) < 1e-12);

    double dmod = 0.0;
    for (int i = 0; i < g.size(); ++i)
        dmod = std::max(dmod, std::abs(std::abs(pair.plus.value(i)) -
                                       std::abs(pair.minus.value(i))));
    CHECK(dmod < 1e-13);

    // conj(plus) * minus has the constant argument 4 s theta
    const double want = 4.0 * p.s * p.theta;
    double dev = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const complex z = std::conj(pair.plus.value(i)) * pair.minus.value(i);
        if (std::abs(z) < 1e-30) continue;
        dev = std::max(dev, std::abs(std::remainder(std::arg(z) - want,
                                                    2.0 * std::numbers::pi)));
    }
    CHECK(dev < 1e-9);
}

TEST_CASE("faithful pair rejects overflowing tilts") {
    const Grid g = default_grid();
    const auto seed = gaussian_envelope(g, 1.0);
    FaithfulParams p;
    p.gamma1 = complex(gamma1_for_tilt(80.0), 0.0);
    p.s = 1.0;
    CHECK_THROWS_AS(faithful_post_states(seed, p), std::invalid_argument);
}

TEST_CASE("three-term recursion: geometric sequences are exact") {
    const Grid g = default_grid();
    const auto psi0 = gaussian_envelope(g, 1.0);
    FaithfulParams p;
    const double uprime = 0.25;
    p.gamma1 = complex(gamma1_for_tilt(uprime), 0.0);
    p.theta = 0.6;
    const complex c = std::exp(complex(uprime, -2.0 * p.theta));

    auto scaled = [&](const complex& f) {
        std::vector<complex> a(static_cast<std::size_t>(g.size()));
        for (int i = 0; i < g.size(); ++i)
            a[static_cast<std::size_t>(i)] = f * psi0.value(i);
        return Wavefunction(g, std::move(a));
    };
    const auto psi1 = scaled(c);
    const auto psi2 = faithful_sequence_step(psi1, psi0, p);
    CHECK(max_pointwise_diff(psi2, scaled(c * c)) < 1e-12);
}

TEST_CASE("three-term recursion: unimodular root stays bounded") {
    // Re(gamma1) = -0.6 puts the recursion root on the unit circle, so ten
    // iterations neither blow up nor decay.
    const Grid g = default_grid();
    const auto psi0 = gaussian_envelope(g, 1.0);
    const double gamma = -0.6;
    FaithfulParams p;
    p.gamma1 = complex(gamma, 0.0);
    p.theta = 0.2;
    const complex lambda =
        (complex(-1.0, 0.0) +
         std::sqrt(complex(1.0 - 4.0 * gamma * gamma, 0.0))) /
        (2.0 * gamma);
    CHECK(std::abs(std::abs(lambda) - 1.0) < 1e-12);
    const complex c = lambda * std::exp(complex(0.0, -2.0 * p.theta));

    Wavefunction prev = psi0;
    Wavefunction cur = [&] {
        std::vector<complex> a(static_cast<std::size_t>(g.size()));
        for (int i = 0; i < g.size(); ++i)
            a[static_cast<std::size_t>(i)] = c * psi0.value(i);
        return Wavefunction(g, std::move(a));
    }();
    for (int k = 0; k < 10; ++k) {
        Wavefunction next = faithful_sequence_step(cur, prev, p);
        prev = std::move(cur);
        cur = std::move(next);
    }
    CHECK(std::abs(norm(cur) - 1.0) < 1e-9);
}

TEST_CASE("envelopes are unit norm with the right shape") {
    const Grid g = default_grid();
    const auto ge = gaussian_envelope(g, 1.0);
    CHECK(std::abs(norm_squared(ge) - 1.0) < 1e-10);

    const auto te = triangular_envelope(g, 3.0);
    CHECK(std::abs(norm_squared(te) - 1.0) < 1e-12);
    CHECK(te.value(0) == complex(0.0, 0.0));  // outside the support
    CHECK(std::abs(te.value(2400).real() - std::sqrt(0.5)) < 1e-3);

    CHECK_THROWS_AS(gaussian_envelope(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(triangular_envelope(g, -1.0), std::invalid_argument);
}

TEST_CASE("linear phase pointer carries exp(i kappa r)") {
    const Grid g = default_grid();
    const auto env = gaussian_envelope(g, 1.0);
    const auto psi = linear_phase_pointer(env, 2.5);
    CHECK(std::abs(norm_squared(psi) - 1.0) < 1e-10);
    const int i1 = 2600;  // x = 1
    const double got = std::arg(psi.value(i1));
    CHECK(std::abs(std::remainder(got - 2.5 * g.x(i1),
                                  2.0 * std::numbers::pi)) < 1e-10);

    const auto complex_env = apply_linear_phase(env, 1.0);
    CHECK_THROWS_AS(linear_phase_pointer(complex_env, 1.0),
                    std::invalid_argument);
}
