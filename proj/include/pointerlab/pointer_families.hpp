#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "pointerlab/grid.hpp"
#include "pointerlab/wavefunction.hpp"

namespace pointerlab {

// Window guard: states must keep their tails out of the outer 5% of the
// window, to at most 1e-8 of probability mass per state.
inline constexpr double kGuardFraction = 0.05;
inline constexpr double kGuardMass = 1e-8;

/** Post-interaction pointer pair; plus rides the +x qubit component. */
struct PointerPair {
    Wavefunction plus;
    Wavefunction minus;
};

inline void require_window(const Wavefunction& psi, const char* who) {
    const double tail = boundary_mass(psi, kGuardFraction);
    if (tail > kGuardMass)
        throw WindowError(std::string(who) + ": boundary mass " +
                              std::to_string(tail) +
                              " exceeds the window guard; widen the grid",
                          tail);
}

// ---------------------------------------------------------------------------
// Minimum-uncertainty (Gaussian) family, units hbar = m = 1.

struct GaussianParams {
    double sigma0 = 1.0;  // initial width, > 0
    double g = 1.0;       // coupling, >= 0
    double t = 1.0;       // interaction time, >= 0
};

inline void validate(const GaussianParams& p) {
    if (!(p.sigma0 > 0.0))
        throw std::invalid_argument("GaussianParams: sigma0 must be positive");
    if (p.g < 0.0 || p.t < 0.0)
        throw std::invalid_argument("GaussianParams: g and t must be nonnegative");
}

/** psi0(x) = (2 pi sigma0^2)^(-1/4) exp(-x^2 / (4 sigma0^2)). */
inline Wavefunction gaussian_initial(const Grid& grid, const GaussianParams& p) {
    validate(p);
    const double s02 = p.sigma0 * p.sigma0;
    const double pref = std::pow(2.0 * std::numbers::pi * s02, -0.25);
    auto psi = Wavefunction::sampled(grid, [&](double x) {
        return pref * std::exp(-x * x / (4.0 * s02));
    });
    require_window(psi, "gaussian_initial");
    return psi;
}

/**
 * Post-interaction pair: centers at +/- g t / 2, momentum kicks +/- g, and
 * the complex width s_t = sigma0 (1 + i t / (2 sigma0^2)) shared by both
 * branches,
 *
 *   psi_pm(x) = (2 pi s_t^2)^(-1/4)
 *               exp(-(x -/+ g t/2)^2 / (4 sigma0 s_t) +/- i g x).
 */
inline PointerPair gaussian_post(const Grid& grid, const GaussianParams& p) {
    validate(p);
    const double s02 = p.sigma0 * p.sigma0;
    const complex st = p.sigma0 * complex(1.0, p.t / (2.0 * s02));
    const complex pref =
        std::pow(2.0 * std::numbers::pi * st * st, complex(-0.25, 0.0));
    const complex denom = 4.0 * p.sigma0 * st;
    const double d = 0.5 * p.g * p.t;
    auto branch = [&](double sign) {
        auto b = Wavefunction::sampled(grid, [&, sign](double x) {
            const double xc = x - sign * d;
            return pref * std::exp(-(xc * xc) / denom +
                                   complex(0.0, sign * p.g * x));
        });
        require_window(b, "gaussian_post");
        return b;
    };
    return PointerPair{branch(+1.0), branch(-1.0)};
}

// ---------------------------------------------------------------------------
// Squeezed family: complex initial width, same interaction.

struct SqueezedParams {
    double sigma0 = 1.0;  // width scale, > 0
    double g = 1.0;       // coupling, >= 0
    double t = 1.0;       // interaction time, >= 0
    double C = 0.0;       // squeezing parameter, any real
};

inline void validate(const SqueezedParams& p) {
    if (!(p.sigma0 > 0.0))
        throw std::invalid_argument("SqueezedParams: sigma0 must be positive");
    if (p.g < 0.0 || p.t < 0.0)
        throw std::invalid_argument("SqueezedParams: g and t must be nonnegative");
}

/**
 * Squeezed initial pointer,
 *
 *   psi0(x) = (2 pi sigma0^2 (1 + i C)^2)^(-1/4)
 *             exp(-x^2 / (4 sigma0^2 (1 + i C))),
 *
 * a normalized state for every real C whose modulus is Gaussian with
 * variance sigma0^2 (1 + C^2). Renormalized on the grid; the analytic
 * prefactor only fixes the global phase convention so that C = 0 reduces
 * to gaussian_initial exactly.
 */
inline Wavefunction squeezed_initial(const Grid& grid, const SqueezedParams& p) {
    validate(p);
    const double s02 = p.sigma0 * p.sigma0;
    const complex a0 = s02 * complex(1.0, p.C);
    const complex w0 = a0 / p.sigma0;  // complex width, sigma0 (1 + i C)
    const complex pref =
        std::pow(2.0 * std::numbers::pi * w0 * w0, complex(-0.25, 0.0));
    auto raw = Wavefunction::sampled(grid, [&](double x) {
        return pref * std::exp(-x * x / (4.0 * a0));
    });
    auto psi = normalize(raw);
    require_window(psi, "squeezed_initial");
    return psi;
}

/**
 * Post-interaction squeezed pair. Free spreading advances the complex width
 * parameter to a_t = sigma0^2 (1 + i C) + i t / 2; centers and kicks are the
 * same +/- g t / 2 and +/- g as in the Gaussian family:
 *
 *   psi_pm(x) = (2 pi a_t^2 / sigma0^2)^(-1/4)
 *               exp(-(x -/+ g t/2)^2 / (4 a_t) +/- i g x).
 *
 * The modulus is Gaussian with variance |a_t|^2 / sigma0^2
 * = sigma0^2 (1 + (C + t/(2 sigma0^2))^2). C = 0 reduces to gaussian_post.
 */
inline PointerPair squeezed_post(const Grid& grid, const SqueezedParams& p) {
    validate(p);
    const double s02 = p.sigma0 * p.sigma0;
    const complex at = s02 * complex(1.0, p.C) + complex(0.0, 0.5 * p.t);
    const complex wt = at / p.sigma0;
    const complex pref =
        std::pow(2.0 * std::numbers::pi * wt * wt, complex(-0.25, 0.0));
    const double d = 0.5 * p.g * p.t;
    auto branch = [&](double sign) {
        auto raw = Wavefunction::sampled(grid, [&, sign](double x) {
            const double xc = x - sign * d;
            return pref * std::exp(-(xc * xc) / (4.0 * at) +
                                   complex(0.0, sign * p.g * x));
        });
        auto b = normalize(raw);
        require_window(b, "squeezed_post");
        return b;
    };
    return PointerPair{branch(+1.0), branch(-1.0)};
}

// ---------------------------------------------------------------------------
// Stationary ("faithful") family: the variational solutions whose
// operational and formal overlaps coincide.

struct FaithfulParams {
    complex gamma1 = complex(-0.5, 0.0);  // recursion weight; gamma2 = conj(gamma1)
    double theta = 0.0;                   // phase angle of the recursion
    double s = 1.0;                       // half shift between the pair, > 0
    int m = 0;                            // sequence index, for seed recovery
};

inline void validate(const FaithfulParams& p) {
    if (!(p.s > 0.0))
        throw std::invalid_argument("FaithfulParams: s must be positive");
}

/**
 * Tilt exponent of the stationary family,
 *
 *   u = acosh(-1 / (gamma1 + gamma2)) / 2,   gamma2 = conj(gamma1),
 *
 * so the acosh argument is real. Principal branch, Re(u) >= 0: arguments in
 * (-1, 1) give a purely imaginary u (bounded modulus profile), arguments
 * <= -1 add the constant imaginary part pi/2.
 */
inline complex faithful_u(const FaithfulParams& p) {
    const double sum = 2.0 * p.gamma1.real();  // gamma1 + conj(gamma1)
    if (sum == 0.0)
        throw std::invalid_argument("faithful_u: Re(gamma1) must be nonzero");
    return 0.5 * std::acosh(complex(-1.0 / sum, 0.0));
}

/** Real gamma1 whose tilt Re(2u) comes out as u_prime: -1 / (2 cosh u_prime). */
inline double gamma1_for_tilt(double u_prime) {
    return -1.0 / (2.0 * std::cosh(u_prime));
}

/**
 * Recover the m = 0 member from the m-th one: members of the stationary
 * sequence differ by the constant factor exp(m Re(2u) - 2 i m theta), so
 * the seed is seed_state * exp(-m Re(2u) + 2 i m theta), renormalized.
 */
inline Wavefunction faithful_from_seed(const Wavefunction& seed,
                                       const FaithfulParams& p) {
    validate(p);
    const double uprime = 2.0 * faithful_u(p).real();
    const complex scale =
        std::exp(complex(-static_cast<double>(p.m) * uprime,
                         2.0 * static_cast<double>(p.m) * p.theta));
    std::vector<complex> a(static_cast<std::size_t>(seed.size()));
    for (int i = 0; i < seed.size(); ++i)
        a[static_cast<std::size_t>(i)] = seed.value(i) * scale;
    return normalize(Wavefunction(seed.grid(), std::move(a)));
}

/**
 * Post-interaction pair of the stationary family, built pointwise from any
 * seed profile psi0:
 *
 *   psi_pm(r) = psi0(r) exp((r +/- s) u' - 2 i (r +/- s) theta),  u' = Re(2u),
 *
 * each renormalized. The two moduli coincide node by node and the relative
 * phase conj(psi_plus) psi_minus = |...|^2 exp(4 i s theta) is constant, so
 * the operational overlap equals |formal overlap| by construction, for any
 * seed. Throws when the exponential tilt would overflow on the window.
 */
inline PointerPair faithful_post_states(const Wavefunction& psi0,
                                        const FaithfulParams& p) {
    validate(p);
    const double uprime = 2.0 * faithful_u(p).real();
    const Grid& g = psi0.grid();
    const double reach =
        (std::max(std::abs(g.x_min()), std::abs(g.x_max())) + p.s) *
        std::abs(uprime);
    if (reach > 700.0)
        throw std::invalid_argument(
            "faithful_post_states: tilt exponent overflows on this window");
    auto branch = [&](double sign) {
        std::vector<complex> a(static_cast<std::size_t>(psi0.size()));
        for (int i = 0; i < psi0.size(); ++i) {
            const double r = g.x(i) + sign * p.s;
            a[static_cast<std::size_t>(i)] =
                psi0.value(i) * std::exp(complex(r * uprime, -2.0 * r * p.theta));
        }
        auto b = normalize(Wavefunction(g, std::move(a)));
        require_window(b, "faithful_post_states");
        return b;
    };
    return PointerPair{branch(+1.0), branch(-1.0)};
}

/**
 * One step of the three-term recursion obeyed by the stationary sequence,
 *
 *   psi_m = -gamma1 e^{2 i theta} psi_{m+1} - gamma2 e^{-2 i theta} psi_{m-1},
 *
 * solved for psi_{m+1} (gamma2 = conj(gamma1)). No renormalization: the
 * geometric growth or decay of the members is the observable being iterated.
 */
inline Wavefunction faithful_sequence_step(const Wavefunction& psi_m,
                                           const Wavefunction& psi_m_minus_1,
                                           const FaithfulParams& p) {
    require_same_grid(psi_m, psi_m_minus_1, "faithful_sequence_step");
    if (p.gamma1 == complex(0.0, 0.0))
        throw std::invalid_argument("faithful_sequence_step: gamma1 must be nonzero");
    const complex e2it = std::exp(complex(0.0, 2.0 * p.theta));
    const complex denom = p.gamma1 * e2it;
    const complex cprev = std::conj(p.gamma1) * std::conj(e2it);
    std::vector<complex> a(static_cast<std::size_t>(psi_m.size()));
    for (int i = 0; i < psi_m.size(); ++i)
        a[static_cast<std::size_t>(i)] =
            -(psi_m.value(i) + cprev * psi_m_minus_1.value(i)) / denom;
    return Wavefunction(psi_m.grid(), std::move(a));
}

// ---------------------------------------------------------------------------
// Envelopes and the linear-phase construction.

/** Unit-norm real Gaussian envelope of width sigma. */
inline Wavefunction gaussian_envelope(const Grid& grid, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_envelope: sigma must be positive");
    const double pref = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
    return Wavefunction::sampled(grid, [&](double x) {
        return pref * std::exp(-x * x / (4.0 * sigma * sigma));
    });
}

/** Unit-norm tent envelope supported on [-half_width, half_width]. */
inline Wavefunction triangular_envelope(const Grid& grid, double half_width) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("triangular_envelope: half_width must be positive");
    const double height = std::sqrt(3.0 / (2.0 * half_width));
    auto raw = Wavefunction::sampled(grid, [&](double x) {
        const double t = 1.0 - std::abs(x) / half_width;
        return t > 0.0 ? height * t : 0.0;
    });
    // The kink can sit off-node, so trust the quadrature, not the closed form.
    return normalize(raw);
}

/**
 * Normalized pointer with strictly linear phase over a nonnegative real
 * envelope: psi(r) = envelope(r) exp(i kappa r). Pairs translated from such
 * a state carry a constant relative phase, hence stay faithful for any
 * kappa, while generic curved phases do not.
 */
inline Wavefunction linear_phase_pointer(const Wavefunction& envelope,
                                         double kappa) {
    for (int i = 0; i < envelope.size(); ++i) {
        const complex v = envelope.value(i);
        if (v.imag() != 0.0 || v.real() < 0.0)
            throw std::invalid_argument(
                "linear_phase_pointer: envelope must be real and nonnegative");
    }
    return normalize(apply_linear_phase(envelope, kappa));
}

}  // namespace pointerlab
