#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "pointerlab/grid.hpp"
#include "pointerlab/pointer_families.hpp"
#include "pointerlab/wavefunction.hpp"

namespace pointerlab {

/** Qubit amplitudes in the x-eigenbasis; |alpha|^2 + |beta|^2 = 1. */
struct QubitState {
    complex alpha = complex(1.0, 0.0);  // +x component
    complex beta = complex(0.0, 0.0);   // -x component
};

/** Checked construction: amplitudes must be normalized within 1e-10. */
inline QubitState make_qubit(complex alpha, complex beta) {
    const double n = std::norm(alpha) + std::norm(beta);
    if (std::abs(n - 1.0) > 1e-10)
        throw std::invalid_argument("make_qubit: amplitudes are not normalized");
    return QubitState{alpha, beta};
}

/** Rescale arbitrary nonzero amplitudes to a valid qubit state. */
inline QubitState normalized_qubit(complex alpha, complex beta) {
    const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("normalized_qubit: zero or non-finite amplitudes");
    return QubitState{alpha / n, beta / n};
}

/**
 * Entangled system-pointer state alpha |+x> psi_plus + beta |-x> psi_minus.
 * Branches are stored unit-normalized so the pointer marginal integrates
 * to one.
 */
struct CompositeState {
    QubitState qubit;
    Wavefunction plus;
    Wavefunction minus;
};

/** Pointer-position density |alpha|^2 |psi_plus|^2 + |beta|^2 |psi_minus|^2. */
inline std::vector<double> marginal_density(const CompositeState& c) {
    const double pa = std::norm(c.qubit.alpha);
    const double pb = std::norm(c.qubit.beta);
    std::vector<double> rho(static_cast<std::size_t>(c.plus.size()));
    for (int i = 0; i < c.plus.size(); ++i)
        rho[static_cast<std::size_t>(i)] =
            pa * std::norm(c.plus.value(i)) + pb * std::norm(c.minus.value(i));
    return rho;
}

/**
 * Build the composite state from a qubit and a pointer pair. Branches must
 * arrive within 1e-6 of unit norm (they are then renormalized exactly), and
 * the resulting marginal must integrate to 1 within 1e-8.
 */
inline CompositeState make_composite(const QubitState& chi,
                                     const PointerPair& pair) {
    require_same_grid(pair.plus, pair.minus, "make_composite");
    const double qn = std::norm(chi.alpha) + std::norm(chi.beta);
    if (std::abs(qn - 1.0) > 1e-10)
        throw std::invalid_argument("make_composite: qubit is not normalized");
    for (const Wavefunction* b : {&pair.plus, &pair.minus}) {
        const double n = norm(*b);
        if (std::abs(n - 1.0) > 1e-6)
            throw std::invalid_argument(
                "make_composite: pointer branch is not normalized");
    }
    CompositeState c{chi, normalize(pair.plus), normalize(pair.minus)};
    const double total = simpson(c.plus.grid(), marginal_density(c));
    if (std::abs(total - 1.0) > 1e-8)
        throw std::runtime_error("make_composite: marginal mass is off unity");
    return c;
}

/** Probabilities of the two named channels: reading the correct flag. */
struct ChannelProbabilities {
    double upper_plus;   // pointer above zero and qubit collapsed onto +x
    double lower_minus;  // pointer below zero and qubit collapsed onto -x
};

/**
 * p(upper, +x) = (1 - E) |alpha|^2 and p(lower, -x) = (1 - E) |beta|^2:
 * each branch loses exactly the interference error E to the wrong side.
 * Requires E in [0, 1/2].
 */
inline ChannelProbabilities channel_probabilities(const QubitState& chi,
                                                  double E) {
    if (!(E >= 0.0 && E <= 0.5))
        throw std::invalid_argument("channel_probabilities: E must lie in [0, 1/2]");
    return ChannelProbabilities{(1.0 - E) * std::norm(chi.alpha),
                                (1.0 - E) * std::norm(chi.beta)};
}

/** Dense 2x2 complex matrix in the x-eigenbasis, row major. */
struct Mat2 {
    complex a00, a01, a10, a11;

    static Mat2 identity() {
        return Mat2{complex(1.0, 0.0), complex(0.0, 0.0), complex(0.0, 0.0),
                    complex(1.0, 0.0)};
    }
    Mat2 operator+(const Mat2& o) const {
        return Mat2{a00 + o.a00, a01 + o.a01, a10 + o.a10, a11 + o.a11};
    }
    Mat2 operator-(const Mat2& o) const {
        return Mat2{a00 - o.a00, a01 - o.a01, a10 - o.a10, a11 - o.a11};
    }
    friend Mat2 operator*(double s, const Mat2& m) {
        return Mat2{s * m.a00, s * m.a01, s * m.a10, s * m.a11};
    }
    /** <chi| M |chi>; real for Hermitian M up to rounding. */
    complex expectation(const QubitState& chi) const {
        const complex ca = std::conj(chi.alpha), cb = std::conj(chi.beta);
        return ca * (a00 * chi.alpha + a01 * chi.beta) +
               cb * (a10 * chi.alpha + a11 * chi.beta);
    }
    double max_abs() const {
        return std::max(std::max(std::abs(a00), std::abs(a01)),
                        std::max(std::abs(a10), std::abs(a11)));
    }
};

struct PovmPair {
    Mat2 plus;
    Mat2 minus;
};

/**
 * Two-outcome POVM of the nonideal readout,
 *
 *   Pi_pm = E * Id + (1 - 2E) P_pm,
 *
 * with P_pm the x-eigenbasis projectors. This is the unique pair affine in
 * the projectors that is complete (sums to the identity) and reproduces the
 * channel statistics p_plus = (1 - E)|alpha|^2 + E |beta|^2; subtractive
 * normalizations of the projector term fail completeness. Both elements are
 * positive semidefinite over the whole range E in [0, 1/2].
 */
inline PovmPair povm_elements(double E) {
    if (!(E >= 0.0 && E <= 0.5))
        throw std::invalid_argument("povm_elements: E must lie in [0, 1/2]");
    const Mat2 p_plus{complex(1.0, 0.0), complex(0.0, 0.0), complex(0.0, 0.0),
                      complex(0.0, 0.0)};
    const Mat2 p_minus{complex(0.0, 0.0), complex(0.0, 0.0), complex(0.0, 0.0),
                       complex(1.0, 0.0)};
    return PovmPair{E * Mat2::identity() + (1.0 - 2.0 * E) * p_plus,
                    E * Mat2::identity() + (1.0 - 2.0 * E) * p_minus};
}

struct PovmProbabilities {
    double plus;
    double minus;
};

/** Outcome probabilities <chi|Pi_pm|chi>; they sum to one. */
inline PovmProbabilities povm_probabilities(const QubitState& chi,
                                            const PovmPair& povm) {
    return PovmProbabilities{povm.plus.expectation(chi).real(),
                             povm.minus.expectation(chi).real()};
}

/** Tally of sampled pointer readings by side of x = 0. */
struct OutcomeCounts {
    long long n_upper = 0;  // draws with x > 0
    long long n_lower = 0;  // draws with x < 0
    long long n_total = 0;
    std::uint64_t seed = 0;
};

/**
 * Draw n pointer positions from the marginal of the composite state by
 * inverse CDF over trapezoid cell masses, classifying each draw by sign.
 *
 * Determinism contract: uniforms are built as (mt19937_64() >> 11) * 2^-53,
 * never through distribution adapters, so counts are identical across
 * platforms and standard libraries for a fixed seed. x = 0 is a grid node,
 * so every cell lies strictly on one side; the measure-zero draw landing
 * exactly on 0.0 spends one extra generator bit to pick a side, matching
 * the even split of that node's mass.
 */
inline OutcomeCounts sample_outcomes(const CompositeState& c, long long n,
                                     std::uint64_t seed) {
    if (n < 0)
        throw std::invalid_argument("sample_outcomes: sample count must be nonnegative");
    const Grid& g = c.plus.grid();
    const auto rho = marginal_density(c);
    std::vector<double> cdf(static_cast<std::size_t>(g.size()), 0.0);
    for (int i = 0; i + 1 < g.size(); ++i)
        cdf[static_cast<std::size_t>(i) + 1] =
            cdf[static_cast<std::size_t>(i)] +
            0.5 * g.spacing() * (rho[static_cast<std::size_t>(i)] +
                                 rho[static_cast<std::size_t>(i) + 1]);
    const double total = cdf.back();
    if (!(total > 0.0))
        throw std::runtime_error("sample_outcomes: marginal has no mass");

    std::mt19937_64 rng(seed);
    auto uniform = [&rng] {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    OutcomeCounts out{0, 0, n, seed};
    for (long long k = 0; k < n; ++k) {
        const double u = uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        int idx = static_cast<int>(it - cdf.begin()) - 1;
        idx = std::clamp(idx, 0, g.size() - 2);
        const double cell = cdf[static_cast<std::size_t>(idx) + 1] -
                            cdf[static_cast<std::size_t>(idx)];
        const double frac =
            cell > 0.0 ? (u - cdf[static_cast<std::size_t>(idx)]) / cell : 0.5;
        const double x = g.x(idx) + frac * g.spacing();
        if (x > 0.0)
            ++out.n_upper;
        else if (x < 0.0)
            ++out.n_lower;
        else
            (rng() & 1u ? out.n_upper : out.n_lower)++;
    }
    return out;
}

}  // namespace pointerlab
