#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pointerlab/grid.hpp"

namespace pointerlab {

using complex = std::complex<double>;

/** Thrown when probability mass leaks past the grid window beyond a guard. */
class WindowError : public std::runtime_error {
public:
    explicit WindowError(const std::string& msg, double mass = 0.0)
        : std::runtime_error(msg), mass_(mass) {}

    /** Offending boundary (or dropped) probability mass, when known. */
    double mass() const { return mass_; }

private:
    double mass_;
};

/** Complex amplitudes sampled on the nodes of a uniform grid. */
class Wavefunction {
public:
    Wavefunction(Grid grid, std::vector<complex> amplitudes)
        : grid_(grid), amp_(std::move(amplitudes)) {
        if (static_cast<int>(amp_.size()) != grid_.size())
            throw std::invalid_argument(
                "Wavefunction: amplitude count does not match grid");
    }

    /** Sample f(x) at every node. f may return double or complex. */
    template <class F>
    static Wavefunction sampled(const Grid& g, F&& f) {
        std::vector<complex> a(static_cast<std::size_t>(g.size()));
        for (int i = 0; i < g.size(); ++i)
            a[static_cast<std::size_t>(i)] = complex(f(g.x(i)));
        return Wavefunction(g, std::move(a));
    }

    const Grid& grid() const { return grid_; }
    std::span<const complex> values() const { return amp_; }
    complex value(int i) const { return amp_[static_cast<std::size_t>(i)]; }
    int size() const { return grid_.size(); }

private:
    Grid grid_;
    std::vector<complex> amp_;
};

inline void require_same_grid(const Wavefunction& a, const Wavefunction& b,
                              const char* who) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument(std::string(who) +
                                    ": operands live on different grids");
}

/**
 * <a|b> = integral of conj(a) b, by composite Simpson. Swapping the
 * arguments conjugates every summand, so inner_product(a, b) equals
 * conj(inner_product(b, a)) bitwise.
 */
inline complex inner_product(const Wavefunction& a, const Wavefunction& b) {
    require_same_grid(a, b, "inner_product");
    std::vector<complex> f(static_cast<std::size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i)
        f[static_cast<std::size_t>(i)] = std::conj(a.value(i)) * b.value(i);
    return simpson(a.grid(), f);
}

/**
 * integral of |a||b|. For unit-norm inputs this dominates |<a|b>| and is
 * bounded by 1 (Cauchy-Schwarz); inputs are not required to be normalized
 * here because variational callers feed clipped states on purpose.
 */
inline double abs_overlap(const Wavefunction& a, const Wavefunction& b) {
    require_same_grid(a, b, "abs_overlap");
    std::vector<double> f(static_cast<std::size_t>(a.size()));
    for (int i = 0; i < a.size(); ++i)
        f[static_cast<std::size_t>(i)] = std::abs(a.value(i)) * std::abs(b.value(i));
    return simpson(a.grid(), f);
}

inline double norm_squared(const Wavefunction& psi) {
    std::vector<double> f(static_cast<std::size_t>(psi.size()));
    for (int i = 0; i < psi.size(); ++i)
        f[static_cast<std::size_t>(i)] = std::norm(psi.value(i));
    return simpson(psi.grid(), f);
}

inline double norm(const Wavefunction& psi) { return std::sqrt(norm_squared(psi)); }

/** Rescale to unit norm. The divisor is real, so the phase profile is kept. */
inline Wavefunction normalize(const Wavefunction& psi) {
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("normalize: norm is zero or not finite");
    std::vector<complex> a(psi.values().begin(), psi.values().end());
    for (auto& v : a) v /= n;
    return Wavefunction(psi.grid(), std::move(a));
}

enum class TranslatePolicy { strict, allow_loss };

/**
 * Shift psi right by d, where d must be a whole number of grid steps within
 * 1e-12 * h. Amplitudes move node-exactly (no interpolation); nodes entering
 * from outside the window are zero and the mass carried past the far edge is
 * dropped. Under the strict policy a drop above 1e-6 throws WindowError;
 * lost_mass, when non-null, always receives the dropped mass.
 */
inline Wavefunction translate(const Wavefunction& psi, double d,
                              TranslatePolicy policy = TranslatePolicy::strict,
                              double* lost_mass = nullptr) {
    const double h = psi.grid().spacing();
    const double steps = d / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-12)
        throw std::invalid_argument(
            "translate: displacement is not a whole number of grid steps");
    const long long k = static_cast<long long>(rounded);
    const int n = psi.size();
    std::vector<complex> a(static_cast<std::size_t>(n), complex(0.0, 0.0));
    for (int i = 0; i < n; ++i) {
        const long long src = static_cast<long long>(i) - k;
        if (src >= 0 && src < n)
            a[static_cast<std::size_t>(i)] = psi.value(static_cast<int>(src));
    }
    Wavefunction out(psi.grid(), std::move(a));
    const double loss = std::max(0.0, norm_squared(psi) - norm_squared(out));
    if (lost_mass) *lost_mass = loss;
    if (policy == TranslatePolicy::strict && loss > 1e-6)
        throw WindowError("translate: dropped probability mass " +
                              std::to_string(loss) + " exceeds 1e-6",
                          loss);
    return out;
}

/** Multiply by exp(i k x). Norm is unchanged up to rounding. */
inline Wavefunction apply_linear_phase(const Wavefunction& psi, double k) {
    std::vector<complex> a(static_cast<std::size_t>(psi.size()));
    for (int i = 0; i < psi.size(); ++i) {
        const double ph = k * psi.grid().x(i);
        a[static_cast<std::size_t>(i)] =
            psi.value(i) * complex(std::cos(ph), std::sin(ph));
    }
    return Wavefunction(psi.grid(), std::move(a));
}

/**
 * Probability mass in the outer edge_fraction of the window on each side,
 * summed. Cells use the trapezoid rule and the cell containing the cut is
 * split with linear interpolation, so a flat density reports exactly
 * 2 * edge_fraction. Requires edge_fraction in (0, 0.5).
 */
inline double boundary_mass(const Wavefunction& psi, double edge_fraction) {
    if (!(edge_fraction > 0.0) || !(edge_fraction < 0.5))
        throw std::invalid_argument(
            "boundary_mass: edge_fraction must lie in (0, 0.5)");
    const Grid& g = psi.grid();
    const double h = g.spacing();
    const double cut_lo = g.x_min() + edge_fraction * g.length();
    const double cut_hi = g.x_max() - edge_fraction * g.length();
    auto rho = [&](int i) { return std::norm(psi.value(i)); };

    double mass = 0.0;
    for (int i = 0; i + 1 < g.size(); ++i) {
        const double x0 = g.x(i);
        if (x0 >= cut_lo) break;
        const double r0 = rho(i), r1 = rho(i + 1);
        if (g.x(i + 1) <= cut_lo) {
            mass += 0.5 * (r0 + r1) * h;
        } else {
            const double w = cut_lo - x0;
            const double rc = r0 + (r1 - r0) * (w / h);
            mass += 0.5 * (r0 + rc) * w;
            break;
        }
    }
    for (int i = g.size() - 1; i > 0; --i) {
        const double x1 = g.x(i);
        if (x1 <= cut_hi) break;
        const double r1 = rho(i), r0 = rho(i - 1);
        if (g.x(i - 1) >= cut_hi) {
            mass += 0.5 * (r0 + r1) * h;
        } else {
            const double w = x1 - cut_hi;
            const double rc = r1 + (r0 - r1) * (w / h);
            mass += 0.5 * (r1 + rc) * w;
            break;
        }
    }
    return mass;
}

}  // namespace pointerlab
