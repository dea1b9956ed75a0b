#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pointerlab/ideality.hpp"
#include "pointerlab/measurement.hpp"
#include "pointerlab/pointer_families.hpp"
#include "pointerlab/sweep.hpp"

// Built-in reference checks: end-to-end validations of the library against
// its own closed forms, invariants and output contracts. The CLI exposes
// them under the paper-check subcommand; the acceptance test binary runs
// the same set. Tolerances here are deliberate and pinned; loosening them
// is a behavior change, not a cleanup.

namespace pointerlab::checks {

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0,
                       double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

class Stopwatch {
public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

/** Collects failures; a check passes when nothing was recorded. */
class Failures {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok && list_.size() < 8) list_.push_back(what);
        if (!ok) ++count_;
    }
    bool ok() const { return count_ == 0; }
    std::string summary() const {
        if (ok()) return "";
        std::string s = " [" + std::to_string(count_) + " failure(s): ";
        for (std::size_t i = 0; i < list_.size(); ++i) {
            if (i) s += " | ";
            s += list_[i];
        }
        s += "]";
        return s;
    }

private:
    std::vector<std::string> list_;
    long count_ = 0;
};

inline double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform(rng);
}

/**
 * Random normalized test state: one to three Gaussian bumps, a linear plus
 * optional quadratic phase, and a node-exact random shift. chirp_min > 0
 * forces a curved phase of at least that strength (used where strict
 * non-faithfulness is needed).
 */
inline Wavefunction random_state(std::mt19937_64& rng, const Grid& g,
                                 double chirp_min = 0.0) {
    const int nb = 1 + static_cast<int>(uniform(rng) * 3.0);
    std::vector<double> center(nb), width(nb), amp(nb);
    for (int b = 0; b < nb; ++b) {
        center[b] = uniform(rng, -4.0, 4.0);
        width[b] = uniform(rng, 0.4, 2.0);
        amp[b] = uniform(rng, 0.2, 1.0);
    }
    const double k = uniform(rng, -3.0, 3.0);
    double q = 0.0;
    if (chirp_min > 0.0) {
        q = uniform(rng, chirp_min, 4.0 * chirp_min);
        if (uniform(rng) < 0.5) q = -q;
    } else if (uniform(rng) < 0.5) {
        q = uniform(rng, -1.0, 1.0);
    }
    auto psi = Wavefunction::sampled(g, [&](double x) {
        double env = 0.0;
        for (int b = 0; b < nb; ++b) {
            const double z = (x - center[b]) / width[b];
            env += amp[b] * std::exp(-z * z);
        }
        const double ph = k * x + q * x * x;
        return env * complex(std::cos(ph), std::sin(ph));
    });
    const int shift = static_cast<int>(uniform(rng, -200.0, 200.0));
    psi = translate(psi, shift * g.spacing(), TranslatePolicy::allow_loss);
    return normalize(psi);
}

inline double eig_min_hermitian(const Mat2& m) {
    const double a = m.a00.real(), d = m.a11.real();
    const double off = std::abs(m.a01);
    const double tr = a + d;
    const double disc = std::sqrt((a - d) * (a - d) + 4.0 * off * off);
    return 0.5 * (tr - disc);
}

}  // namespace detail

/**
 * Check 1: the squeezed reference point sigma0 = 1e-4, g = 10, t = 1e-4,
 * C = -100. Quadrature on the auto-sized window must reproduce the closed
 * forms to a relative 1e-4, land in the regime M > 0.999 with |I| < 1e-4,
 * sit within 1e-4 absolute of the comparison overlap variant, and finish
 * inside one second.
 */
inline CheckResult check_squeezed_reference_point() {
    detail::Stopwatch sw;
    detail::Failures f;
    SweepSpec spec;
    spec.family = Family::squeezed;
    spec.grid.mode = GridSettings::Mode::auto_sized;
    spec.grid.n = kAutoGridNodes;
    const PointParams pt{1e-4, 10.0, 1e-4, -100.0, 0.0, 1.0, 0.0, -0.5, 0.0,
                         false, 0.0};
    const Grid grid = sweep_grid(spec, pt);
    const SqueezedParams sp{1e-4, 10.0, 1e-4, -100.0};
    const auto pair = squeezed_post(grid, sp);
    const double M = operational_overlap(pair.plus, pair.minus);
    const double absI = std::abs(formal_overlap(pair.plus, pair.minus));
    const auto cf = squeezed_closed_forms(sp);

    f.expect(M > 0.999, detail::fmt("M = %.6g is not > 0.999", M));
    f.expect(absI < 1e-4, detail::fmt("|I| = %.6g is not < 1e-4", absI));
    f.expect(std::abs(M - cf.M) <= 1e-4 * cf.M,
             detail::fmt("M quadrature %-.12g vs closed %-.12g", M, cf.M));
    f.expect(std::abs(absI - cf.absI) <= 1e-4 * cf.absI,
             detail::fmt("|I| quadrature %-.12g vs closed %-.12g", absI, cf.absI));
    f.expect(std::abs(absI - cf.absI_paper_literal) <= 1e-4,
             detail::fmt("|I| quadrature %-.12g vs comparison variant %-.12g",
                         absI, cf.absI_paper_literal));
    const double secs = sw.seconds();
    f.expect(secs < 1.0, detail::fmt("took %.2f s, budget 1 s", secs));
    return CheckResult{
        "squeezed reference point", f.ok(),
        detail::fmt("M = %.9g, |I| = %.6g", M, absI) +
            detail::fmt(", closed |I| = %.6g", cf.absI) +
            detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 2: Gaussian closed forms against quadrature on a 5 x 5 x 5 grid of
 * sigma0 in [0.5, 2], g in [0, 2], t in [0, 2], each window auto-sized.
 * Tolerance 1e-5 relative plus a 1e-8 absolute floor (the floor covers
 * overlaps that underflow toward the quadrature noise floor, e.g. |I| at
 * the largest corner is ~7e-15). The alternative t^4 spreading variant must
 * fail that tolerance at sigma0 = 1, g = 1, t = 2. Budget 10 s.
 */
inline CheckResult check_gaussian_closed_forms() {
    detail::Stopwatch sw;
    detail::Failures f;
    SweepSpec spec;
    spec.family = Family::gaussian;
    spec.grid.mode = GridSettings::Mode::auto_sized;
    spec.grid.n = kAutoGridNodes;
    auto lin = [](double lo, double hi, int i, int n) {
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    double worst_m = 0.0, worst_i = 0.0;
    for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
            for (int c = 0; c < 5; ++c) {
                const GaussianParams p{lin(0.5, 2.0, a, 5), lin(0.0, 2.0, b, 5),
                                       lin(0.0, 2.0, c, 5)};
                PointParams pt;
                pt.sigma0 = p.sigma0;
                pt.g = p.g;
                pt.t = p.t;
                const Grid grid = sweep_grid(spec, pt);
                const auto pair = gaussian_post(grid, p);
                const double M = operational_overlap(pair.plus, pair.minus);
                const double absI = std::abs(formal_overlap(pair.plus, pair.minus));
                const auto cf = gaussian_closed_forms(p);
                const double dm = std::abs(M - cf.M) / (1e-5 * cf.M + 1e-8);
                const double di = std::abs(absI - cf.absI) / (1e-5 * cf.absI + 1e-8);
                worst_m = std::max(worst_m, dm);
                worst_i = std::max(worst_i, di);
                f.expect(dm <= 1.0,
                         detail::fmt("M off at sigma0=%g g=%g t=%g", p.sigma0,
                                     p.g, p.t));
                f.expect(di <= 1.0,
                         detail::fmt("|I| off at sigma0=%g g=%g t=%g", p.sigma0,
                                     p.g, p.t));
            }
    {
        // Discriminating point for the spreading-law variant.
        const GaussianParams p{1.0, 1.0, 2.0};
        PointParams pt;
        pt.sigma0 = 1.0;
        pt.g = 1.0;
        pt.t = 2.0;
        const auto pair = gaussian_post(sweep_grid(spec, pt), p);
        const double M = operational_overlap(pair.plus, pair.minus);
        const auto cf = gaussian_closed_forms(p);
        f.expect(std::abs(M - cf.M) <= 1e-5 * cf.M + 1e-8,
                 detail::fmt("M %-.12g vs closed %-.12g at the discriminator", M,
                             cf.M));
        f.expect(std::abs(M - cf.M_paper_literal) >
                     1e-5 * cf.M_paper_literal + 1e-8,
                 detail::fmt("t^4 variant %-.12g not rejected against %-.12g",
                             cf.M_paper_literal, M));
    }
    const double secs = sw.seconds();
    f.expect(secs < 10.0, detail::fmt("took %.2f s, budget 10 s", secs));
    return CheckResult{"gaussian closed forms", f.ok(),
                       detail::fmt("worst M dev %.3g, worst |I| dev %.3g of "
                                   "tolerance",
                                   worst_m, worst_i) +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 3: the overlap inequality |I| <= M on 1000 seeded pseudo-random
 * pairs (multi-bump envelopes, linear and quadratic phases, node shifts).
 * Both overlaps must land in [0, 1 + 1e-8] and |I| <= M + 1e-9 throughout.
 * Budget 30 s.
 */
inline CheckResult check_overlap_inequality() {
    detail::Stopwatch sw;
    detail::Failures f;
    const Grid grid(kDefaultXMin, kDefaultXMax, kDefaultGridNodes);
    std::mt19937_64 rng(20260823ULL);
    double worst_gap = 1.0;
    for (int it = 0; it < 1000; ++it) {
        const auto a = detail::random_state(rng, grid);
        const auto b = detail::random_state(rng, grid);
        const double M = operational_overlap(a, b);
        const double absI = std::abs(formal_overlap(a, b));
        worst_gap = std::min(worst_gap, M - absI);
        f.expect(absI <= M + 1e-9,
                 detail::fmt("pair %g: |I| = %.12g > M = %.12g",
                             static_cast<double>(it), absI, M));
        f.expect(M >= 0.0 && M <= 1.0 + 1e-8,
                 detail::fmt("pair %g: M = %.12g out of range",
                             static_cast<double>(it), M));
        f.expect(absI >= 0.0 && absI <= 1.0 + 1e-8,
                 detail::fmt("pair %g: |I| = %.12g out of range",
                             static_cast<double>(it), absI));
    }
    const double secs = sw.seconds();
    f.expect(secs < 30.0, detail::fmt("took %.2f s, budget 30 s", secs));
    return CheckResult{"overlap inequality", f.ok(),
                       detail::fmt("1000 pairs, smallest M - |I| = %.3g",
                                   worst_gap) +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 4: the stationary family closes the gap. Across theta, s, tilt and
 * two envelope shapes, pairs from faithful_post_states must have
 * M - |I| <= 1e-8, overlap phase arg I = 4 s theta within 1e-6 (wrapped),
 * and pass the faithfulness certificate; translate pairs of linear-phase
 * states must pass it too. The plain Gaussian pair at sigma0 = g = t = 1
 * must fail it with a gap above 1e-3.
 */
inline CheckResult check_faithful_certificates() {
    detail::Stopwatch sw;
    detail::Failures f;
    const Grid grid(kDefaultXMin, kDefaultXMax, kDefaultGridNodes);
    const double thetas[] = {0.0, 0.3, 0.785, 1.2};
    const double shifts[] = {0.25, 0.5, 1.0, 2.0};
    const double tilts[] = {0.0, 0.05, 0.1, 0.2};
    double worst_gap = 0.0, worst_arg = 0.0, worst_dev = 0.0;
    for (int env = 0; env < 2; ++env) {
        const Wavefunction seed = env == 0 ? gaussian_envelope(grid, 1.0)
                                           : triangular_envelope(grid, 3.0);
        for (double theta : thetas)
            for (double s : shifts)
                for (double tilt : tilts) {
                    const FaithfulParams p{complex(gamma1_for_tilt(tilt), 0.0),
                                           theta, s, 0};
                    const auto pair = faithful_post_states(seed, p);
                    const complex I = formal_overlap(pair.plus, pair.minus);
                    const double M = operational_overlap(pair.plus, pair.minus);
                    const double gap = M - std::abs(I);
                    const double argerr = std::abs(std::remainder(
                        std::arg(I) - 4.0 * s * theta, 2.0 * std::numbers::pi));
                    const auto cert =
                        faithfulness_certificate(pair.plus, pair.minus);
                    worst_gap = std::max(worst_gap, std::abs(gap));
                    worst_arg = std::max(worst_arg, argerr);
                    worst_dev = std::max(worst_dev, cert.phase_dev);
                    f.expect(std::abs(gap) <= 1e-8,
                             detail::fmt("gap %.3g at theta=%g s=%g", gap, theta,
                                         s));
                    f.expect(argerr <= 1e-6,
                             detail::fmt("arg error %.3g at theta=%g s=%g",
                                         argerr, theta, s));
                    f.expect(cert.is_faithful,
                             detail::fmt("certificate failed at theta=%g s=%g",
                                         theta, s));
                }
    }
    for (int env = 0; env < 2; ++env) {
        const Wavefunction seed = env == 0 ? gaussian_envelope(grid, 1.0)
                                           : triangular_envelope(grid, 3.0);
        for (double kappa : {0.0, 1.0, 2.5})
            for (double s : {0.25, 0.5, 1.0}) {
                const auto psi = linear_phase_pointer(seed, kappa);
                const PointerPair pair{
                    translate(psi, +s, TranslatePolicy::allow_loss),
                    translate(psi, -s, TranslatePolicy::allow_loss)};
                const auto cert = faithfulness_certificate(pair.plus, pair.minus);
                const double gap =
                    operational_overlap(pair.plus, pair.minus) -
                    std::abs(formal_overlap(pair.plus, pair.minus));
                worst_dev = std::max(worst_dev, cert.phase_dev);
                f.expect(cert.is_faithful && std::abs(gap) <= 1e-8,
                         detail::fmt("translate pair kappa=%g s=%g not faithful",
                                     kappa, s));
            }
    }
    {
        const auto pair = gaussian_post(grid, GaussianParams{1.0, 1.0, 1.0});
        const double gap = operational_overlap(pair.plus, pair.minus) -
                           std::abs(formal_overlap(pair.plus, pair.minus));
        const auto cert = faithfulness_certificate(pair.plus, pair.minus);
        f.expect(gap > 1e-3,
                 detail::fmt("control pair gap %.3g not above 1e-3", gap));
        f.expect(!cert.is_faithful, "control pair passed the certificate");
    }
    const double secs = sw.seconds();
    return CheckResult{"stationary family certificates", f.ok(),
                       detail::fmt("worst gap %.3g, worst arg err %.3g, worst "
                                   "phase dev %.3g",
                                   worst_gap, worst_arg, worst_dev) +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 5: the variational picture. Explicitly constructed members of the
 * stationary family satisfy the three-term identity to residual < 1e-6 and
 * bring the objective within 1e-8 of its maximum, zero; 100 seeded random
 * states with a genuinely curved phase score strictly below zero.
 */
inline CheckResult check_variational_objective() {
    detail::Stopwatch sw;
    detail::Failures f;
    const Grid grid(kDefaultXMin, kDefaultXMax, kDefaultGridNodes);

    // Oscillatory member: gamma1 = -0.6 puts the tilt exponent on the
    // imaginary axis, u = i arccos(-1/(2 gamma1)) / 2, so the profile stays
    // bounded and the periodic prefactor is free.
    {
        const double gamma1 = -0.6, theta = 0.4, s = 1.0;
        const complex u = 0.5 * std::acosh(complex(-1.0 / (2.0 * gamma1), 0.0));
        auto psi0 = normalize(Wavefunction::sampled(grid, [&](double r) {
            const double pr = 1.0 + 0.3 * std::cos(std::numbers::pi * r / s);
            return pr * std::exp((u - complex(0.0, theta)) * (r / s));
        }));
        const FaithfulParams p{complex(gamma1, 0.0), theta, s, 0};
        const double resid = stationarity_residual(psi0, p);
        const auto lag = lagrangian_objective(psi0, p, 0.7);
        f.expect(resid < 1e-6,
                 detail::fmt("oscillatory member residual %.3g", resid));
        f.expect(std::abs(lag.value) <= 1e-8,
                 detail::fmt("oscillatory member objective %.3g", lag.value));
    }
    // Fixed-point member: gamma1 = -1/2, theta = 0, so u = 0 and any
    // 2s-periodic positive profile is stationary.
    {
        const double s = 1.0;
        auto psi0 = normalize(Wavefunction::sampled(grid, [&](double r) {
            return 1.0 + 0.3 * std::cos(std::numbers::pi * r / s);
        }));
        const FaithfulParams p{complex(-0.5, 0.0), 0.0, s, 0};
        const double resid = stationarity_residual(psi0, p);
        const auto lag = lagrangian_objective(psi0, p, 0.7);
        f.expect(resid < 1e-6, detail::fmt("fixed-point residual %.3g", resid));
        f.expect(std::abs(lag.value) <= 1e-8,
                 detail::fmt("fixed-point objective %.3g", lag.value));
    }
    // Random curved-phase states: strictly suboptimal.
    {
        std::mt19937_64 rng(777ULL);
        const FaithfulParams p{complex(-0.5, 0.0), 0.0, 0.5, 0};
        double worst = -1.0;
        for (int it = 0; it < 100; ++it) {
            const auto psi = detail::random_state(rng, grid, 0.3);
            const auto lag = lagrangian_objective(psi, p, 0.3);
            worst = std::max(worst, lag.value);
            f.expect(lag.value < -1e-9,
                     detail::fmt("candidate %g objective %.3g not negative",
                                 static_cast<double>(it), lag.value));
        }
        f.expect(worst < 0.0, "no strictly negative candidate seen");
    }
    const double secs = sw.seconds();
    return CheckResult{"variational objective", f.ok(),
                       std::string("members at objective 0 within 1e-8; 100 "
                                   "curved candidates negative") +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 6: measurement statistics. POVM completeness and positivity over
 * 101 error values; sampled outcome frequencies against the channel
 * probabilities at three error levels times three qubit weights, a million
 * draws each, within three binomial standard deviations; the coincident
 * symmetric pair at E = 1/2. Budget 30 s.
 */
inline CheckResult check_measurement_statistics() {
    detail::Stopwatch sw;
    detail::Failures f;
    for (int i = 0; i <= 100; ++i) {
        const double E = 0.5 * static_cast<double>(i) / 100.0;
        const auto povm = povm_elements(E);
        const Mat2 sum = povm.plus + povm.minus;
        const Mat2 dev = sum - Mat2::identity();
        f.expect(dev.max_abs() <= 1e-12,
                 detail::fmt("completeness off by %.3g at E=%g", dev.max_abs(), E));
        f.expect(detail::eig_min_hermitian(povm.plus) >= -1e-12 &&
                     detail::eig_min_hermitian(povm.minus) >= -1e-12,
                 detail::fmt("negative eigenvalue at E=%g", E));
    }

    const Grid grid(kDefaultXMin, kDefaultXMax, kDefaultGridNodes);
    SweepSpec auto_spec;
    auto_spec.family = Family::gaussian;
    auto_spec.grid.mode = GridSettings::Mode::auto_sized;
    struct Config {
        GaussianParams gp;
        bool auto_grid;
    };
    // Couplings: far-split pair (E ~ 0), E = 0.2 and E ~ 0.327 at t = 1.
    const Config configs[] = {
        {GaussianParams{1.0, 16.0, 1.0}, true},
        {GaussianParams{1.0, 1.8819222895762646, 1.0}, false},
        {GaussianParams{1.0, 1.0, 1.0}, false},
    };
    const double weights[] = {0.3, 0.5, 0.7};
    int case_id = 0;
    for (const auto& cfg : configs) {
        PointParams pt;
        pt.sigma0 = cfg.gp.sigma0;
        pt.g = cfg.gp.g;
        pt.t = cfg.gp.t;
        const Grid use = cfg.auto_grid ? sweep_grid(auto_spec, pt) : grid;
        const auto pair = gaussian_post(use, cfg.gp);
        const double E = error_measure(pair.plus, pair.minus).value;
        for (double a2 : weights) {
            ++case_id;
            const auto chi = make_qubit(complex(std::sqrt(a2), 0.0),
                                        complex(std::sqrt(1.0 - a2), 0.0));
            const auto c = make_composite(chi, pair);
            const long long n = 1000000;
            const auto counts =
                sample_outcomes(c, n, 9000ULL + static_cast<std::uint64_t>(case_id));
            const double p = (1.0 - E) * a2 + E * (1.0 - a2);
            const double freq =
                static_cast<double>(counts.n_upper) / static_cast<double>(n);
            const double sigma3 = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            f.expect(counts.n_upper + counts.n_lower == n,
                     "upper + lower does not add up");
            f.expect(std::abs(freq - p) <= sigma3,
                     detail::fmt("freq %.6g vs p %.6g beyond 3 sigma", freq, p));
        }
    }
    {
        // Coincident moduli: branches split only by their kicks, E = 1/2.
        const auto pair = gaussian_post(grid, GaussianParams{1.0, 1.0, 0.0});
        const double E = error_measure(pair.plus, pair.minus).value;
        f.expect(std::abs(E - 0.5) <= 1e-6,
                 detail::fmt("coincident pair E = %.9g, expected 1/2", E));
        const auto chi = make_qubit(complex(1.0 / std::numbers::sqrt2, 0.0),
                                    complex(1.0 / std::numbers::sqrt2, 0.0));
        const auto counts = sample_outcomes(make_composite(chi, pair), 100000, 4242ULL);
        const double freq = static_cast<double>(counts.n_upper) / 100000.0;
        f.expect(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / 100000.0),
                 detail::fmt("coincident pair freq %.6g beyond 3 sigma", freq));
    }
    const double secs = sw.seconds();
    f.expect(secs < 30.0, detail::fmt("took %.2f s, budget 30 s", secs));
    return CheckResult{"measurement statistics", f.ok(),
                       std::string("POVM valid at 101 error values; 10 sampled "
                                   "configs within 3 sigma") +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

/**
 * Check 7: output contracts. The CSV header is byte-exact with 17 columns;
 * repeated runs (and different worker counts) emit identical bytes in both
 * formats; every CSV number survives a parse/reformat round trip at 12
 * significant digits; the JSON carries schema_version 1; config errors
 * throw the documented exception taxonomy.
 */
inline CheckResult check_output_contracts() {
    detail::Stopwatch sw;
    detail::Failures f;
    const std::string cfg =
        "family = gaussian\n"
        "sigma0 = 1\n"
        "g.start = 0\ng.stop = 2\ng.count = 3\n"
        "t.start = 0.5\nt.stop = 2\nt.count = 3\n";
    SweepSpec spec = parse_config_text(cfg, "inline");
    const auto res1 = run_sweep(spec);
    const auto res2 = run_sweep(spec);
    const std::string csv1 = emit_csv(spec, res1);
    const std::string csv2 = emit_csv(spec, res2);
    f.expect(csv1 == csv2, "CSV differs between identical runs");
    SweepSpec spec4 = spec;
    spec4.workers = 4;
    const std::string csv4 = emit_csv(spec4, run_sweep(spec4));
    f.expect(csv1 == csv4, "CSV depends on the worker count");

    const std::string expected_header =
        "family,sigma0,g,t,C,theta,s,kappa,M_num,absI_num,M_closed,"
        "absI_closed,E_num,gap,phase_dev,truncation,flags";
    const std::string header = csv1.substr(0, csv1.find('\n'));
    f.expect(header == expected_header, "CSV header mismatch: " + header);
    long long commas = 0;
    for (char ch : header)
        if (ch == ',') ++commas;
    f.expect(commas == 16,
             detail::fmt("header has %g columns, expected 17",
                         static_cast<double>(commas + 1)));
    f.expect(static_cast<long long>(res1.records.size()) == 9,
             detail::fmt("expected 9 records, got %g",
                         static_cast<double>(res1.records.size())));

    // Round trip: parse every numeric cell back and re-format it.
    std::size_t pos = csv1.find('\n') + 1;
    while (pos < csv1.size()) {
        const std::size_t eol = csv1.find('\n', pos);
        const std::string line = csv1.substr(pos, eol - pos);
        pos = eol + 1;
        std::size_t cell_start = 0;
        while (cell_start <= line.size()) {
            std::size_t cell_end = line.find(',', cell_start);
            if (cell_end == std::string::npos) cell_end = line.size();
            const std::string cell = line.substr(cell_start, cell_end - cell_start);
            cell_start = cell_end + 1;
            if (cell.empty() || cell == "gaussian") continue;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size()) continue;  // flags column
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            f.expect(cell == buf, "cell '" + cell + "' does not round trip");
        }
    }

    SweepSpec jspec = spec;
    jspec.format = OutputFormat::json;
    const std::string json1 = emit_json(jspec, run_sweep(jspec));
    const std::string json2 = emit_json(jspec, run_sweep(jspec));
    f.expect(json1 == json2, "JSON differs between identical runs");
    f.expect(json1.find("\"schema_version\": 1") != std::string::npos,
             "JSON lacks schema_version 1");

    SweepSpec lspec = spec;
    lspec.paper_literal = true;
    const std::string lcsv = emit_csv(lspec, run_sweep(lspec));
    f.expect(lcsv.substr(0, lcsv.find('\n')) ==
                 expected_header + ",M_closed_paper_literal,absI_closed_paper_literal",
             "comparison-variant header mismatch");

    bool syntax_ok = false, validation_ok = false;
    try {
        parse_config_text("family gaussian\n", "inline");
    } catch (const ConfigSyntaxError&) {
        syntax_ok = true;
    } catch (...) {}
    try {
        parse_config_text("family = gaussian\nsigma0 = 1\ng = 1\nt = 1\nbogus = 1\n",
                          "inline");
    } catch (const ConfigValidationError&) {
        validation_ok = true;
    } catch (...) {}
    f.expect(syntax_ok, "missing '=' did not raise a syntax error");
    f.expect(validation_ok, "unknown key did not raise a validation error");

    const double secs = sw.seconds();
    return CheckResult{"output contracts", f.ok(),
                       std::string("CSV and JSON deterministic; 12-digit round "
                                   "trip holds") +
                           detail::fmt(" (%.0f ms)", secs * 1000.0) + f.summary()};
}

inline std::vector<CheckResult> run_all() {
    return {
        check_squeezed_reference_point(), check_gaussian_closed_forms(),
        check_overlap_inequality(),       check_faithful_certificates(),
        check_variational_objective(),    check_measurement_statistics(),
        check_output_contracts(),
    };
}

}  // namespace pointerlab::checks
