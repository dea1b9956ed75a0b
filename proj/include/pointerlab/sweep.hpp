#pragma once

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pointerlab/grid.hpp"
#include "pointerlab/ideality.hpp"
#include "pointerlab/measurement.hpp"
#include "pointerlab/pointer_families.hpp"
#include "pointerlab/wavefunction.hpp"

namespace pointerlab {

/** Malformed config text (missing '=', empty key); CLI exit code 2. */
class ConfigSyntaxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** Well-formed but invalid config (unknown key, bad value); CLI exit code 3. */
class ConfigValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { gaussian, squeezed, faithful, linear_phase };
enum class EnvelopeKind { gaussian, triangular };
enum class OutputFormat { csv, json };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::squeezed: return "squeezed";
        case Family::faithful: return "faithful";
        case Family::linear_phase: return "linear_phase";
    }
    return "?";
}

inline const char* envelope_name(EnvelopeKind k) {
    return k == EnvelopeKind::gaussian ? "gaussian" : "triangular";
}

/** One sweep axis: count values linearly spaced from start to stop. */
struct ParamRange {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    double at(int i) const {
        if (count < 2) return start;
        return start + (stop - start) * static_cast<double>(i) /
                           static_cast<double>(count - 1);
    }
};

// Default evaluation window and auto-sizing node count.
inline constexpr double kDefaultXMin = -12.0;
inline constexpr double kDefaultXMax = 12.0;
inline constexpr int kDefaultGridNodes = 4801;
inline constexpr int kAutoGridNodes = 9601;

struct GridSettings {
    enum class Mode { fixed_default, explicit_window, auto_sized };
    Mode mode = Mode::fixed_default;
    double x_min = kDefaultXMin;
    double x_max = kDefaultXMax;
    int n = kDefaultGridNodes;
};

struct SweepSpec {
    Family family = Family::gaussian;
    // Axes in canonical order; for the stationary family the tilt axis is
    // either "u_prime" or the pair "gamma1_re", "gamma1_im".
    std::vector<std::pair<std::string, ParamRange>> axes;
    GridSettings grid;
    QubitState qubit{complex(1.0 / std::numbers::sqrt2, 0.0),
                     complex(1.0 / std::numbers::sqrt2, 0.0)};
    EnvelopeKind envelope = EnvelopeKind::gaussian;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;
    int workers = 1;
    long long cap = 1000000;
    bool paper_literal = false;  // also emit the as-printed closed-form variants
    bool strict_window = false;  // escalate window-guard rows to a hard stop
};

/** One evaluated parameter point; optionals stay empty where not applicable. */
struct RunRecord {
    std::string family_name;
    std::optional<double> sigma0, g, t, C, theta, s, kappa;
    std::optional<double> u_prime, gamma1_re, gamma1_im;
    std::optional<double> M_num, absI_num, M_closed, absI_closed;
    std::optional<double> E_num, gap, phase_dev, truncation;
    std::optional<double> M_closed_lit, absI_closed_lit;
    std::optional<double> arg_I;
    std::optional<double> p_upper_plus, p_lower_minus, p_plus, p_minus;
    std::vector<std::string> flags;
    std::optional<std::string> failure;
};

struct SweepResult {
    std::vector<RunRecord> records;
    long long failed = 0;
};

// ---------------------------------------------------------------------------
// Config parsing: flat "key = value" lines, '#' comments, dotted sections.

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_number(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t.empty())
        throw ConfigValidationError(key + ": empty value");
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(d))
        throw ConfigValidationError(key + ": '" + t + "' is not a finite number");
    return d;
}

inline long long parse_integer(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t.empty())
        throw ConfigValidationError(key + ": empty value");
    char* end = nullptr;
    const long long d = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size())
        throw ConfigValidationError(key + ": '" + t + "' is not an integer");
    return d;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    const std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigValidationError(key + ": '" + t + "' is not a boolean");
}

/** Raw key/value store with take-and-erase access for leftover detection. */
class KeyStore {
public:
    void put(const std::string& key, const std::string& value) {
        if (!map_.emplace(key, value).second)
            throw ConfigValidationError("duplicate key '" + key + "'");
    }
    std::optional<std::string> take(const std::string& key) {
        auto it = map_.find(key);
        if (it == map_.end()) return std::nullopt;
        std::string v = it->second;
        map_.erase(it);
        return v;
    }
    void require_empty() const {
        if (!map_.empty())
            throw ConfigValidationError("unknown key '" + map_.begin()->first + "'");
    }

private:
    std::map<std::string, std::string> map_;
};

inline std::optional<ParamRange> take_range(KeyStore& kv, const std::string& name) {
    const auto bare = kv.take(name);
    const auto start = kv.take(name + ".start");
    const auto stop = kv.take(name + ".stop");
    const auto count = kv.take(name + ".count");
    if (bare && (start || stop || count))
        throw ConfigValidationError(name + ": give either a value or a range, not both");
    if (bare) {
        const double v = parse_number(*bare, name);
        return ParamRange{v, v, 1};
    }
    if (start || stop || count) {
        if (!(start && stop && count))
            throw ConfigValidationError(name + ": a range needs start, stop and count");
        const long long c = parse_integer(*count, name + ".count");
        if (c < 1 || c > 1000000)
            throw ConfigValidationError(name + ".count: must lie in [1, 1000000]");
        return ParamRange{parse_number(*start, name + ".start"),
                          parse_number(*stop, name + ".stop"), static_cast<int>(c)};
    }
    return std::nullopt;
}

inline ParamRange require_range(KeyStore& kv, const std::string& name,
                                const char* family) {
    auto r = take_range(kv, name);
    if (!r)
        throw ConfigValidationError(std::string("family ") + family +
                                    " requires parameter '" + name + "'");
    return *r;
}

inline void require_positive(const ParamRange& r, const std::string& name) {
    if (!(r.start > 0.0) || !(r.stop > 0.0))
        throw ConfigValidationError(name + ": values must be positive");
}

inline void require_nonnegative(const ParamRange& r, const std::string& name) {
    if (r.start < 0.0 || r.stop < 0.0)
        throw ConfigValidationError(name + ": values must be nonnegative");
}

}  // namespace detail

/**
 * Parse config text. Lines are "key = value"; '#' starts a comment; blank
 * lines are skipped. Dotted keys form sections (grid.n, qubit.alpha_re,
 * output.format, sweep.cap); every parameter takes either a single value or
 * the triplet name.start / name.stop / name.count. Unknown keys, missing
 * required parameters and out-of-range values throw ConfigValidationError;
 * lines that do not parse at all throw ConfigSyntaxError.
 */
inline SweepSpec parse_config_text(const std::string& text,
                                   const std::string& origin = "config") {
    detail::KeyStore kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigSyntaxError(origin + ":" + std::to_string(lineno) +
                                    ": expected 'key = value'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigSyntaxError(origin + ":" + std::to_string(lineno) +
                                    ": empty key");
        kv.put(key, value);
    }

    SweepSpec spec;

    const auto fam = kv.take("family");
    if (!fam) throw ConfigValidationError("missing required key 'family'");
    const std::string f = detail::trim(*fam);
    if (f == "gaussian") spec.family = Family::gaussian;
    else if (f == "squeezed") spec.family = Family::squeezed;
    else if (f == "faithful") spec.family = Family::faithful;
    else if (f == "linear_phase") spec.family = Family::linear_phase;
    else throw ConfigValidationError("family: unknown family '" + f + "'");

    using detail::require_range;
    using detail::take_range;
    switch (spec.family) {
        case Family::gaussian:
        case Family::squeezed: {
            const char* fname = family_name(spec.family);
            auto sigma0 = require_range(kv, "sigma0", fname);
            auto g = require_range(kv, "g", fname);
            auto t = require_range(kv, "t", fname);
            detail::require_positive(sigma0, "sigma0");
            detail::require_nonnegative(g, "g");
            detail::require_nonnegative(t, "t");
            spec.axes = {{"sigma0", sigma0}, {"g", g}, {"t", t}};
            if (spec.family == Family::squeezed)
                spec.axes.emplace_back("C", require_range(kv, "C", fname));
            break;
        }
        case Family::faithful: {
            auto sigma0 = require_range(kv, "sigma0", "faithful");
            auto theta = require_range(kv, "theta", "faithful");
            auto s = require_range(kv, "s", "faithful");
            detail::require_positive(sigma0, "sigma0");
            detail::require_positive(s, "s");
            spec.axes = {{"sigma0", sigma0}, {"theta", theta}, {"s", s}};
            auto uprime = take_range(kv, "u_prime");
            auto g1re = take_range(kv, "gamma1_re");
            auto g1im = take_range(kv, "gamma1_im");
            if (uprime && (g1re || g1im))
                throw ConfigValidationError(
                    "faithful: u_prime conflicts with gamma1_re / gamma1_im");
            if (uprime) {
                spec.axes.emplace_back("u_prime", *uprime);
            } else if (g1re) {
                spec.axes.emplace_back("gamma1_re", *g1re);
                spec.axes.emplace_back("gamma1_im",
                                       g1im.value_or(ParamRange{0.0, 0.0, 1}));
            } else {
                throw ConfigValidationError(
                    "faithful requires parameter 'u_prime' or 'gamma1_re'");
            }
            break;
        }
        case Family::linear_phase: {
            auto sigma0 = require_range(kv, "sigma0", "linear_phase");
            auto kappa = require_range(kv, "kappa", "linear_phase");
            auto s = require_range(kv, "s", "linear_phase");
            detail::require_positive(sigma0, "sigma0");
            detail::require_positive(s, "s");
            spec.axes = {{"sigma0", sigma0}, {"kappa", kappa}, {"s", s}};
            break;
        }
    }

    if (const auto env = kv.take("envelope")) {
        if (spec.family != Family::faithful && spec.family != Family::linear_phase)
            throw ConfigValidationError(
                "envelope: only the faithful and linear_phase families take one");
        const std::string e = detail::trim(*env);
        if (e == "gaussian") spec.envelope = EnvelopeKind::gaussian;
        else if (e == "triangular") spec.envelope = EnvelopeKind::triangular;
        else throw ConfigValidationError("envelope: unknown envelope '" + e + "'");
    }

    const auto gx0 = kv.take("grid.x_min");
    const auto gx1 = kv.take("grid.x_max");
    const auto gn = kv.take("grid.n");
    const auto ga = kv.take("grid.auto");
    const bool auto_grid = ga ? detail::parse_bool(*ga, "grid.auto") : false;
    if (auto_grid && (gx0 || gx1 || gn))
        throw ConfigValidationError("grid.auto conflicts with an explicit window");
    if (gx0 || gx1 || gn) {
        if (!(gx0 && gx1 && gn))
            throw ConfigValidationError(
                "grid: an explicit window needs x_min, x_max and n");
        spec.grid.mode = GridSettings::Mode::explicit_window;
        spec.grid.x_min = detail::parse_number(*gx0, "grid.x_min");
        spec.grid.x_max = detail::parse_number(*gx1, "grid.x_max");
        const long long n = detail::parse_integer(*gn, "grid.n");
        if (!(spec.grid.x_min < spec.grid.x_max))
            throw ConfigValidationError("grid.x_min must be below grid.x_max");
        if (n < 3 || n > 10000000 || n % 2 == 0)
            throw ConfigValidationError("grid.n must be odd and in [3, 10000001]");
        spec.grid.n = static_cast<int>(n);
    } else if (auto_grid) {
        spec.grid.mode = GridSettings::Mode::auto_sized;
        spec.grid.n = kAutoGridNodes;
    }

    const auto qar = kv.take("qubit.alpha_re");
    const auto qai = kv.take("qubit.alpha_im");
    const auto qbr = kv.take("qubit.beta_re");
    const auto qbi = kv.take("qubit.beta_im");
    if (qar || qai || qbr || qbi) {
        const complex alpha(qar ? detail::parse_number(*qar, "qubit.alpha_re") : 0.0,
                            qai ? detail::parse_number(*qai, "qubit.alpha_im") : 0.0);
        const complex beta(qbr ? detail::parse_number(*qbr, "qubit.beta_re") : 0.0,
                           qbi ? detail::parse_number(*qbi, "qubit.beta_im") : 0.0);
        const double n2 = std::norm(alpha) + std::norm(beta);
        if (std::abs(n2 - 1.0) > 1e-6)
            throw ConfigValidationError(
                "qubit: amplitudes must be normalized within 1e-6");
        spec.qubit = normalized_qubit(alpha, beta);
    }

    if (const auto fmt = kv.take("output.format")) {
        const std::string v = detail::trim(*fmt);
        if (v == "csv") spec.format = OutputFormat::csv;
        else if (v == "json") spec.format = OutputFormat::json;
        else throw ConfigValidationError("output.format: must be csv or json");
    }
    if (const auto seed = kv.take("seed")) {
        const long long v = detail::parse_integer(*seed, "seed");
        if (v < 0) throw ConfigValidationError("seed: must be nonnegative");
        spec.seed = static_cast<std::uint64_t>(v);
    }
    if (const auto w = kv.take("workers")) {
        const long long v = detail::parse_integer(*w, "workers");
        if (v < 1 || v > 256)
            throw ConfigValidationError("workers: must lie in [1, 256]");
        spec.workers = static_cast<int>(v);
    }
    if (const auto cap = kv.take("sweep.cap")) {
        const long long v = detail::parse_integer(*cap, "sweep.cap");
        if (v < 1 || v > 1000000)
            throw ConfigValidationError("sweep.cap: must lie in [1, 1000000]");
        spec.cap = v;
    }

    kv.require_empty();

    long long total = 1;
    for (const auto& [name, r] : spec.axes) {
        total *= r.count;
        if (total > spec.cap)
            throw ConfigValidationError(
                "sweep size exceeds the cap of " + std::to_string(spec.cap) +
                " points");
    }
    return spec;
}

/** Parse a config file; throws ConfigValidationError when it cannot be read. */
inline SweepSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Point enumeration and evaluation.

/** Axis values of a single point, resolved to plain parameters. */
struct PointParams {
    double sigma0 = 1.0, g = 0.0, t = 0.0, C = 0.0;
    double theta = 0.0, s = 1.0, kappa = 0.0;
    double gamma1_re = -0.5, gamma1_im = 0.0;
    bool tilt_from_uprime = false;
    double u_prime_in = 0.0;
};

/** Cartesian product of the axes, row major: the last axis varies fastest. */
inline std::vector<PointParams> enumerate_points(const SweepSpec& spec) {
    long long total = 1;
    for (const auto& [name, r] : spec.axes) total *= r.count;
    if (total > spec.cap)
        throw ConfigValidationError("sweep size exceeds the cap");
    std::vector<PointParams> pts;
    pts.reserve(static_cast<std::size_t>(total));
    const int naxes = static_cast<int>(spec.axes.size());
    for (long long flat = 0; flat < total; ++flat) {
        long long rem = flat;
        std::vector<int> idx(static_cast<std::size_t>(naxes), 0);
        for (int a = naxes - 1; a >= 0; --a) {
            idx[static_cast<std::size_t>(a)] =
                static_cast<int>(rem % spec.axes[static_cast<std::size_t>(a)].second.count);
            rem /= spec.axes[static_cast<std::size_t>(a)].second.count;
        }
        PointParams pt;
        for (int a = 0; a < naxes; ++a) {
            const auto& [name, r] = spec.axes[static_cast<std::size_t>(a)];
            const double v = r.at(idx[static_cast<std::size_t>(a)]);
            if (name == "sigma0") pt.sigma0 = v;
            else if (name == "g") pt.g = v;
            else if (name == "t") pt.t = v;
            else if (name == "C") pt.C = v;
            else if (name == "theta") pt.theta = v;
            else if (name == "s") pt.s = v;
            else if (name == "kappa") pt.kappa = v;
            else if (name == "u_prime") {
                pt.tilt_from_uprime = true;
                pt.u_prime_in = v;
                pt.gamma1_re = gamma1_for_tilt(v);
                pt.gamma1_im = 0.0;
            } else if (name == "gamma1_re") pt.gamma1_re = v;
            else if (name == "gamma1_im") pt.gamma1_im = v;
        }
        pts.push_back(pt);
    }
    return pts;
}

/**
 * Window for one point. Fixed and explicit modes return the configured
 * window; auto mode centers on the pair and pads to about nine effective
 * widths, wide enough that the 5% boundary guard sees < 1e-8 of mass (the
 * 1.2 factor keeps the guard band clear even when the branch separation
 * dominates the width).
 */
inline Grid sweep_grid(const SweepSpec& spec, const PointParams& pt) {
    if (spec.grid.mode != GridSettings::Mode::auto_sized)
        return Grid(spec.grid.x_min, spec.grid.x_max, spec.grid.n);
    const double s02 = pt.sigma0 * pt.sigma0;
    double half = 12.0;
    switch (spec.family) {
        case Family::gaussian: {
            const double wt = pt.sigma0 * std::sqrt(1.0 + pt.t * pt.t / (4.0 * s02 * s02));
            half = 1.2 * (0.5 * pt.g * pt.t) + 9.0 * std::max(pt.sigma0, wt);
            break;
        }
        case Family::squeezed: {
            const double k = pt.C + pt.t / (2.0 * s02);
            const double w0 = pt.sigma0 * std::sqrt(1.0 + pt.C * pt.C);
            const double wt = pt.sigma0 * std::sqrt(1.0 + k * k);
            half = 1.2 * (0.5 * pt.g * pt.t) + 9.0 * std::max(w0, wt);
            break;
        }
        case Family::faithful: {
            const double uprime =
                2.0 * faithful_u(FaithfulParams{complex(pt.gamma1_re, pt.gamma1_im),
                                                pt.theta, pt.s, 0})
                          .real();
            const double core = spec.envelope == EnvelopeKind::gaussian
                                    ? 9.0 * pt.sigma0
                                    : 4.0 * pt.sigma0;
            half = core + 2.0 * std::abs(uprime) * s02;
            break;
        }
        case Family::linear_phase: {
            const double core = spec.envelope == EnvelopeKind::gaussian
                                    ? 9.0 * pt.sigma0
                                    : 4.0 * pt.sigma0;
            half = 1.2 * pt.s + core;
            break;
        }
    }
    return Grid(-half, half, kAutoGridNodes);
}

namespace detail {

inline std::string sanitize_reason(const std::string& msg) {
    std::string out;
    out.reserve(msg.size());
    for (char c : msg) {
        if (c == ',' || c == ';' || c == '\n' || c == '\r' || c == '"')
            out += '_';
        else
            out += c;
    }
    if (out.size() > 160) out.resize(160);
    return out;
}

inline Wavefunction make_envelope(const Grid& g, EnvelopeKind kind, double sigma0) {
    return kind == EnvelopeKind::gaussian ? gaussian_envelope(g, sigma0)
                                          : triangular_envelope(g, 3.0 * sigma0);
}

}  // namespace detail

// Flag tolerances: quadrature and closed form must agree to one part in 1e4
// (with a small absolute floor for overlaps at the rounding level).
inline constexpr double kClosedFormRelTol = 1e-4;
inline constexpr double kClosedFormAbsFloor = 1e-8;

/** Evaluate one point; never throws unless the spec asks for strict windows. */
inline RunRecord evaluate_point(const SweepSpec& spec, const PointParams& pt) {
    RunRecord rec;
    rec.family_name = family_name(spec.family);
    switch (spec.family) {
        case Family::gaussian:
            rec.sigma0 = pt.sigma0; rec.g = pt.g; rec.t = pt.t;
            break;
        case Family::squeezed:
            rec.sigma0 = pt.sigma0; rec.g = pt.g; rec.t = pt.t; rec.C = pt.C;
            break;
        case Family::faithful:
            rec.sigma0 = pt.sigma0; rec.theta = pt.theta; rec.s = pt.s;
            rec.gamma1_re = pt.gamma1_re; rec.gamma1_im = pt.gamma1_im;
            break;
        case Family::linear_phase:
            rec.sigma0 = pt.sigma0; rec.kappa = pt.kappa; rec.s = pt.s;
            break;
    }
    try {
        const Grid grid = sweep_grid(spec, pt);
        PointerPair pair = [&]() -> PointerPair {
            switch (spec.family) {
                case Family::gaussian:
                    return gaussian_post(grid, GaussianParams{pt.sigma0, pt.g, pt.t});
                case Family::squeezed:
                    return squeezed_post(grid,
                                         SqueezedParams{pt.sigma0, pt.g, pt.t, pt.C});
                case Family::faithful: {
                    const FaithfulParams fp{complex(pt.gamma1_re, pt.gamma1_im),
                                            pt.theta, pt.s, 0};
                    return faithful_post_states(
                        detail::make_envelope(grid, spec.envelope, pt.sigma0), fp);
                }
                case Family::linear_phase:
                default: {
                    // Channel order: plus is the branch shifted toward +x.
                    auto env = [&](double x) -> double {
                        if (spec.envelope == EnvelopeKind::gaussian)
                            return std::exp(-x * x / (4.0 * pt.sigma0 * pt.sigma0));
                        const double tv = 1.0 - std::abs(x) / (3.0 * pt.sigma0);
                        return tv > 0.0 ? tv : 0.0;
                    };
                    auto make = [&](double sign) {
                        auto b = normalize(
                            Wavefunction::sampled(grid, [&, sign](double x) {
                                const double xs = x - sign * pt.s;
                                const double ph = pt.kappa * xs;
                                return env(xs) *
                                       complex(std::cos(ph), std::sin(ph));
                            }));
                        require_window(b, "linear_phase pair");
                        return b;
                    };
                    return PointerPair{make(+1.0), make(-1.0)};
                }
            }
        }();

        if (spec.family == Family::faithful)
            rec.u_prime = 2.0 *
                          faithful_u(FaithfulParams{
                              complex(pt.gamma1_re, pt.gamma1_im), pt.theta, pt.s, 0})
                              .real();

        const complex I = formal_overlap(pair.plus, pair.minus);
        rec.M_num = operational_overlap(pair.plus, pair.minus);
        rec.absI_num = std::abs(I);
        rec.arg_I = std::arg(I);
        rec.gap = *rec.M_num - *rec.absI_num;
        rec.E_num = error_measure(pair.plus, pair.minus).value;
        try {
            rec.phase_dev =
                faithfulness_certificate(pair.plus, pair.minus).phase_dev;
        } catch (const std::invalid_argument&) {
            rec.phase_dev = 0.0;  // no overlap support: M = |I| = 0 trivially
        }
        rec.truncation = std::max(boundary_mass(pair.plus, kGuardFraction),
                                  boundary_mass(pair.minus, kGuardFraction));

        if (spec.family == Family::gaussian) {
            const auto cf = gaussian_closed_forms(GaussianParams{pt.sigma0, pt.g, pt.t});
            rec.M_closed = cf.M;
            rec.absI_closed = cf.absI;
            rec.M_closed_lit = cf.M_paper_literal;
            rec.absI_closed_lit = cf.absI;
        } else if (spec.family == Family::squeezed) {
            const auto cf =
                squeezed_closed_forms(SqueezedParams{pt.sigma0, pt.g, pt.t, pt.C});
            rec.M_closed = cf.M;
            rec.absI_closed = cf.absI;
            rec.M_closed_lit = cf.M;
            rec.absI_closed_lit = cf.absI_paper_literal;
        }

        if (*rec.truncation > kGuardMass) {
            if (spec.strict_window)
                throw WindowError("window guard exceeded", *rec.truncation);
            rec.flags.push_back("window_guard");
        }
        if (rec.M_closed) {
            auto off = [](double num, double closed) {
                return std::abs(num - closed) >
                       kClosedFormRelTol * std::abs(closed) + kClosedFormAbsFloor;
            };
            if (off(*rec.M_num, *rec.M_closed) || off(*rec.absI_num, *rec.absI_closed))
                rec.flags.push_back("closedform_mismatch");
        }
        if (*rec.absI_num < 0.01 && *rec.M_num > 0.99)
            rec.flags.push_back("formally_ideal_operationally_nonideal");

        if (*rec.E_num >= 0.0 && *rec.E_num <= 0.5) {
            const auto ch = channel_probabilities(spec.qubit, *rec.E_num);
            rec.p_upper_plus = ch.upper_plus;
            rec.p_lower_minus = ch.lower_minus;
            const auto pr = povm_probabilities(spec.qubit, povm_elements(*rec.E_num));
            rec.p_plus = pr.plus;
            rec.p_minus = pr.minus;
        }
    } catch (const WindowError& we) {
        if (spec.strict_window) throw;
        rec.flags.insert(rec.flags.begin(), "window_guard");
        if (we.mass() > 0.0) rec.truncation = we.mass();
        rec.failure = we.what();
    } catch (const std::exception& e) {
        rec.flags.assign({"point_failed:" + detail::sanitize_reason(e.what())});
        rec.failure = e.what();
    }
    return rec;
}

/**
 * Run every point of the sweep. Records land in enumeration order whatever
 * the worker count, so output bytes depend only on the spec. Per-point
 * failures are recorded in their row and never abort the run, except that
 * strict_window escalates the first window-guard hit to a WindowError.
 */
inline SweepResult run_sweep(const SweepSpec& spec) {
    const auto points = enumerate_points(spec);
    SweepResult res;
    res.records.resize(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            try {
                res.records[i] = evaluate_point(spec, points[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    const int nw = std::max(1, std::min(spec.workers, 64));
    std::vector<std::thread> pool;
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    for (const auto& r : res.records)
        if (r.failure) ++res.failed;
    return res;
}

// ---------------------------------------------------------------------------
// Emitters. Both formats print numbers with %.12g, which round-trips the
// 12 significant digits the schema promises, and both are byte-deterministic
// for a given spec.

inline const char* kCsvHeader =
    "family,sigma0,g,t,C,theta,s,kappa,M_num,absI_num,M_closed,absI_closed,"
    "E_num,gap,phase_dev,truncation,flags";

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string opt_cell(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_number(*v) : std::string();
}

inline std::string json_number(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_number(*v) : std::string("null");
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; out += c; }
        else if (c == '\n') out += "\\n";
        else if (c == '\r') out += "\\r";
        else if (c == '\t') out += "\\t";
        else if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
        } else out += c;
    }
    return out;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) out += ';';
        out += flags[i];
    }
    return out;
}

}  // namespace detail

inline std::string emit_csv(const SweepSpec& spec, const SweepResult& res) {
    std::string out = kCsvHeader;
    if (spec.paper_literal)
        out += ",M_closed_paper_literal,absI_closed_paper_literal";
    out += '\n';
    for (const auto& r : res.records) {
        using detail::opt_cell;
        out += r.family_name;
        for (const auto* v :
             {&r.sigma0, &r.g, &r.t, &r.C, &r.theta, &r.s, &r.kappa, &r.M_num,
              &r.absI_num, &r.M_closed, &r.absI_closed, &r.E_num, &r.gap,
              &r.phase_dev, &r.truncation}) {
            out += ',';
            out += opt_cell(*v);
        }
        out += ',';
        out += detail::join_flags(r.flags);
        if (spec.paper_literal) {
            out += ',';
            out += opt_cell(r.M_closed_lit);
            out += ',';
            out += opt_cell(r.absI_closed_lit);
        }
        out += '\n';
    }
    return out;
}

inline std::string emit_json(const SweepSpec& spec, const SweepResult& res) {
    using detail::json_escape;
    using detail::json_number;
    std::string o;
    o += "{\n  \"schema_version\": 1,\n  \"spec\": {\n";
    o += std::string("    \"family\": \"") + family_name(spec.family) + "\",\n";
    o += std::string("    \"envelope\": \"") + envelope_name(spec.envelope) + "\",\n";
    o += "    \"seed\": " + std::to_string(spec.seed) + ",\n";
    o += "    \"workers\": " + std::to_string(spec.workers) + ",\n";
    o += "    \"cap\": " + std::to_string(spec.cap) + ",\n";
    o += std::string("    \"format\": \"") +
         (spec.format == OutputFormat::csv ? "csv" : "json") + "\",\n";
    o += std::string("    \"paper_literal\": ") +
         (spec.paper_literal ? "true" : "false") + ",\n";
    o += std::string("    \"strict_window\": ") +
         (spec.strict_window ? "true" : "false") + ",\n";
    const char* mode =
        spec.grid.mode == GridSettings::Mode::fixed_default
            ? "default"
            : (spec.grid.mode == GridSettings::Mode::explicit_window ? "explicit"
                                                                     : "auto");
    o += std::string("    \"grid\": {\"mode\": \"") + mode + "\", ";
    if (spec.grid.mode == GridSettings::Mode::auto_sized)
        o += "\"x_min\": null, \"x_max\": null, ";
    else
        o += "\"x_min\": " + detail::format_number(spec.grid.x_min) +
             ", \"x_max\": " + detail::format_number(spec.grid.x_max) + ", ";
    o += "\"n\": " + std::to_string(spec.grid.n) + "},\n";
    o += "    \"qubit\": {\"alpha_re\": " +
         detail::format_number(spec.qubit.alpha.real()) +
         ", \"alpha_im\": " + detail::format_number(spec.qubit.alpha.imag()) +
         ", \"beta_re\": " + detail::format_number(spec.qubit.beta.real()) +
         ", \"beta_im\": " + detail::format_number(spec.qubit.beta.imag()) + "},\n";
    o += "    \"params\": {";
    for (std::size_t i = 0; i < spec.axes.size(); ++i) {
        const auto& [name, r] = spec.axes[i];
        if (i) o += ", ";
        o += "\"" + name + "\": {\"start\": " + detail::format_number(r.start) +
             ", \"stop\": " + detail::format_number(r.stop) +
             ", \"count\": " + std::to_string(r.count) + "}";
    }
    o += "}\n  },\n  \"records\": [";
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& r = res.records[i];
        o += (i ? ",\n    {" : "\n    {");
        o += "\"family\": \"" + r.family_name + "\"";
        auto field = [&](const char* name, const std::optional<double>& v) {
            o += std::string(", \"") + name + "\": " + json_number(v);
        };
        field("sigma0", r.sigma0);
        field("g", r.g);
        field("t", r.t);
        field("C", r.C);
        field("theta", r.theta);
        field("s", r.s);
        field("kappa", r.kappa);
        field("u_prime", r.u_prime);
        field("gamma1_re", r.gamma1_re);
        field("gamma1_im", r.gamma1_im);
        field("M_num", r.M_num);
        field("absI_num", r.absI_num);
        field("M_closed", r.M_closed);
        field("absI_closed", r.absI_closed);
        if (spec.paper_literal) {
            field("M_closed_paper_literal", r.M_closed_lit);
            field("absI_closed_paper_literal", r.absI_closed_lit);
        }
        field("E_num", r.E_num);
        field("gap", r.gap);
        field("phase_dev", r.phase_dev);
        field("truncation", r.truncation);
        field("arg_I", r.arg_I);
        if (r.p_upper_plus) {
            o += ", \"probabilities\": {\"p_upper_plus\": " +
                 json_number(r.p_upper_plus) +
                 ", \"p_lower_minus\": " + json_number(r.p_lower_minus) +
                 ", \"p_plus\": " + json_number(r.p_plus) +
                 ", \"p_minus\": " + json_number(r.p_minus) + "}";
        } else {
            o += ", \"probabilities\": null";
        }
        o += ", \"flags\": [";
        for (std::size_t fi = 0; fi < r.flags.size(); ++fi) {
            if (fi) o += ", ";
            o += "\"" + json_escape(r.flags[fi]) + "\"";
        }
        o += "]";
        o += ", \"failure\": ";
        o += r.failure ? "\"" + json_escape(*r.failure) + "\"" : "null";
        o += "}";
    }
    o += "\n  ]\n}\n";
    return o;
}

inline std::string emit(const SweepSpec& spec, const SweepResult& res) {
    return spec.format == OutputFormat::csv ? emit_csv(spec, res)
                                            : emit_json(spec, res);
}

}  // namespace pointerlab
