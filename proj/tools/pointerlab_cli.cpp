// Command-line front end: single-point family evaluations, config-driven
// sweeps, pointer-pair certification and the built-in reference checks.
//
// Exit codes: 0 success, 1 runtime failure (including failed reference
// checks), 2 syntax error in flags or input files, 3 validation error,
// 4 evaluation failed (every point, or a strict window stop).

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "pointerlab/ideality.hpp"
#include "pointerlab/pair_io.hpp"
#include "pointerlab/reference_checks.hpp"
#include "pointerlab/sweep.hpp"

namespace {

using namespace pointerlab;

struct OutputOptions {
    std::string format = "csv";
    std::string out;
    int workers = 1;
    std::uint64_t seed = 1;
    bool paper_literal = false;
    bool strict_window = false;
    CLI::Option* format_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    o.format_opt = cmd->add_option("--format", o.format, "Output format")
                       ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "Write to this path instead of stdout");
    o.workers_opt = cmd->add_option("--workers", o.workers, "Worker threads")
                        ->check(CLI::Range(1, 256));
    o.seed_opt = cmd->add_option("--seed", o.seed, "Seed echoed into outputs");
    cmd->add_flag("--paper-literal", o.paper_literal,
                  "Also emit the comparison closed-form variant columns");
    cmd->add_flag("--strict-window", o.strict_window,
                  "Escalate window-guard hits to a hard failure");
}

struct GridOptions {
    bool auto_grid = false;
    double x_min = kDefaultXMin;
    double x_max = kDefaultXMax;
    int nodes = kDefaultGridNodes;
    CLI::Option* xmin_opt = nullptr;
    CLI::Option* xmax_opt = nullptr;
    CLI::Option* nodes_opt = nullptr;
};

void add_grid_options(CLI::App* cmd, GridOptions& g) {
    cmd->add_flag("--grid-auto", g.auto_grid,
                  "Size the window per point instead of the default one");
    g.xmin_opt = cmd->add_option("--x-min", g.x_min, "Window lower edge");
    g.xmax_opt = cmd->add_option("--x-max", g.x_max, "Window upper edge");
    g.nodes_opt = cmd->add_option("--nodes", g.nodes, "Node count (odd)");
}

GridSettings make_grid_settings(const GridOptions& g) {
    const bool any_explicit =
        g.xmin_opt->count() || g.xmax_opt->count() || g.nodes_opt->count();
    GridSettings out;
    if (g.auto_grid && any_explicit)
        throw ConfigValidationError("--grid-auto conflicts with an explicit window");
    if (any_explicit) {
        if (!(g.xmin_opt->count() && g.xmax_opt->count() && g.nodes_opt->count()))
            throw ConfigValidationError(
                "an explicit window needs --x-min, --x-max and --nodes");
        if (!(g.x_min < g.x_max))
            throw ConfigValidationError("--x-min must be below --x-max");
        if (g.nodes < 3 || g.nodes % 2 == 0)
            throw ConfigValidationError("--nodes must be odd and at least 3");
        out.mode = GridSettings::Mode::explicit_window;
        out.x_min = g.x_min;
        out.x_max = g.x_max;
        out.n = g.nodes;
    } else if (g.auto_grid) {
        out.mode = GridSettings::Mode::auto_sized;
        out.n = kAutoGridNodes;
    }
    return out;
}

void apply_output_options(SweepSpec& spec, const OutputOptions& o) {
    if (o.format_opt->count())
        spec.format = o.format == "json" ? OutputFormat::json : OutputFormat::csv;
    if (o.workers_opt->count()) spec.workers = o.workers;
    if (o.seed_opt->count()) spec.seed = o.seed;
    if (o.paper_literal) spec.paper_literal = true;
    if (o.strict_window) spec.strict_window = true;
}

int write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return 1;
    }
    out << text;
    return out ? 0 : 1;
}

int run_and_emit(SweepSpec spec, const OutputOptions& o) {
    apply_output_options(spec, o);
    const SweepResult res = run_sweep(spec);
    const int rc = write_text(emit(spec, res), o.out);
    if (rc != 0) return rc;
    if (!res.records.empty() &&
        res.failed == static_cast<long long>(res.records.size())) {
        std::cerr << "error: every point failed; see the flags column\n";
        return 4;
    }
    return 0;
}

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int run_certify(const std::string& path, double mass_floor,
                const std::string& format, const std::string& out_path) {
    const LoadedPair lp = load_pair_csv_file(path);
    const Grid& g = lp.plus.grid();
    const double np = norm(lp.plus), nm = norm(lp.minus);
    // Reported measures assume unit-norm states; the raw norms stay in the
    // report as load diagnostics.
    const Wavefunction plus = normalize(lp.plus);
    const Wavefunction minus = normalize(lp.minus);
    const double M = operational_overlap(plus, minus);
    const complex I = formal_overlap(plus, minus);
    const auto cert = faithfulness_certificate(plus, minus, mass_floor);
    std::optional<double> E;
    try {
        E = error_measure(plus, minus).value;
    } catch (const std::invalid_argument&) {
        // no x = 0 node in the file; the error measure is undefined
    }
    std::string text;
    if (format == "json") {
        text += "{\n  \"schema_version\": 1,\n  \"certify\": {\n";
        text += "    \"nodes\": " + std::to_string(g.size()) + ",\n";
        text += "    \"x_min\": " + fmt12(g.x_min()) +
                ", \"x_max\": " + fmt12(g.x_max()) + ",\n";
        text += "    \"norm_plus\": " + fmt12(np) +
                ", \"norm_minus\": " + fmt12(nm) + ",\n";
        text += "    \"M\": " + fmt12(M) + ",\n";
        text += "    \"absI\": " + fmt12(std::abs(I)) + ",\n";
        text += "    \"arg_I\": " + fmt12(std::arg(I)) + ",\n";
        text += "    \"gap\": " + fmt12(M - std::abs(I)) + ",\n";
        text += "    \"E\": " + (E ? fmt12(*E) : std::string("null")) + ",\n";
        text += "    \"mass_floor\": " + fmt12(mass_floor) + ",\n";
        text += "    \"support_nodes\": " + std::to_string(cert.support_nodes) + ",\n";
        text += "    \"phase_dev\": " + fmt12(cert.phase_dev) + ",\n";
        text += "    \"mean_phase\": " + fmt12(cert.mean_phase) + ",\n";
        text += std::string("    \"faithful\": ") +
                (cert.is_faithful ? "true" : "false") + "\n  }\n}\n";
    } else {
        text += "nodes: " + std::to_string(g.size()) + "\n";
        text += "window: [" + fmt12(g.x_min()) + ", " + fmt12(g.x_max()) + "]\n";
        text += "norm_plus: " + fmt12(np) + "\n";
        text += "norm_minus: " + fmt12(nm) + "\n";
        text += "M: " + fmt12(M) + "\n";
        text += "absI: " + fmt12(std::abs(I)) + "\n";
        text += "arg_I: " + fmt12(std::arg(I)) + "\n";
        text += "gap: " + fmt12(M - std::abs(I)) + "\n";
        text += "E: " + (E ? fmt12(*E) : std::string("n/a (no x = 0 node)")) + "\n";
        text += "mass_floor: " + fmt12(mass_floor) + "\n";
        text += "support_nodes: " + std::to_string(cert.support_nodes) + "\n";
        text += "phase_dev: " + fmt12(cert.phase_dev) + "\n";
        text += "mean_phase: " + fmt12(cert.mean_phase) + "\n";
        text += std::string("faithful: ") + (cert.is_faithful ? "yes" : "no") + "\n";
    }
    return write_text(text, out_path);
}

int run_reference_checks() {
    const auto results = checks::run_all();
    bool all = true;
    int i = 0;
    for (const auto& r : results) {
        ++i;
        std::cout << (r.passed ? "[PASS]" : "[FAIL]") << " check " << i << "/"
                  << results.size() << ": " << r.name << ": " << r.detail
                  << "\n";
        all = all && r.passed;
    }
    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pointerlab: overlap measures, error rates and faithfulness "
        "certificates for post-interaction pointer states"};
    app.require_subcommand(1);
    std::function<int()> action;

    // gaussian
    {
        auto* cmd = app.add_subcommand(
            "gaussian", "Evaluate one minimum-uncertainty pointer pair");
        auto sigma0 = std::make_shared<double>(1.0);
        auto g = std::make_shared<double>(1.0);
        auto t = std::make_shared<double>(1.0);
        cmd->add_option("--sigma0", *sigma0, "Initial width")->required();
        cmd->add_option("--g", *g, "Coupling")->required();
        cmd->add_option("--t", *t, "Interaction time")->required();
        auto out = std::make_shared<OutputOptions>();
        auto grid = std::make_shared<GridOptions>();
        add_output_options(cmd, *out);
        add_grid_options(cmd, *grid);
        cmd->callback([=, &action] {
            action = [=] {
                SweepSpec spec;
                spec.family = Family::gaussian;
                spec.axes = {{"sigma0", {*sigma0, *sigma0, 1}},
                             {"g", {*g, *g, 1}},
                             {"t", {*t, *t, 1}}};
                spec.grid = make_grid_settings(*grid);
                return run_and_emit(spec, *out);
            };
        });
    }

    // squeezed
    {
        auto* cmd = app.add_subcommand(
            "squeezed", "Evaluate one squeezed pointer pair");
        auto sigma0 = std::make_shared<double>(1.0);
        auto g = std::make_shared<double>(1.0);
        auto t = std::make_shared<double>(1.0);
        auto C = std::make_shared<double>(0.0);
        cmd->add_option("--sigma0", *sigma0, "Width scale")->required();
        cmd->add_option("--g", *g, "Coupling")->required();
        cmd->add_option("--t", *t, "Interaction time")->required();
        cmd->add_option("--C", *C, "Squeezing parameter")->required();
        auto out = std::make_shared<OutputOptions>();
        auto grid = std::make_shared<GridOptions>();
        add_output_options(cmd, *out);
        add_grid_options(cmd, *grid);
        cmd->callback([=, &action] {
            action = [=] {
                SweepSpec spec;
                spec.family = Family::squeezed;
                spec.axes = {{"sigma0", {*sigma0, *sigma0, 1}},
                             {"g", {*g, *g, 1}},
                             {"t", {*t, *t, 1}},
                             {"C", {*C, *C, 1}}};
                spec.grid = make_grid_settings(*grid);
                return run_and_emit(spec, *out);
            };
        });
    }

    // faithful
    {
        auto* cmd = app.add_subcommand(
            "faithful", "Evaluate one stationary-family pointer pair");
        auto sigma0 = std::make_shared<double>(1.0);
        auto theta = std::make_shared<double>(0.0);
        auto s = std::make_shared<double>(1.0);
        auto uprime = std::make_shared<double>(0.0);
        auto g1re = std::make_shared<double>(-0.5);
        auto g1im = std::make_shared<double>(0.0);
        auto envelope = std::make_shared<std::string>("gaussian");
        cmd->add_option("--sigma0", *sigma0, "Envelope width scale");
        cmd->add_option("--theta", *theta, "Recursion phase angle")->required();
        cmd->add_option("--s", *s, "Half shift")->required();
        auto* up_opt = cmd->add_option("--u-prime", *uprime, "Tilt exponent");
        auto* re_opt = cmd->add_option("--gamma1-re", *g1re, "Re gamma1");
        auto* im_opt = cmd->add_option("--gamma1-im", *g1im, "Im gamma1");
        cmd->add_option("--envelope", *envelope, "Seed envelope shape")
            ->check(CLI::IsMember({"gaussian", "triangular"}));
        auto out = std::make_shared<OutputOptions>();
        auto grid = std::make_shared<GridOptions>();
        add_output_options(cmd, *out);
        add_grid_options(cmd, *grid);
        cmd->callback([=, &action] {
            action = [=] {
                SweepSpec spec;
                spec.family = Family::faithful;
                spec.axes = {{"sigma0", {*sigma0, *sigma0, 1}},
                             {"theta", {*theta, *theta, 1}},
                             {"s", {*s, *s, 1}}};
                if (up_opt->count() && (re_opt->count() || im_opt->count()))
                    throw ConfigValidationError(
                        "--u-prime conflicts with --gamma1-re / --gamma1-im");
                if (up_opt->count())
                    spec.axes.push_back({"u_prime", {*uprime, *uprime, 1}});
                else {
                    spec.axes.push_back({"gamma1_re", {*g1re, *g1re, 1}});
                    spec.axes.push_back({"gamma1_im", {*g1im, *g1im, 1}});
                }
                spec.envelope = *envelope == "triangular"
                                    ? EnvelopeKind::triangular
                                    : EnvelopeKind::gaussian;
                spec.grid = make_grid_settings(*grid);
                return run_and_emit(spec, *out);
            };
        });
    }

    // certify
    {
        auto* cmd = app.add_subcommand(
            "certify", "Certify a pointer pair read from a CSV file");
        auto file = std::make_shared<std::string>();
        auto floor = std::make_shared<double>(1e-6);
        auto format = std::make_shared<std::string>("text");
        auto out = std::make_shared<std::string>();
        cmd->add_option("file", *file, "CSV with x,re_plus,im_plus,re_minus,im_minus")
            ->required();
        cmd->add_option("--mass-floor", *floor,
                        "Ignore nodes below this fraction of the peak overlap "
                        "mass")
            ->check(CLI::Range(1e-15, 0.999999));
        cmd->add_option("--format", *format, "Report format")
            ->check(CLI::IsMember({"text", "json"}));
        cmd->add_option("--out", *out, "Write to this path instead of stdout");
        cmd->callback([=, &action] {
            action = [=] { return run_certify(*file, *floor, *format, *out); };
        });
    }

    // sweep
    {
        auto* cmd = app.add_subcommand(
            "sweep", "Run a parameter sweep described by a config file");
        auto config = std::make_shared<std::string>();
        cmd->add_option("--config", *config, "Path to the sweep config")
            ->required();
        auto out = std::make_shared<OutputOptions>();
        add_output_options(cmd, *out);
        cmd->callback([=, &action] {
            action = [=] {
                SweepSpec spec = parse_config(*config);
                return run_and_emit(spec, *out);
            };
        });
    }

    // paper-check
    {
        auto* cmd = app.add_subcommand(
            "paper-check",
            "Run the built-in reference checks, one pass/fail line per check");
        cmd->callback([&action] { action = [] { return run_reference_checks(); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return action ? action() : 0;
    } catch (const ConfigSyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const WindowError& e) {
        std::cerr << "window error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
