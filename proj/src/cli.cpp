#include "srgcert/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "srgcert/config.hpp"
#include "srgcert/errors.hpp"
#include "srgcert/output.hpp"
#include "srgcert/parallel.hpp"
#include "srgcert/srg.hpp"
#include "srgcert/study.hpp"

namespace srgcert {

namespace {

struct GlobalOptions {
    std::string config;
    bool hz = false;
    int q = 0; ///< 0 keeps the config value
    std::string out = ".";
    unsigned threads = 0;
};

Study open_study(const GlobalOptions& g) {
    std::optional<int> q;
    if (g.q > 0) q = g.q;
    return Study(load_config(g.config), g.hz, q, g.threads);
}

std::filesystem::path output_path(const GlobalOptions& g, const std::string& name) {
    std::filesystem::create_directories(g.out);
    return std::filesystem::path(g.out) / name;
}

/// Writes the whole buffer at once so that a failed command leaves no partial file.
void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string describe(Membership m) {
    switch (m) {
    case Membership::inside: return "inside";
    case Membership::marginal: return "marginal";
    case Membership::outside: return "outside";
    }
    return "?";
}

std::pair<double, double> parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--mark", "expected 'i_d0,i_q0', got '" + s + "'");
    try {
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--mark", "expected 'i_d0,i_q0', got '" + s + "'");
    }
}

// ================================================================ srg

int cmd_srg(const GlobalOptions& g, std::optional<int> node, const std::string& target, std::vector<double> at,
            std::ostream& out) {
    Study study = open_study(g);
    if (g.hz)
        for (double& w : at) w *= 2.0 * std::numbers::pi;
    const FrequencyGrid grid = at.empty() ? study.grid() : FrequencyGrid(at);

    std::function<CMatrix(double)> f;
    std::string name;
    if (target == "grid") {
        const auto& net = study.network();
        f = [&net](double w) { return net(w); };
        name = "srg_grid.csv";
    } else {
        if (!node) throw CLI::RequiredError("--node is required for target '" + target + "'");
        const std::size_t i = study.converter_index(*node);
        const ConverterModel& model = study.model(i);
        const AffineLpvModel& affine = model.certificate_model();
        if (target == "base") {
            f = [&affine](double w) { return affine.base_at(w); };
        } else if (target == "exact") {
            const OperatingPoint op = study.converter(i).setpoint;
            f = [&model, op](double w) { return model.exact(op, w); };
        } else if (target.rfind("term", 0) == 0) {
            std::size_t k = 0;
            try {
                k = std::stoul(target.substr(4));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--target", "expected term<k>");
            }
            if (k < 1 || k > affine.term_count())
                throw CLI::ValidationError("--target", fmt::format("term index must be in 1..{}", affine.term_count()));
            f = [&affine, k](double w) { return affine.term_at(k - 1, w); };
        } else {
            throw CLI::ValidationError("--target", "expected base, exact, grid or term<k>");
        }
        name = fmt::format("srg_node{}_{}.csv", *node, target);
    }

    std::vector<SrgSlice> slices(grid.size());
    parallel_for(grid.size(), study.threads(),
                 [&](std::size_t i) { slices[i] = trace_srg(f(grid[i]), study.q(), grid[i]); });
    std::ostringstream csv;
    write_slices_csv(csv, slices);
    const auto path = output_path(g, name);
    write_file(path, csv.str());
    fmt::print(out, "wrote {} ({} slices, q = {})\n", path.string(), slices.size(), study.q());
    return kExitOk;
}

// ================================================================ margin

int cmd_margin(const GlobalOptions& g, int node, std::ostream& out) {
    Study study = open_study(g);
    const std::size_t i = study.converter_index(node);
    const CertificateData& d = study.certificate(i);

    std::ostringstream m, t;
    write_margin_csv(m, d.margins);
    write_metrics_csv(t, d.metrics);
    const auto mp = output_path(g, fmt::format("margin_node{}.csv", node));
    const auto tp = output_path(g, fmt::format("metrics_node{}.csv", node));
    write_file(mp, m.str());
    write_file(tp, t.str());

    const auto lo = std::min_element(d.margins.rho0.begin(), d.margins.rho0.end());
    const std::size_t at = static_cast<std::size_t>(lo - d.margins.rho0.begin());
    fmt::print(out, "node {} ({}): min rho0 = {:.6g} at omega = {:.6g} rad/s\n", node,
               to_string(study.model(i).kind()), *lo, d.margins.grid[at]);
    fmt::print(out, "wrote {}\nwrote {}\n", mp.string(), tp.string());
    return kExitOk;
}

// ================================================================ region

int cmd_region(const GlobalOptions& g, int node, const std::string& margin_file, const std::string& metrics_file,
               const std::vector<std::string>& marks, std::ostream& out) {
    Study study = open_study(g);
    const std::size_t i = study.converter_index(node);
    const ConverterConfig& conv = study.converter(i);
    const AffineLpvModel& affine = study.model(i).certificate_model();

    CertificateData data;
    if (!margin_file.empty() || !metrics_file.empty()) {
        if (margin_file.empty() || metrics_file.empty())
            throw CLI::ValidationError("--margin-file", "--margin-file and --metrics-file go together");
        std::ifstream ms(margin_file), ts(metrics_file);
        if (!ms) throw std::runtime_error("cannot open '" + margin_file + "'");
        if (!ts) throw std::runtime_error("cannot open '" + metrics_file + "'");
        data.margins = read_margin_csv(ms);
        data.metrics = read_metrics_csv(ts);
        if (data.metrics.parameter_count() != affine.parameter_count())
            throw SchemaError(fmt::format("{}: {} parameters, model has {}", metrics_file,
                                          data.metrics.parameter_count(), affine.parameter_count()));
    } else {
        data = study.certificate(i);
    }

    const FeasibleRegion region = feasible_region(data.margins, data.metrics, conv.placement.bound_radius);
    const PhysicalRegion phys = map_to_physical(region, affine, study.config().analysis.region_resolution);

    std::vector<SetpointMarker> markers;
    const auto add_marker = [&](double id, double iq, const std::string& label) {
        const Membership m = contains_setpoint(region, affine, id, iq);
        markers.push_back({id, iq, label, m == Membership::inside});
        fmt::print(out, "setpoint ({:+.4f}, {:+.4f}) {}: {}\n", id, iq, label, describe(m));
    };
    add_marker(conv.setpoint.i_d0, conv.setpoint.i_q0, conv.name.empty() ? "config" : conv.name);
    for (const auto& s : marks) {
        const auto [id, iq] = parse_point(s);
        add_marker(id, iq, s);
    }

    std::ostringstream csv, svg;
    write_region_csv(csv, phys);
    write_region_svg(svg, phys, markers,
                     fmt::format("node {} ({}) certified region", node, to_string(study.model(i).kind())));
    const auto cp = output_path(g, fmt::format("region_node{}.csv", node));
    const auto sp = output_path(g, fmt::format("region_node{}.svg", node));
    write_file(cp, csv.str());
    write_file(sp, svg.str());

    if (region.zero_margin_index)
        fmt::print(out, "region empty: rho0 <= 0 at omega = {:.6g} rad/s\n", data.margins.grid[*region.zero_margin_index]);
    else
        fmt::print(out, "region: {} cell(s) in the parameter space, {} drawn\n", region.cells.size(), phys.cells.size());
    fmt::print(out, "wrote {}\nwrote {}\n", cp.string(), sp.string());
    return kExitOk;
}

// ================================================================ verify

int cmd_verify(const GlobalOptions& g, std::optional<int> grid_res, std::ostream& out) {
    Study study = open_study(g);
    const int res = grid_res.value_or(study.config().analysis.sweep_resolution);
    if (res < 1) throw CLI::ValidationError("--grid-res", "must be >= 1");
    const SweepReport report = study.verify(res);

    std::ostringstream csv;
    write_sweep_csv(csv, report);
    const auto path = output_path(g, "verify.csv");
    write_file(path, csv.str());

    fmt::print(out, "points: {}  certified: {}  oracle-stable: {}  inconclusive: {}\n", report.rows.size(),
               report.certified, report.oracle_stable, report.inconclusive);
    fmt::print(out, "certified but oracle-unstable: {}  certified but inconclusive: {}\n", report.failures,
               report.certified_inconclusive);
    fmt::print(out, "conservatism: {:.4f}\n", report.conservatism());

    // Per-converter certified share, then pairwise nesting of polygon regions.
    const std::size_t n = study.converter_count();
    std::vector<FeasibleRegion> regions;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t total = 0, cert = 0;
        for (const auto& r : report.rows)
            if (r.converter == i) {
                ++total;
                cert += r.certified ? 1 : 0;
            }
        const auto& c = study.converter(i);
        fmt::print(out, "node {} ({}): certified {}/{}\n", c.placement.node, to_string(c.placement.kind), cert, total);
        regions.push_back(study.region(i));
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b || !regions[a].has_polygons() || !regions[b].has_polygons()) continue;
            if (regions[a].parameter_count != regions[b].parameter_count) continue;
            fmt::print(out, "S(node {}) within S(node {}): {}\n", study.converter(a).placement.node,
                       study.converter(b).placement.node, region_contains(regions[b], regions[a]) ? "yes" : "no");
        }
    fmt::print(out, "wrote {}\n", path.string());
    return report.failures > 0 ? kExitSoundness : kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decentralized SRG stability certificates for converter-dominated grids", "srgcert"};
    app.fallthrough();
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config, "study configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_flag("--hz", g.hz, "frequencies are in Hz (multiplied by 2*pi)");
    app.add_option("--q", g.q, "angle samples per SRG slice")->check(CLI::Range(8, 100000));
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

    std::optional<int> node;
    std::string target = "base";
    std::vector<double> at;
    auto* srg = app.add_subcommand("srg", "trace SRG slices to CSV");
    srg->add_option("--node", node, "converter node");
    srg->add_option("--target", target, "base, exact, grid or term<k>");
    srg->add_option("--at", at, "frequencies to trace instead of the study grid");

    int margin_node = 0;
    auto* margin = app.add_subcommand("margin", "margin and term metrics series to CSV");
    margin->add_option("--node", margin_node, "converter node")->required();

    int region_node = 0;
    std::string margin_file, metrics_file;
    std::vector<std::string> marks;
    auto* region = app.add_subcommand("region", "certified region to CSV and SVG");
    region->add_option("--node", region_node, "converter node")->required();
    region->add_option("--margin-file", margin_file, "reuse a margin CSV");
    region->add_option("--metrics-file", metrics_file, "reuse a metrics CSV");
    region->add_option("--mark", marks, "extra setpoint 'i_d0,i_q0' to classify and draw");

    std::optional<int> grid_res;
    auto* verify = app.add_subcommand("verify", "soundness sweep against the Nyquist oracle");
    verify->add_option("--grid-res", grid_res, "points per axis of each converter's sweep grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        if (srg->parsed()) return cmd_srg(g, node, target, at, out);
        if (margin->parsed()) return cmd_margin(g, margin_node, out);
        if (region->parsed()) return cmd_region(g, region_node, margin_file, metrics_file, marks, out);
        if (verify->parsed()) return cmd_verify(g, grid_res, out);
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

} // namespace srgcert
