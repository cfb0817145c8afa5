#include "srgcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "srgcert/parallel.hpp"

namespace srgcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> signs_of(std::size_t mask, std::size_t n) {
    std::vector<int> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = ((mask >> k) & 1u) ? -1 : 1;
    return s;
}

void check_aligned(const MarginSeries& m, const TermMetricsSeries& t) {
    if (m.rho0.size() != m.grid.size()) throw std::invalid_argument("margin series length differs from its grid");
    if (t.c.size() != t.r.size()) throw std::invalid_argument("metrics: c and r parameter counts differ");
    for (std::size_t k = 0; k < t.c.size(); ++k)
        if (t.c[k].size() != m.rho0.size() || t.r[k].size() != m.rho0.size())
            throw std::invalid_argument("metrics series not aligned with the margin series");
}

double slice_margin(const SrgSlice& slice, const Disk& d) {
    double m = kInf;
    for (const cplx p : slice.boundary) {
        m = std::min(m, tau_margin(p, d));
        if (m == 0.0) break;
    }
    return m;
}

bool orthant_matches(const std::vector<int>& signs, const std::vector<double>& g, double slack) {
    for (std::size_t k = 0; k < signs.size(); ++k)
        if (signs[k] * g[k] < -slack) return false;
    return true;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("CSV: not a number: '" + s + "'");
    return v;
}

} // namespace

// ================================================================ margins

double tau_margin(cplx p, const Disk& d) {
    const double a = d.a;
    const double b = d.b;
    const double x = p.real();
    const double y = p.imag();
    auto phi = [&](double tau) { return std::abs(cplx(x + tau * a, y)) - tau * b; };

    double best = std::min(std::abs(p), phi(1.0)); // tau -> 0+ is a limit, not attained
    const double a2 = a * a;
    const double gap = a2 - b * b;
    if (gap > 1e-12 * a2) {
        // Stationary point of the convex phi: a (x + tau a) = b |p + tau a|.
        const double u = std::copysign(b * std::abs(y) / std::sqrt(gap), a);
        const double tau = (u - x) / a;
        if (tau > 0.0 && tau < 1.0) best = std::min(best, phi(tau));
    } else if (gap > -1e-12 * a2 && a2 > 0.0) {
        // Nearly |a| == b: the stationary point is ill-conditioned; scan tau.
        for (int i = 0; i < 1000; ++i) {
            const double tau = std::pow(10.0, -6.0 + 6.0 * i / 999.0);
            best = std::min(best, phi(tau));
        }
    }
    return std::max(0.0, best);
}

MarginSeries grid_margin(const std::vector<SrgSlice>& y0_slices, const std::vector<Disk>& grid_disks) {
    if (y0_slices.size() != grid_disks.size()) throw std::invalid_argument("grid_margin: slices and disks differ in length");
    std::vector<double> w;
    w.reserve(y0_slices.size());
    for (const auto& s : y0_slices) w.push_back(s.omega);
    MarginSeries m{FrequencyGrid(std::move(w)), {}};
    m.rho0.reserve(y0_slices.size());
    for (std::size_t i = 0; i < y0_slices.size(); ++i) m.rho0.push_back(slice_margin(y0_slices[i], grid_disks[i]));
    return m;
}

CertificateSlack certificate_slack(const MarginSeries& margins, const TermMetricsSeries& metrics,
                                   const std::vector<double>& gamma) {
    check_aligned(margins, metrics);
    if (gamma.size() != metrics.parameter_count())
        throw std::invalid_argument("certificate: gamma length differs from the parameter count");
    CertificateSlack s{kInf, 0};
    std::vector<ScaledTerm> terms(gamma.size());
    for (std::size_t i = 0; i < margins.rho0.size(); ++i) {
        for (std::size_t k = 0; k < gamma.size(); ++k) terms[k] = {metrics.c[k][i], metrics.r[k][i], gamma[k]};
        const double v = margins.rho0[i] - minkowski_distance_to_origin(terms);
        if (v < s.value) s = {v, i};
    }
    return s;
}

bool theorem2_check(const MarginSeries& margins, const TermMetricsSeries& metrics, const std::vector<double>& gamma) {
    return certificate_slack(margins, metrics, gamma).value > 0.0;
}

// ================================================================ regions

geom::LabeledPolygon bound_polygon(double bound) { return geom::inscribed_polygon(bound, kBoundSides, kSourceBound); }

bool FeasibleRegion::empty() const {
    if (zero_margin_index) return true;
    if (has_polygons()) return cells.empty();
    return false;
}

double FeasibleRegion::inside_measure(const std::vector<double>& gamma) const {
    if (gamma.size() != parameter_count) throw std::invalid_argument("membership: gamma length mismatch");
    if (zero_margin_index) return -kInf;
    if (parameter_count == 2) {
        double best = -kInf;
        const geom::Point p(gamma[0], gamma[1]);
        for (const auto& cell : cells)
            if (orthant_matches(cell.signs, gamma, kRegionSlack))
                best = std::max(best, geom::inside_margin(p, cell.polygon.vertices));
        return best;
    }
    if (parameter_count == 1) {
        double best = -kInf;
        for (const auto& cell : cells)
            if (orthant_matches(cell.signs, gamma, kRegionSlack))
                best = std::max(best, std::min(gamma[0] - cell.lo, cell.hi - gamma[0]));
        return best;
    }
    return certificate_slack(margins, metrics, gamma).value;
}

Membership FeasibleRegion::membership(const std::vector<double>& gamma, double slack) const {
    const double m = inside_measure(gamma);
    if (m > slack) return Membership::inside;
    if (m >= -slack) return Membership::marginal;
    return Membership::outside;
}

FeasibleRegion feasible_region(const MarginSeries& margins, const TermMetricsSeries& metrics, double bound) {
    check_aligned(margins, metrics);
    if (!(bound > 0.0)) throw std::invalid_argument("feasible_region: bound must be > 0");
    const std::size_t np = metrics.parameter_count();
    if (np > 20) throw std::invalid_argument("feasible_region: too many parameters for orthant enumeration");

    FeasibleRegion reg;
    reg.parameter_count = np;
    reg.bound = bound;
    reg.margins = margins;
    reg.metrics = metrics;
    for (std::size_t i = 0; i < margins.rho0.size(); ++i)
        if (!(margins.rho0[i] > 0.0)) {
            reg.zero_margin_index = i;
            return reg;
        }

    const std::size_t n_omega = margins.rho0.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << np); ++mask) {
        RegionCell cell;
        cell.signs = signs_of(mask, np);
        const auto& s = cell.signs;

        if (np == 2) {
            geom::LabeledPolygon poly = bound_polygon(bound);
            for (std::size_t k = 0; k < 2; ++k) {
                geom::Point n = geom::Point::Zero();
                n[static_cast<Eigen::Index>(k)] = -s[k];
                poly = geom::clip(poly, {n, 0.0, kSourceOrthant});
            }
            for (std::size_t i = 0; i < n_omega && !poly.empty(); ++i) {
                const double rhs = margins.rho0[i] - kRegionSlack;
                const int src = static_cast<int>(i);
                const geom::Point sr(s[0] * metrics.r[0][i], s[1] * metrics.r[1][i]);
                const geom::Point c(metrics.c[0][i], metrics.c[1][i]);
                poly = geom::clip(poly, {c - sr, rhs, src});
                if (!poly.empty()) poly = geom::clip(poly, {-c - sr, rhs, src});
            }
            if (poly.empty()) continue;
            cell.polygon = std::move(poly);
        } else if (np == 1) {
            double lo = s[0] > 0 ? 0.0 : -bound;
            double hi = s[0] > 0 ? bound : 0.0;
            for (std::size_t i = 0; i < n_omega && lo <= hi; ++i) {
                const double rhs = margins.rho0[i] - kRegionSlack;
                const double sr = s[0] * metrics.r[0][i];
                for (const double a : {metrics.c[0][i] - sr, -metrics.c[0][i] - sr}) {
                    if (a > 0.0)
                        hi = std::min(hi, rhs / a);
                    else if (a < 0.0)
                        lo = std::max(lo, rhs / a);
                    else if (rhs < 0.0)
                        hi = -kInf;
                }
            }
            if (!(lo <= hi)) continue;
            cell.lo = lo;
            cell.hi = hi;
        }
        reg.cells.push_back(std::move(cell));
    }
    return reg;
}

std::vector<FeasibleRegion> per_frequency_regions(const MarginSeries& margins, const TermMetricsSeries& metrics,
                                                  double bound) {
    check_aligned(margins, metrics);
    std::vector<FeasibleRegion> out;
    out.reserve(margins.rho0.size());
    for (std::size_t i = 0; i < margins.rho0.size(); ++i) {
        MarginSeries m{FrequencyGrid({margins.grid[i]}), {margins.rho0[i]}};
        TermMetricsSeries t;
        t.grid = m.grid;
        for (std::size_t k = 0; k < metrics.parameter_count(); ++k) {
            t.c.push_back({metrics.c[k][i]});
            t.r.push_back({metrics.r[k][i]});
        }
        FeasibleRegion r = feasible_region(m, t, bound);
        if (r.zero_margin_index) r.zero_margin_index = i;
        for (auto& cell : r.cells)
            for (int& src : cell.polygon.edge_source)
                if (src >= 0) src = static_cast<int>(i);
        out.push_back(std::move(r));
    }
    return out;
}

FeasibleRegion region_intersection_over_frequency(const std::vector<FeasibleRegion>& per_omega) {
    if (per_omega.empty()) throw std::invalid_argument("region intersection: no regions");
    const std::size_t np = per_omega.front().parameter_count;
    if (np != 1 && np != 2) throw std::invalid_argument("region intersection: needs polygon regions");

    FeasibleRegion out;
    out.parameter_count = np;
    out.bound = per_omega.front().bound;
    std::vector<double> w;
    out.margins.rho0.clear();
    out.metrics.c.assign(np, {});
    out.metrics.r.assign(np, {});
    for (const auto& r : per_omega) {
        if (r.parameter_count != np) throw std::invalid_argument("region intersection: parameter counts differ");
        for (std::size_t i = 0; i < r.margins.rho0.size(); ++i) {
            w.push_back(r.margins.grid[i]);
            out.margins.rho0.push_back(r.margins.rho0[i]);
            for (std::size_t k = 0; k < np; ++k) {
                out.metrics.c[k].push_back(r.metrics.c[k][i]);
                out.metrics.r[k].push_back(r.metrics.r[k][i]);
            }
        }
        if (r.zero_margin_index && !out.zero_margin_index) out.zero_margin_index = r.zero_margin_index;
    }
    out.margins.grid = FrequencyGrid(w);
    out.metrics.grid = out.margins.grid;
    if (out.zero_margin_index) return out;

    out.cells = per_omega.front().cells;
    for (std::size_t j = 1; j < per_omega.size(); ++j) {
        std::vector<RegionCell> next;
        for (auto& cell : out.cells) {
            const auto it = std::find_if(per_omega[j].cells.begin(), per_omega[j].cells.end(),
                                         [&](const RegionCell& c) { return c.signs == cell.signs; });
            if (it == per_omega[j].cells.end()) continue;
            if (np == 1) {
                cell.lo = std::max(cell.lo, it->lo);
                cell.hi = std::min(cell.hi, it->hi);
                if (cell.lo <= cell.hi) next.push_back(cell);
                continue;
            }
            const auto& v = it->polygon.vertices;
            for (std::size_t e = 0; e < v.size() && !cell.polygon.empty(); ++e) {
                const geom::Point a = v[e];
                const geom::Point d = v[(e + 1) % v.size()] - a;
                const geom::Point n(d.y(), -d.x());
                cell.polygon = geom::clip(cell.polygon, {n, n.dot(a), it->polygon.edge_source[e]});
            }
            if (!cell.polygon.empty()) next.push_back(cell);
        }
        out.cells = std::move(next);
    }
    return out;
}

bool region_contains(const FeasibleRegion& outer, const FeasibleRegion& inner, double slack) {
    if (outer.parameter_count != inner.parameter_count || !outer.has_polygons())
        throw std::invalid_argument("region_contains: needs polygon regions of equal dimension");
    if (inner.empty()) return true;
    if (outer.empty()) return false;
    for (const auto& ic : inner.cells) {
        const auto it = std::find_if(outer.cells.begin(), outer.cells.end(),
                                     [&](const RegionCell& c) { return c.signs == ic.signs; });
        if (it == outer.cells.end()) return false;
        if (inner.parameter_count == 1) {
            if (ic.lo < it->lo - slack || ic.hi > it->hi + slack) return false;
            continue;
        }
        for (const auto& p : ic.polygon.vertices)
            if (geom::inside_margin(p, it->polygon.vertices) < -slack) return false;
    }
    return true;
}

PhysicalRegion map_to_physical(const FeasibleRegion& region, const AffineLpvModel& model, int resolution) {
    PhysicalRegion out;
    out.bound = region.bound;
    if (region.empty()) return out;
    if (region.parameter_count == 2 && model.map_is_identity()) {
        for (const auto& c : region.cells) out.cells.push_back(c.polygon.vertices);
        return out;
    }
    if (region.parameter_count == 0) {
        out.cells.push_back(bound_polygon(region.bound).vertices);
        return out;
    }
    if (model.variable_names().size() != 2) throw std::invalid_argument("map_to_physical: needs a two-variable parameter map");
    if (resolution < 2) throw std::invalid_argument("map_to_physical: resolution must be >= 2");

    const double b = region.bound;
    const double h = 2.0 * b / (resolution - 1);
    const auto bp = bound_polygon(b);
    for (int j = 0; j < resolution; ++j) {
        const double y = -b + h * j;
        int run_start = -1;
        for (int i = 0; i <= resolution; ++i) {
            bool ok = false;
            if (i < resolution) {
                const double x = -b + h * i;
                ok = geom::inside_margin({x, y}, bp.vertices) > 0.0 &&
                     region.membership(model.gamma_from({x, y})) == Membership::inside;
            }
            if (ok && run_start < 0) run_start = i;
            if (!ok && run_start >= 0) {
                const double x0 = -b + h * run_start - 0.5 * h;
                const double x1 = -b + h * (i - 1) + 0.5 * h;
                out.cells.push_back({{x0, y - 0.5 * h}, {x1, y - 0.5 * h}, {x1, y + 0.5 * h}, {x0, y + 0.5 * h}});
                run_start = -1;
            }
        }
    }
    return out;
}

Membership contains_setpoint(const FeasibleRegion& region, const AffineLpvModel& model, double i_d0, double i_q0) {
    if (region.parameter_count == 2 && model.map_is_identity()) return region.membership({i_d0, i_q0});
    const double in_bound = geom::inside_margin({i_d0, i_q0}, bound_polygon(region.bound).vertices);
    const double m = std::min(in_bound, region.inside_measure(model.has_parameter_map()
                                                                   ? model.gamma_from({i_d0, i_q0})
                                                                   : std::vector<double>{}));
    if (m > kRegionSlack) return Membership::inside;
    if (m >= -kRegionSlack) return Membership::marginal;
    return Membership::outside;
}

// ================================================================ series

std::vector<Disk> disk_series(const std::function<CMatrix(double)>& f, const FrequencyGrid& grid, int q,
                              unsigned threads) {
    std::vector<Disk> out(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = disk_approx(trace_srg(f(grid[i]), q, grid[i])); });
    return out;
}

MarginSeries margin_series(const AffineLpvModel& model, const std::vector<Disk>& grid_disks,
                           const FrequencyGrid& grid, int q, unsigned threads) {
    if (grid_disks.size() != grid.size()) throw std::invalid_argument("margin_series: disks not aligned with grid");
    MarginSeries m{grid, std::vector<double>(grid.size())};
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        m.rho0[i] = slice_margin(trace_srg(model.base_at(grid[i]), q, grid[i]), grid_disks[i]);
    });
    return m;
}

TermMetricsSeries term_metrics(const AffineLpvModel& model, const FrequencyGrid& grid, unsigned threads) {
    const std::size_t np = model.parameter_count();
    TermMetricsSeries t;
    t.grid = grid;
    t.c.assign(np, std::vector<double>(grid.size(), 0.0));
    t.r.assign(np, std::vector<double>(grid.size(), 0.0));
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        std::vector<CMatrix> per_param(np, CMatrix::Zero(model.rows(), model.cols()));
        for (std::size_t k = 0; k < model.term_count(); ++k)
            per_param[model.term(k).parameter] += model.term_at(k, grid[i]);
        for (std::size_t k = 0; k < np; ++k) {
            const ProjectionMetrics pm = projection_metrics(per_param[k]);
            t.c[k][i] = pm.c;
            t.r[k][i] = pm.r;
        }
    });
    return t;
}

// ================================================================ CSV

void write_margin_csv(std::ostream& os, const MarginSeries& m) {
    os << "omega,rho0\n";
    for (std::size_t i = 0; i < m.rho0.size(); ++i) fmt::print(os, "{:.17g},{:.17g}\n", m.grid[i], m.rho0[i]);
}

void write_metrics_csv(std::ostream& os, const TermMetricsSeries& m) {
    os << "omega";
    for (std::size_t k = 0; k < m.parameter_count(); ++k) os << ",c_" << k + 1 << ",r_" << k + 1;
    os << '\n';
    for (std::size_t i = 0; i < m.grid.size(); ++i) {
        fmt::print(os, "{:.17g}", m.grid[i]);
        for (std::size_t k = 0; k < m.parameter_count(); ++k) fmt::print(os, ",{:.17g},{:.17g}", m.c[k][i], m.r[k][i]);
        os << '\n';
    }
}

MarginSeries read_margin_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("omega,rho0", 0) != 0) throw std::runtime_error("margin CSV: bad header");
    std::vector<double> w;
    std::vector<double> rho;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2) throw std::runtime_error("margin CSV: expected 2 columns");
        w.push_back(parse_double(cells[0]));
        rho.push_back(parse_double(cells[1]));
    }
    return {FrequencyGrid(std::move(w)), std::move(rho)};
}

TermMetricsSeries read_metrics_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("omega", 0) != 0) throw std::runtime_error("metrics CSV: bad header");
    const std::size_t cols = split_csv(line).size();
    if (cols % 2 != 1) throw std::runtime_error("metrics CSV: expected omega plus (c, r) pairs");
    const std::size_t np = (cols - 1) / 2;
    TermMetricsSeries t;
    t.c.assign(np, {});
    t.r.assign(np, {});
    std::vector<double> w;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != cols) throw std::runtime_error("metrics CSV: ragged row");
        w.push_back(parse_double(cells[0]));
        for (std::size_t k = 0; k < np; ++k) {
            t.c[k].push_back(parse_double(cells[1 + 2 * k]));
            t.r[k].push_back(parse_double(cells[2 + 2 * k]));
        }
    }
    t.grid = FrequencyGrid(std::move(w));
    return t;
}

void write_region_csv(std::ostream& os, const PhysicalRegion& region) {
    os << "cell_id,vertex_index,i_d0,i_q0\n";
    for (std::size_t c = 0; c < region.cells.size(); ++c)
        for (std::size_t v = 0; v < region.cells[c].size(); ++v)
            fmt::print(os, "{},{},{:.17g},{:.17g}\n", c, v, region.cells[c][v].x(), region.cells[c][v].y());
}

} // namespace srgcert
