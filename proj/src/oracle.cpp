#include "srgcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "srgcert/errors.hpp"
#include "srgcert/parallel.hpp"

namespace srgcert {

namespace {

constexpr double kMarginalDistance = 1e-6;
constexpr double kPhaseStep = 0.25;        ///< rad per accepted step
constexpr double kLogMagnitudeStep = 1.0;  ///< |log| change of |det(I + L)| per accepted step
constexpr double kPhaseConsistency = 1e-3; ///< full step vs two half steps

struct BudgetExhausted {};
constexpr std::size_t kMaxEvaluations = 400000;

std::vector<cplx> loci(const LoopEvaluator& loop, double omega) {
    const CMatrix l = loop(omega);
    Eigen::ComplexEigenSolver<CMatrix> es(l, false);
    if (es.info() != Eigen::Success) throw NumericalError("nyquist: eigen-solver failed", omega);
    std::vector<cplx> v(static_cast<std::size_t>(l.rows()));
    for (Eigen::Index i = 0; i < l.rows(); ++i) v[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    return v;
}

/// det(I + L) by partial-pivot LU. Eigenvalues of L lose absolute accuracy
/// when |L| is large (near the integrators), the determinant does not.
cplx det_ipl(const LoopEvaluator& loop, double omega) {
    const CMatrix l = loop(omega);
    const CMatrix a = CMatrix::Identity(l.rows(), l.cols()) + l;
    const cplx d = Eigen::PartialPivLU<CMatrix>(a).determinant();
    if (!std::isfinite(d.real()) || !std::isfinite(d.imag())) throw NumericalError("nyquist: det(I + L) not finite", omega);
    return d;
}

double min_distance_to_minus_one(const LoopEvaluator& loop, double omega) {
    double m = std::numeric_limits<double>::infinity();
    for (const cplx l : loci(loop, omega)) m = std::min(m, std::abs(1.0 + l));
    return m;
}

} // namespace

LoopEvaluator::LoopEvaluator(std::function<CMatrix(double)> f, Eigen::Index size, int open_loop_rhp_poles)
    : f_(std::move(f)), size_(size), rhp_poles_(open_loop_rhp_poles) {
    if (!f_ || size_ < 1) throw std::invalid_argument("LoopEvaluator: empty loop");
}

CMatrix LoopEvaluator::operator()(double omega) const {
    CMatrix l = f_(omega);
    if (l.rows() != size_ || l.cols() != size_) throw std::logic_error("LoopEvaluator: shape mismatch");
    return l;
}

LoopEvaluator make_loop(const GridAdmittanceEvaluator& grid, const std::vector<ConverterInstance>& converters) {
    if (converters.size() != grid.converter_count())
        throw std::invalid_argument("make_loop: one converter instance per converter node is required");
    int poles = 0;
    for (const auto& c : converters) {
        if (c.model == nullptr) throw std::invalid_argument("make_loop: missing converter model");
        poles += c.model->open_loop_rhp_poles(c.op);
    }
    const auto n = static_cast<Eigen::Index>(2 * converters.size());
    return LoopEvaluator(
        [&grid, converters, n](double omega) {
            CMatrix yc = CMatrix::Zero(n, n);
            for (std::size_t i = 0; i < converters.size(); ++i) {
                const auto& c = converters[i];
                const auto b = static_cast<Eigen::Index>(2 * i);
                yc.block(b, b, 2, 2) = rotate_global(c.model->exact(c.op, omega), c.theta);
            }
            return CMatrix(checked_inverse(grid(omega), omega, "Y_grid") * yc);
        },
        n, poles);
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

FrequencyGrid default_oracle_grid() { return make_log_grid(1e-7, 1e9, 800); }

OracleVerdict nyquist_verdict(const LoopEvaluator& loop, const FrequencyGrid& grid) {
    if (grid.size() < 2) throw std::invalid_argument("nyquist_verdict: grid needs at least two samples");
    OracleVerdict v;
    v.open_loop_rhp_poles = loop.open_loop_rhp_poles();

    const double w_lo = grid.samples().front();
    const double w_hi = grid.samples().back();

    // Asymptotic orders of det(I + L) at both ends of the axis.
    const auto log_abs_det = [&](double w) { return std::log(std::abs(det_ipl(loop, w))); };
    const double slope0 = (log_abs_det(2.0 * w_lo) - log_abs_det(w_lo)) / std::log(2.0);
    const double slope_inf = (log_abs_det(w_hi) - log_abs_det(0.5 * w_hi)) / std::log(2.0);
    v.origin_order = static_cast<int>(std::lround(-slope0));
    v.infinity_order = static_cast<int>(std::lround(slope_inf));
    if (std::abs(slope0 + v.origin_order) > 0.1 || std::abs(slope_inf - v.infinity_order) > 0.1) {
        v.note = fmt::format("grid ends are not asymptotic (slopes {:.3f}, {:.3f})", slope0, slope_inf);
        return v;
    }
    if (v.origin_order < 0 || v.infinity_order < 0) {
        v.note = "det(I + L) vanishes at s = 0 or at infinity";
        return v;
    }

    double phase = 0.0;
    double min_dist = min_distance_to_minus_one(loop, w_lo);
    bool unresolved = false;

    // Cached determinants; refinement bisects geometrically until the phase
    // step is small and agrees with the two half steps.
    std::map<double, cplx> dets;
    std::size_t evaluations = 0;
    const auto det_at = [&](double w) {
        auto it = dets.find(w);
        if (it != dets.end()) return it->second;
        if (++evaluations > kMaxEvaluations) throw BudgetExhausted{};
        return dets.emplace(w, det_ipl(loop, w)).first->second;
    };
    const auto step = [](cplx from, cplx to) { return std::arg(to / from); };

    try {
        double w_cur = w_lo;
        cplx d_cur = det_at(w_lo);
        v.omega_used.push_back(w_lo);
        if (std::abs(d_cur) == 0.0) min_dist = 0.0;

        std::vector<double> pending(grid.samples().rbegin(), grid.samples().rend() - 1);
        while (!pending.empty()) {
            const double w_next = pending.back();
            const cplx d_next = det_at(w_next);
            const double w_mid = std::sqrt(w_cur * w_next);
            bool refine = false;
            if (d_next == 0.0 || d_cur == 0.0) {
                min_dist = 0.0;
            } else {
                const double full = step(d_cur, d_next);
                const double jump = std::abs(std::log(std::abs(d_next) / std::abs(d_cur)));
                refine = std::abs(full) > kPhaseStep || jump > kLogMagnitudeStep;
                if (!refine) {
                    const cplx d_mid = det_at(w_mid);
                    refine = d_mid == 0.0 ||
                             std::abs(step(d_cur, d_mid) + step(d_mid, d_next) - full) > kPhaseConsistency;
                }
            }
            if (refine && w_next / w_cur - 1.0 > 1e-12) {
                pending.push_back(w_mid);
                continue;
            }
            if (refine) unresolved = true;
            if (d_next != 0.0 && d_cur != 0.0) phase += step(d_cur, d_next);
            min_dist = std::min(min_dist, min_distance_to_minus_one(loop, w_next));
            d_cur = d_next;
            w_cur = w_next;
            v.omega_used.push_back(w_next);
            pending.pop_back();
            // Keep the cache bounded to what can still be reused.
            dets.erase(dets.begin(), dets.lower_bound(w_cur));
        }
    } catch (const BudgetExhausted&) {
        v.note = "refinement budget exhausted";
        return v;
    }
    v.min_eigenlocus_distance_to_minus_one = min_dist;

    // Phase of (s/(s+1))^m0 / (s+1)^minf along the same stretch of the axis.
    const double norm_phase = v.origin_order * (std::atan(w_lo) - std::atan(w_hi)) -
                              v.infinity_order * (std::atan(w_hi) - std::atan(w_lo));
    // Conjugate symmetry doubles the half-axis increment; one turn is 2 pi.
    const double winding = (phase + norm_phase) / std::numbers::pi;
    const long rounded = std::lround(winding);
    v.winding_residual = std::abs(winding - static_cast<double>(rounded));
    v.encirclements = -static_cast<int>(rounded);
    v.closed_loop_rhp_poles = v.open_loop_rhp_poles + v.encirclements;

    if (min_dist < kMarginalDistance) {
        v.note = "eigenlocus passes within 1e-6 of -1";
        return v;
    }
    if (unresolved) {
        v.note = "phase of det(I + L) could not be resolved by refinement";
        return v;
    }
    if (v.winding_residual > 0.05) {
        v.note = fmt::format("non-integer winding {:.4f}", winding);
        return v;
    }
    if (v.closed_loop_rhp_poles < 0) {
        v.note = "negative closed-loop RHP count; open-loop pole count is inconsistent";
        return v;
    }
    v.verdict = v.closed_loop_rhp_poles == 0 ? Verdict::stable : Verdict::unstable;
    v.stable = v.verdict == Verdict::stable;
    return v;
}

// ================================================================ soundness sweep

double SweepReport::conservatism() const {
    if (oracle_stable == 0) return 0.0;
    std::size_t uncertified = 0;
    for (const auto& r : rows)
        if (r.oracle.stable && !r.certified) ++uncertified;
    return static_cast<double>(uncertified) / static_cast<double>(oracle_stable);
}

SweepReport soundness_sweep(const SweepSystem& system, int resolution, unsigned threads) {
    if (system.grid == nullptr) throw std::invalid_argument("soundness_sweep: missing grid");
    if (resolution < 1) throw std::invalid_argument("soundness_sweep: resolution must be >= 1");
    if (system.converters.size() != system.grid->converter_count())
        throw std::invalid_argument("soundness_sweep: converter list does not match the grid");

    struct Task {
        std::size_t converter;
        double x, y;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < system.converters.size(); ++c) {
        const double b = system.converters[c].bound;
        if (resolution == 1) {
            tasks.push_back({c, 0.0, 0.0});
            continue;
        }
        for (int j = 0; j < resolution; ++j)
            for (int i = 0; i < resolution; ++i) {
                const double x = -b + 2.0 * b * i / (resolution - 1);
                const double y = -b + 2.0 * b * j / (resolution - 1);
                if (x * x + y * y <= b * b * (1.0 + 1e-12)) tasks.push_back({c, x, y});
            }
    }

    SweepReport report;
    report.rows.resize(tasks.size());
    parallel_for(tasks.size(), threads, [&](std::size_t t) {
        const Task& task = tasks[t];
        std::vector<ConverterInstance> inst;
        bool certified = true;
        double swept_slack = 0.0;
        for (std::size_t c = 0; c < system.converters.size(); ++c) {
            const auto& sc = system.converters[c];
            OperatingPoint op = sc.nominal;
            if (c == task.converter) {
                op.i_d0 = task.x;
                op.i_q0 = task.y;
            }
            inst.push_back({sc.model, op, sc.theta});
            const double slack = certificate_slack(*sc.margins, *sc.metrics, sc.model->gamma(op)).value;
            if (!(slack > 0.0)) certified = false;
            if (c == task.converter) swept_slack = slack;
        }
        SweepRow& row = report.rows[t];
        row.converter = task.converter;
        row.node = system.converters[task.converter].node;
        row.i_d0 = task.x;
        row.i_q0 = task.y;
        row.certified = certified;
        row.margin_min = swept_slack;
        try {
            row.oracle = nyquist_verdict(make_loop(*system.grid, inst), system.oracle_grid);
        } catch (const NumericalError& e) {
            row.oracle = OracleVerdict{};
            row.oracle.note = e.what();
        }
        row.oracle.omega_used.clear();
        row.oracle.omega_used.shrink_to_fit();
    });

    for (const auto& r : report.rows) {
        if (r.certified) ++report.certified;
        if (r.oracle.stable) ++report.oracle_stable;
        if (r.oracle.verdict == Verdict::inconclusive) ++report.inconclusive;
        if (r.certified && r.oracle.verdict == Verdict::unstable) ++report.failures;
        if (r.certified && r.oracle.verdict == Verdict::inconclusive) ++report.certified_inconclusive;
    }
    return report;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
    os << "converter,node,i_d0,i_q0,certified,oracle_stable,encirclements,margin_min,verdict,open_loop_rhp,closed_loop_rhp\n";
    for (const auto& r : report.rows)
        fmt::print(os, "{},{},{:.17g},{:.17g},{},{},{},{:.17g},{},{},{}\n", r.converter, r.node, r.i_d0, r.i_q0,
                   r.certified ? 1 : 0, r.oracle.stable ? 1 : 0, r.oracle.encirclements, r.margin_min,
                   to_string(r.oracle.verdict), r.oracle.open_loop_rhp_poles, r.oracle.closed_loop_rhp_poles);
}

} // namespace srgcert
