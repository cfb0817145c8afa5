#include "srgcert/srg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "srgcert/errors.hpp"
#include "srgcert/geometry.hpp"

namespace srgcert {

namespace {

struct JointPoint {
    double x; // Re of Rayleigh quotient of M
    double g; // squared gain
};

cplx to_upper(const JointPoint& p) { return {p.x, std::sqrt(std::max(0.0, p.g - p.x * p.x))}; }

// Edges of the joint numerical range between consecutive support points are
// segments of points that belong to the range (it is convex), but their images
// under (x, g) -> x + j sqrt(g - x^2) are curves. Bisect until the image is
// flat to within tol.
void densify(const JointPoint& a, const JointPoint& b, double tol, int depth, std::vector<cplx>& out) {
    const JointPoint mid{0.5 * (a.x + b.x), 0.5 * (a.g + b.g)};
    const cplx za = to_upper(a);
    const cplx zb = to_upper(b);
    const cplx zm = to_upper(mid);
    if (depth <= 0 || geom::segment_distance(zm, za, zb) <= tol) return;
    densify(a, mid, tol, depth - 1, out);
    out.push_back(zm);
    densify(mid, b, tol, depth - 1, out);
}

} // namespace

SrgSlice trace_srg(const CMatrix& m, int q, double omega) {
    if (m.rows() != m.cols()) throw std::invalid_argument("trace_srg: matrix must be square");
    if (m.rows() < 1) throw std::invalid_argument("trace_srg: empty matrix");
    if (q < 8) throw std::invalid_argument("trace_srg: Q must be >= 8");

    const CMatrix h1 = 0.5 * (m + m.adjoint());
    const CMatrix g = m.adjoint() * m;

    std::vector<JointPoint> support;
    support.reserve(static_cast<std::size_t>(q));
    Eigen::SelfAdjointEigenSolver<CMatrix> es;
    for (int k = 0; k < q; ++k) {
        const double alpha = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
        es.compute(std::cos(alpha) * h1 + std::sin(alpha) * g);
        if (es.info() != Eigen::Success) throw NumericalError("trace_srg: Hermitian eigen-solver failed", omega);
        const Eigen::VectorXcd u = es.eigenvectors().col(m.rows() - 1);
        const double nu = u.squaredNorm();
        support.push_back({(u.adjoint() * h1 * u)(0, 0).real() / nu, (u.adjoint() * g * u)(0, 0).real() / nu});
    }

    double scale = 0.0;
    for (const auto& p : support) scale = std::max(scale, std::sqrt(std::max(0.0, p.g)));
    const double tol = 1e-7 * std::max(scale, std::numeric_limits<double>::min());
    const double same = 1e-14 * std::max(scale, std::numeric_limits<double>::min());

    std::vector<cplx> upper;
    upper.reserve(support.size() * 2);
    for (std::size_t k = 0; k < support.size(); ++k) {
        const JointPoint& a = support[k];
        const JointPoint& b = support[(k + 1) % support.size()];
        upper.push_back(to_upper(a));
        if (std::abs(a.x - b.x) + std::abs(a.g - b.g) > same) densify(a, b, tol, 18, upper);
    }

    std::vector<cplx> dedup;
    dedup.reserve(upper.size());
    for (const cplx z : upper)
        if (dedup.empty() || std::abs(z - dedup.back()) > same) dedup.push_back(z);
    while (dedup.size() > 1 && std::abs(dedup.front() - dedup.back()) <= same) dedup.pop_back();

    SrgSlice s;
    s.omega = omega;
    s.dim = m.rows();
    s.boundary = dedup;
    if (dedup.size() == 1 && dedup.front().imag() == 0.0) return s;
    for (auto it = dedup.rbegin(); it != dedup.rend(); ++it) s.boundary.push_back(std::conj(*it));
    return s;
}

SymmetricRegion tight_chord(const SrgSlice& slice) {
    if (slice.boundary.empty()) throw std::invalid_argument("tight_chord: empty slice");
    SymmetricRegion reg;
    reg.hull = geom::convex_hull(slice.boundary);
    reg.lower = std::numeric_limits<double>::infinity();
    reg.upper = -std::numeric_limits<double>::infinity();
    for (const cplx z : reg.hull) {
        reg.lower = std::min(reg.lower, z.real());
        reg.upper = std::max(reg.upper, z.real());
    }
    reg.c = (reg.upper + reg.lower) / 2.0;
    reg.r = (reg.upper - reg.lower) / 2.0;
    return reg;
}

Disk disk_approx(const SrgSlice& slice) {
    if (slice.boundary.empty()) throw std::invalid_argument("disk_approx: empty slice");
    // The farthest point from any centre is a hull vertex.
    const std::vector<cplx> hull = geom::convex_hull(slice.boundary);
    auto radius = [&hull](double a) {
        double r = 0.0;
        for (const cplx z : hull) r = std::max(r, std::abs(z - a));
        return r;
    };
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const cplx z : hull) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
    }
    while (hi - lo > 1e-10) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (radius(m1) <= radius(m2))
            hi = m2;
        else
            lo = m1;
        if (hi - lo <= 1e-15 * std::max(std::abs(lo), std::abs(hi))) break;
    }
    Disk d;
    d.a = 0.5 * (lo + hi);
    d.b = radius(d.a);
    return d;
}

ProjectionMetrics projection_metrics(const CMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("projection_metrics: matrix must be square");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("projection_metrics: eigen-solver failure");
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return {(hi + lo) / 2.0, (hi - lo) / 2.0};
}

double symmetric_distance(double c_a, double r_a, double mu_a, double c_b, double r_b, double mu_b) {
    if (r_a < 0.0 || r_b < 0.0) throw std::invalid_argument("symmetric_distance: negative half-width");
    return std::max(0.0, std::abs(mu_a * c_a - mu_b * c_b) - (std::abs(mu_a) * r_a + std::abs(mu_b) * r_b));
}

double minkowski_distance_to_origin(const std::vector<ScaledTerm>& terms) {
    double centre = 0.0;
    double spread = 0.0;
    for (const auto& t : terms) {
        if (t.r < 0.0) throw std::invalid_argument("minkowski_distance_to_origin: negative half-width");
        centre += t.c * t.gamma;
        spread += t.r * std::abs(t.gamma);
    }
    return std::max(0.0, std::abs(centre) - spread);
}

void write_slices_csv(std::ostream& os, const std::vector<SrgSlice>& slices) {
    os << "omega,re,im\n";
    for (const auto& s : slices)
        for (const cplx z : s.boundary) fmt::print(os, "{:.17g},{:.17g},{:.17g}\n", s.omega, z.real(), z.imag());
}

} // namespace srgcert
