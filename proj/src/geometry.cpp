#include "srgcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace srgcert::geom {

namespace {

double cross(cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

} // namespace

std::vector<cplx> convex_hull(std::vector<cplx> pts) {
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;

    double scale = 0.0;
    for (auto p : pts) scale = std::max(scale, std::abs(p));
    const double eps = 1e-15 * std::max(scale * scale, std::numeric_limits<double>::min());

    std::vector<cplx> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= eps) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    if (h.size() == 1 && pts.size() > 1) h.push_back(pts.back());
    return h;
}

double segment_distance(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

double signed_distance(cplx p, const std::vector<cplx>& hull) {
    if (hull.empty()) return std::numeric_limits<double>::infinity();
    if (hull.size() == 1) return std::abs(p - hull[0]);
    if (hull.size() == 2) return segment_distance(p, hull[0], hull[1]);
    bool inside = true;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const cplx a = hull[i];
        const cplx b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < 0.0) inside = false;
        best = std::min(best, segment_distance(p, a, b));
    }
    return inside ? -best : best;
}

double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    // For convex sets the directed distance is attained at a vertex.
    double d = 0.0;
    for (auto p : a) d = std::max(d, std::max(0.0, signed_distance(p, b)));
    for (auto p : b) d = std::max(d, std::max(0.0, signed_distance(p, a)));
    return d;
}

LabeledPolygon clip(const LabeledPolygon& poly, const HalfPlane& h) {
    LabeledPolygon out;
    const std::size_t n = poly.vertices.size();
    if (n == 0) return out;
    out.vertices.reserve(n + 1);
    out.edge_source.reserve(n + 1);
    auto value = [&](const Point& p) { return h.normal.dot(p) - h.rhs; };
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = poly.vertices[i];
        const Point& nxt = poly.vertices[(i + 1) % n];
        const double vc = value(cur);
        const double vn = value(nxt);
        const bool cur_in = vc <= 0.0;
        const bool nxt_in = vn <= 0.0;
        if (cur_in) {
            out.vertices.push_back(cur);
            out.edge_source.push_back(poly.edge_source[i]);
        }
        if (cur_in != nxt_in) {
            const double t = vc / (vc - vn);
            out.vertices.push_back(cur + t * (nxt - cur));
            out.edge_source.push_back(cur_in ? h.source : poly.edge_source[i]);
        }
    }
    // Drop consecutive duplicates created by vertices lying on the clip line.
    LabeledPolygon clean;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) {
        const Point& p = out.vertices[i];
        if (!clean.vertices.empty() && (p - clean.vertices.back()).norm() <= 1e-15) {
            clean.edge_source.back() = out.edge_source[i];
            continue;
        }
        clean.vertices.push_back(p);
        clean.edge_source.push_back(out.edge_source[i]);
    }
    while (clean.vertices.size() > 1 && (clean.vertices.front() - clean.vertices.back()).norm() <= 1e-15) {
        clean.vertices.pop_back();
        clean.edge_source.pop_back();
    }
    if (clean.vertices.size() < 3 || area(clean.vertices) <= 1e-300) return {};
    return clean;
}

LabeledPolygon inscribed_polygon(double radius, int sides, int source) {
    LabeledPolygon p;
    for (int i = 0; i < sides; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(sides);
        p.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a));
        p.edge_source.push_back(source);
    }
    return p;
}

double area(const std::vector<Point>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        s += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * s;
}

double inside_margin(const Point& p, const std::vector<Point>& poly) {
    if (poly.size() < 3) return -std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        const Point e = b - a;
        const double len = e.norm();
        if (len == 0.0) continue;
        // Inward normal of a CCW edge is (-e.y, e.x).
        const double d = (-e.y() * (p.x() - a.x()) + e.x() * (p.y() - a.y())) / len;
        m = std::min(m, d);
    }
    return m;
}

} // namespace srgcert::geom
