#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace srgcert::geom {

using cplx = std::complex<double>;
using Point = Eigen::Vector2d;

/// Counter-clockwise convex hull without collinear vertices. Returns one
/// point for coincident input and two for collinear input.
std::vector<cplx> convex_hull(std::vector<cplx> pts);

/// Signed distance to a convex CCW polygon: negative inside, positive outside.
/// Degenerate hulls (1 or 2 vertices) have no interior and return >= 0.
double signed_distance(cplx p, const std::vector<cplx>& hull);

/// Hausdorff distance between the filled convex polygons A and B.
double hausdorff(const std::vector<cplx>& a, const std::vector<cplx>& b);

double segment_distance(cplx p, cplx a, cplx b);

/// Half-plane n . x <= rhs, tagged with an integer source label.
struct HalfPlane {
    Point normal;
    double rhs = 0.0;
    int source = -1;
};

/// Convex polygon (CCW) whose edge i runs from vertex i to i+1 and carries label edge_source[i].
struct LabeledPolygon {
    std::vector<Point> vertices;
    std::vector<int> edge_source;

    bool empty() const { return vertices.size() < 3; }
};

/// Sutherland-Hodgman clip of a convex polygon against one half-plane.
LabeledPolygon clip(const LabeledPolygon& poly, const HalfPlane& h);

/// Regular n-gon inscribed in the circle of the given radius, starting at angle 0.
LabeledPolygon inscribed_polygon(double radius, int sides, int source);

double area(const std::vector<Point>& poly);

/// Minimum over edges of the inward distance; positive inside, negative outside.
double inside_margin(const Point& p, const std::vector<Point>& poly);

} // namespace srgcert::geom
