#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srgcert/geometry.hpp"

using namespace srgcert;
using namespace srgcert::geom;

TEST(ConvexHull, SquareWithInteriorAndCollinearPoints) {
    const auto h = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}});
    ASSERT_EQ(h.size(), 4u);
    double a = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto p = h[i], q = h[(i + 1) % h.size()];
        a += p.real() * q.imag() - q.real() * p.imag();
    }
    EXPECT_NEAR(a / 2.0, 1.0, 1e-15); // positive area: counter-clockwise
}

TEST(ConvexHull, DegenerateInputs) {
    EXPECT_EQ(convex_hull({{1, 1}, {1, 1}}).size(), 1u);
    EXPECT_EQ(convex_hull({{0, 0}, {1, 1}, {2, 2}}).size(), 2u);
}

TEST(SignedDistance, InsideNegativeOutsidePositive) {
    const auto h = convex_hull({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    EXPECT_NEAR(signed_distance({1, 1}, h), -1.0, 1e-15);
    EXPECT_NEAR(signed_distance({3, 1}, h), 1.0, 1e-15);
    EXPECT_NEAR(signed_distance({3, 3}, h), std::sqrt(2.0), 1e-15);
}

TEST(Hausdorff, TranslatedSquares) {
    const auto a = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    const auto b = convex_hull({{0.25, 0}, {1.25, 0}, {1.25, 1}, {0.25, 1}});
    EXPECT_NEAR(hausdorff(a, b), 0.25, 1e-15);
    EXPECT_NEAR(hausdorff(a, a), 0.0, 1e-15);
}

TEST(Clip, HalfPlaneKeepsLabels) {
    auto sq = inscribed_polygon(1.0, 4, -1); // diamond through (+-1, 0), (0, +-1)
    EXPECT_NEAR(area(sq.vertices), 2.0, 1e-14);
    const auto cut = clip(sq, {Point(1.0, 0.0), 0.0, 7}); // x <= 0
    EXPECT_NEAR(area(cut.vertices), 1.0, 1e-14);
    ASSERT_EQ(cut.vertices.size(), cut.edge_source.size());
    EXPECT_EQ(std::count(cut.edge_source.begin(), cut.edge_source.end(), 7), 1);
    const auto gone = clip(sq, {Point(1.0, 0.0), -2.0, 3});
    EXPECT_TRUE(gone.empty());
}

TEST(InscribedPolygon, AreaConvergesToDisk) {
    const auto p = inscribed_polygon(1.0, 360, -1);
    EXPECT_NEAR(area(p.vertices), std::numbers::pi, 2e-4);
    EXPECT_LT(area(p.vertices), std::numbers::pi);
    EXPECT_GT(inside_margin(Point(0, 0), p.vertices), 0.99);
    EXPECT_LT(inside_margin(Point(1.1, 0), p.vertices), 0.0);
}

TEST(Clip, PropertyRandomHalfPlanesStayConvexAndShrink) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto poly = inscribed_polygon(1.0, 36, -1);
        double prev = area(poly.vertices);
        for (int k = 0; k < 5 && !poly.empty(); ++k) {
            const HalfPlane h{Point(u(rng), u(rng)), 0.5 * u(rng) + 0.2, k};
            poly = clip(poly, h);
            const double a = area(poly.vertices);
            EXPECT_LE(a, prev + 1e-12);
            prev = a;
            for (const auto& v : poly.vertices) EXPECT_LE(h.normal.dot(v), h.rhs + 1e-12);
        }
    }
}
