#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "srgcert/certify.hpp"
#include "srgcert/models.hpp"
#include "srgcert/srg.hpp"

using namespace srgcert;

namespace {

/// Constant series over n samples.
std::pair<MarginSeries, TermMetricsSeries> constant_series(std::size_t n, double rho, std::vector<double> c,
                                                            std::vector<double> r) {
    const FrequencyGrid g = make_log_grid(0.1, 10.0, n);
    MarginSeries m{g, std::vector<double>(n, rho)};
    TermMetricsSeries t;
    t.grid = g;
    for (std::size_t k = 0; k < c.size(); ++k) {
        t.c.push_back(std::vector<double>(n, c[k]));
        t.r.push_back(std::vector<double>(n, r[k]));
    }
    return {m, t};
}

std::pair<MarginSeries, TermMetricsSeries> random_series(std::mt19937& rng, std::size_t n, std::size_t np) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FrequencyGrid g = n == 1 ? FrequencyGrid({1.0}) : make_log_grid(0.1, 10.0, n);
    MarginSeries m{g, {}};
    TermMetricsSeries t;
    t.grid = g;
    t.c.assign(np, {});
    t.r.assign(np, {});
    for (std::size_t i = 0; i < n; ++i) {
        m.rho0.push_back(0.2 + u(rng));
        for (std::size_t k = 0; k < np; ++k) {
            t.c[k].push_back(4.0 * u(rng) - 2.0);
            t.r[k].push_back(u(rng));
        }
    }
    return {m, t};
}

double cells_area(const FeasibleRegion& r) {
    double a = 0.0;
    for (const auto& c : r.cells) a += geom::area(c.polygon.vertices);
    return a;
}

} // namespace

TEST(TauMargin, Examples) {
    EXPECT_DOUBLE_EQ(tau_margin(1.0, {0.0, 0.0}), 1.0);
    EXPECT_NEAR(tau_margin(1.0, {1.0, 0.5}), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(tau_margin(1.0, {-2.0, 0.5}), 0.0);
}

TEST(TauMargin, PropertyMatchesDenseScan) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0), ub(0.0, 2.0);
    for (int t = 0; t < 300; ++t) {
        const cplx p(u(rng), u(rng));
        const Disk d{u(rng), ub(rng)};
        double scan = std::abs(p); // tau -> 0+
        for (int k = 1; k <= 20000; ++k) {
            const double tau = k / 20000.0;
            scan = std::min(scan, std::max(0.0, std::abs(p + tau * d.a) - tau * d.b));
        }
        const double got = tau_margin(p, d);
        EXPECT_LE(got, scan + 1e-9);
        EXPECT_GE(got, scan - 1e-3); // scan resolution
    }
}

TEST(GridMargin, PointSliceAgainstOriginDisk) {
    const SrgSlice s{1.0, {cplx(1.0, 0.0)}, 1};
    const auto m = grid_margin({s}, {Disk{0.0, 0.0}});
    EXPECT_DOUBLE_EQ(m.rho0.at(0), 1.0);
    EXPECT_THROW(grid_margin({s, s}, {Disk{}}), std::invalid_argument);
}

TEST(CertificateCheck, ZeroParameterCase) {
    auto [m, t] = constant_series(5, 0.5, {1.0}, {0.25});
    EXPECT_TRUE(theorem2_check(m, t, {0.0}));
    m.rho0[2] = 0.0;
    EXPECT_FALSE(theorem2_check(m, t, {0.0}));
}

TEST(CertificateCheck, SingleParameterThreshold) {
    const auto [m, t] = constant_series(5, 0.5, {1.0}, {0.25});
    EXPECT_TRUE(theorem2_check(m, t, {0.666}));
    EXPECT_TRUE(theorem2_check(m, t, {-0.666}));
    EXPECT_FALSE(theorem2_check(m, t, {0.667}));
    EXPECT_FALSE(theorem2_check(m, t, {-0.667}));
    const auto slack = certificate_slack(m, t, {0.4});
    EXPECT_NEAR(slack.value, 0.5 - 0.3, 1e-15);
}

TEST(FeasibleRegion, UnconstrainedIsFullDisk) {
    const auto [m, t] = constant_series(4, 1e-3, {0.0, 0.0}, {0.0, 0.0});
    const FeasibleRegion r = feasible_region(m, t, 1.0);
    EXPECT_EQ(r.cells.size(), 4u);
    EXPECT_NEAR(cells_area(r), geom::area(bound_polygon(1.0).vertices), 1e-12);
    EXPECT_EQ(r.membership({0.5, -0.5}), Membership::inside);
    EXPECT_EQ(r.membership({0.9, 0.9}), Membership::outside);
}

TEST(FeasibleRegion, SingleParameterInterval) {
    const auto [m, t] = constant_series(3, 0.5, {1.0}, {0.25});
    const FeasibleRegion r = feasible_region(m, t, 1.0);
    ASSERT_EQ(r.cells.size(), 2u);
    double lo = 1.0, hi = -1.0;
    for (const auto& c : r.cells) {
        lo = std::min(lo, c.lo);
        hi = std::max(hi, c.hi);
    }
    EXPECT_NEAR(lo, -2.0 / 3.0, 1e-8);
    EXPECT_NEAR(hi, 2.0 / 3.0, 1e-8);
    EXPECT_EQ(r.membership({0.6}), Membership::inside);
    EXPECT_EQ(r.membership({0.7}), Membership::outside);
}

TEST(FeasibleRegion, ZeroMarginEmpties) {
    auto [m, t] = constant_series(3, 0.5, {1.0, 0.0}, {0.1, 0.1});
    m.rho0[1] = 0.0;
    const FeasibleRegion r = feasible_region(m, t, 1.0);
    EXPECT_TRUE(r.empty());
    ASSERT_TRUE(r.zero_margin_index.has_value());
    EXPECT_EQ(*r.zero_margin_index, 1u);
}

TEST(FeasibleRegion, CellsLieInsideBound) {
    std::mt19937 rng(2);
    const auto [m, t] = random_series(rng, 20, 2);
    const FeasibleRegion r = feasible_region(m, t, 0.8);
    for (const auto& c : r.cells)
        for (const auto& v : c.polygon.vertices) {
            EXPECT_LE(v.norm(), 0.8 + 1e-12);
            for (std::size_t k = 0; k < 2; ++k) EXPECT_GE(c.signs[k] * v[static_cast<Eigen::Index>(k)], -1e-12);
        }
}

TEST(FeasibleRegion, IntersectionOverFrequencyMatchesDirect) {
    std::mt19937 rng(8);
    const auto [m, t] = random_series(rng, 15, 2);
    const FeasibleRegion direct = feasible_region(m, t, 1.0);
    const FeasibleRegion inter = region_intersection_over_frequency(per_frequency_regions(m, t, 1.0));
    EXPECT_NEAR(cells_area(direct), cells_area(inter), 1e-9);
    EXPECT_TRUE(region_contains(direct, inter));
    EXPECT_TRUE(region_contains(inter, direct));
}

TEST(FeasibleRegion, SingleFrequencyEqualsItsCells) {
    std::mt19937 rng(12);
    const auto [m, t] = random_series(rng, 1, 2);
    const auto per = per_frequency_regions(m, t, 1.0);
    ASSERT_EQ(per.size(), 1u);
    EXPECT_NEAR(cells_area(per[0]), cells_area(feasible_region(m, t, 1.0)), 1e-15);
}

TEST(FeasibleRegion, MoreFrequenciesShrink) {
    std::mt19937 rng(13);
    const auto [m, t] = random_series(rng, 30, 2);
    MarginSeries m2{FrequencyGrid(std::vector<double>(m.grid.samples().begin(), m.grid.samples().begin() + 10)),
                    std::vector<double>(m.rho0.begin(), m.rho0.begin() + 10)};
    TermMetricsSeries t2;
    t2.grid = m2.grid;
    for (std::size_t k = 0; k < 2; ++k) {
        t2.c.emplace_back(t.c[k].begin(), t.c[k].begin() + 10);
        t2.r.emplace_back(t.r[k].begin(), t.r[k].begin() + 10);
    }
    EXPECT_TRUE(region_contains(feasible_region(m2, t2), feasible_region(m, t)));
}

TEST(FeasibleRegion, PropertyMembershipAgreesWithCertificate) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto bound = bound_polygon(1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const auto [m, t] = random_series(rng, 25, 2);
        const FeasibleRegion r = feasible_region(m, t, 1.0);
        for (int k = 0; k < 2000; ++k) {
            const std::vector<double> g{u(rng), u(rng)};
            const auto s = certificate_slack(m, t, g).value;
            const double in_bound = geom::inside_margin({g[0], g[1]}, bound.vertices);
            const double measure = r.inside_measure(g);
            if (std::abs(s) < 1e-6 || std::abs(in_bound) < 1e-6 || std::abs(measure) < 1e-6) continue;
            EXPECT_EQ(s > 0.0 && in_bound > 0.0, measure > 0.0) << g[0] << "," << g[1];
        }
    }
}

TEST(FeasibleRegion, HighDimensionalUsesConstraints) {
    std::mt19937 rng(5);
    const auto [m, t] = random_series(rng, 10, 3);
    const FeasibleRegion r = feasible_region(m, t, 1.0);
    EXPECT_FALSE(r.has_polygons());
    EXPECT_EQ(r.cells.size(), 8u);
    const std::vector<double> g{0.01, -0.02, 0.01};
    EXPECT_EQ(r.membership(g) == Membership::inside, theorem2_check(m, t, g));
}

TEST(MarginCsv, RoundTripIsBitExact) {
    std::mt19937 rng(3);
    const auto [m, t] = random_series(rng, 50, 2);
    std::stringstream ms, ts;
    write_margin_csv(ms, m);
    write_metrics_csv(ts, t);
    const MarginSeries m2 = read_margin_csv(ms);
    const TermMetricsSeries t2 = read_metrics_csv(ts);
    EXPECT_EQ(m2.grid.samples(), m.grid.samples());
    EXPECT_EQ(m2.rho0, m.rho0);
    EXPECT_EQ(t2.c, t.c);
    EXPECT_EQ(t2.r, t.r);
    const CMatrix eye = CMatrix::Identity(2, 2);
    const AffineLpvModel identity_map(TransferMatrix::constant(eye),
                                      {{0, TransferMatrix::constant(eye)}, {1, TransferMatrix::constant(eye)}},
                                      {"i_d0", "i_q0"});
    std::ostringstream a, b;
    write_region_csv(a, map_to_physical(feasible_region(m, t), identity_map));
    write_region_csv(b, map_to_physical(feasible_region(m2, t2), identity_map));
    EXPECT_EQ(a.str(), b.str());
}

TEST(MarginCsv, RejectsMalformedInput) {
    std::istringstream bad("omega,rho0\n1.0,abc\n");
    EXPECT_THROW(read_margin_csv(bad), std::exception);
    std::istringstream header("freq,x\n1,2\n");
    EXPECT_THROW(read_margin_csv(header), std::exception);
}

TEST(SeriesConstruction, ThreadCountDoesNotChangeResults) {
    const FrequencyGrid g = make_log_grid(0.1, 100.0, 24);
    ControllerParams c;
    c.k_ccp = 0.06;
    c.k_cci = 28.27;
    c.k_pcp = c.k_vcp = 31.41;
    c.k_pci = c.k_vci = 246.74;
    c.k_pllp = 402.12;
    c.k_plli = 4042.6;
    const AffineLpvModel model = gfl_affine(c, {0.05, 0.05, 0.06, kNominalOmega});
    CMatrix load(2, 2);
    load << 0.3, 0.1, -0.1, 0.3;
    const auto f = [&load](double) { return load; };
    const auto d1 = disk_series(f, g, 64, 1);
    const auto d4 = disk_series(f, g, 64, 4);
    const auto m1 = margin_series(model, d1, g, 64, 1);
    const auto m4 = margin_series(model, d4, g, 64, 4);
    EXPECT_EQ(m1.rho0, m4.rho0);
    EXPECT_EQ(term_metrics(model, g, 1).c, term_metrics(model, g, 3).c);
    const auto tm = term_metrics(model, g, 1);
    for (const auto& rk : tm.r)
        for (double r : rk) EXPECT_GE(r, 0.0);
    for (double c2 : tm.c[1]) EXPECT_NEAR(c2, 0.0, 1e-12); // off-diagonal term: zero centre
}
