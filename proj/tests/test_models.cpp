#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "reference_models.hpp"
#include "srgcert/errors.hpp"
#include "srgcert/models.hpp"

using namespace srgcert;

namespace {

double max_rel(const CMatrix& a, const CMatrix& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double scale = std::max(std::abs(b(i, j)), 1e-300);
            const double err = std::abs(a(i, j) - b(i, j));
            worst = std::max(worst, std::abs(b(i, j)) == 0.0 ? err : err / scale);
        }
    return worst;
}

} // namespace

TEST(GflAffine, MatchesAssembledAdmittance) {
    const auto c = reference::table_gfl();
    const auto f = reference::table_filter();
    const AffineLpvModel m = gfl_affine(c, f);
    ASSERT_EQ(m.parameter_count(), 2u);
    EXPECT_TRUE(m.map_is_identity());
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lw(-2.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const double id = u(rng), iq = u(rng), w = std::pow(10.0, lw(rng));
        EXPECT_LE(max_rel(m.eval({id, iq}, w), reference::gfl(c, f, id, iq, w)), 1e-10);
    }
}

TEST(GflAffine, ZeroCurrentGivesBase) {
    const AffineLpvModel m = gfl_affine(reference::table_gfl(), reference::table_filter());
    EXPECT_LT((m.eval({0.0, 0.0}, 3.0) - m.base_at(3.0)).norm(), 1e-15);
    // Y2 is off-diagonal.
    const CMatrix y2 = m.term_at(1, 3.0);
    EXPECT_EQ(y2(0, 0), cplx(0.0, 0.0));
    EXPECT_EQ(y2(1, 1), cplx(0.0, 0.0));
}

TEST(GfmExact, MatchesDirectSubstitution) {
    const auto c = reference::table_gfm();
    const auto f = reference::table_filter();
    const double w = 2.0 * std::numbers::pi * 10.0;
    const CMatrix y = gfm_exact(c, f, {-0.4, 0.3, 1.0, 0.0}, w);
    EXPECT_LE(max_rel(y, reference::gfm_exact(c, f, -0.4, 0.3, 1.0, w)), 1e-12);
}

TEST(GfmAffine, MatchesTruncatedSeries) {
    const auto c = reference::table_gfm();
    const auto f = reference::table_filter();
    const SeriesApproxConfig cfg{-15.0, 1};
    const AffineLpvModel m = gfm_affine(c, f, cfg);
    EXPECT_EQ(m.parameter_count(), 7u);
    EXPECT_TRUE(m.has_parameter_map());
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.7, 0.7), lw(-2.0, 3.0);
    for (int t = 0; t < 50; ++t) {
        const double id = u(rng), iq = u(rng), w = std::pow(10.0, lw(rng));
        const CMatrix y = m.eval(m.gamma_from({id, iq}), w);
        EXPECT_LE(max_rel(y, reference::gfm_series(c, f, cfg, id, iq, 1.0, w)), 1e-9);
    }
}

TEST(GfmAffine, ExactWhenSeriesCollapses) {
    const auto c = reference::table_gfm();
    const auto f = reference::table_filter();
    const AffineLpvModel m = gfm_affine(c, f, {0.0, 0});
    for (double id : {-0.5, 0.0, 0.8})
        for (double w : {0.05, 1.0, 40.0})
            EXPECT_LE(max_rel(m.eval(m.gamma_from({id, 0.0}), w), gfm_exact(c, f, {id, 0.0, 1.0, 0.0}, w)), 1e-10);
}

TEST(GfmAffine, HigherOrderReducesErrorWhereSeriesConverges) {
    const auto c = reference::table_gfm();
    const auto f = reference::table_filter();
    const std::vector<double> ws{0.01, 0.1, 1.0, 3.0, 10.0, 100.0, 1000.0};
    double prev = std::numeric_limits<double>::infinity();
    for (int order = 0; order <= 3; ++order) {
        const AffineLpvModel m = gfm_affine(c, f, {-15.0, order});
        double worst = 0.0;
        for (double w : ws)
            for (double id : {-0.6, 0.0, 0.6})
                for (double iq : {0.0, 0.2, 0.6, 0.9})
                    worst = std::max(worst, max_rel(m.eval(m.gamma_from({id, iq}), w), gfm_exact(c, f, {id, iq, 1.0, 0.0}, w)));
        EXPECT_LT(worst, prev) << "order " << order;
        prev = worst;
    }
}

TEST(GfmAffine, SeriesDivergesForNegativeReactiveCurrentAtHighFrequency) {
    // |i_q0 + alpha| > |M(j omega) + alpha| once M is small and i_q0 < 0.
    const auto c = reference::table_gfm();
    const std::vector<double> ws{0.01, 1.0, 100.0, 1000.0};
    EXPECT_GT(series_divergence_ratio(c, {-15.0, 1}, ws, 1.0), 1.0);
    EXPECT_LT(series_divergence_ratio(c, {-15.0, 1}, {0.01, 0.1}, 1.0), 1.0);
}

TEST(Models, SetpointMappingRoundTrip) {
    const OperatingPoint op = setpoint_to_currents(0.4, 0.3);
    EXPECT_DOUBLE_EQ(op.i_d0, -0.4);
    EXPECT_DOUBLE_EQ(op.i_q0, 0.3);
    double p = 0.0, q = 0.0;
    currents_to_setpoint(op, p, q);
    EXPECT_DOUBLE_EQ(p, 0.4);
    EXPECT_DOUBLE_EQ(q, 0.3);
}

TEST(Models, RotationAtZeroIsIdentityAndPreservesNorm) {
    CMatrix y(2, 2);
    y << cplx(1, 2), cplx(3, -1), cplx(0.5, 0), cplx(-2, 1);
    EXPECT_LT((rotate_global(y, 0.0) - y).norm(), 1e-15);
    EXPECT_NEAR(rotate_global(y, 0.7).norm(), y.norm(), 1e-12);
    EXPECT_LT((rotate_global(rotate_global(y, 0.7), -0.7) - y).norm(), 1e-12);
}

TEST(Models, ValidationRejectsBadParameters) {
    auto gfm = reference::table_gfm();
    gfm.j = 0.0;
    EXPECT_THROW(validate(gfm, ConverterKind::gfm), std::invalid_argument);
    auto f = reference::table_filter();
    f.l_f = 0.0;
    EXPECT_THROW(validate(f), std::invalid_argument);
    EXPECT_NO_THROW(validate(reference::table_gfl(), ConverterKind::gfl));
    EXPECT_THROW(converter_kind_from_string("statcom"), std::invalid_argument);
    EXPECT_EQ(converter_kind_from_string(to_string(ConverterKind::gfm)), ConverterKind::gfm);
}

TEST(ConverterModel, OpenLoopPoles) {
    const ConverterModel gfm(ConverterKind::gfm, reference::table_gfm(), reference::table_filter());
    EXPECT_EQ(gfm.open_loop_rhp_poles({-0.4, 0.3, 1.0, 0.0}), 1); // 1 - i_q0 (J s^2 + D s) has a positive root
    EXPECT_EQ(gfm.open_loop_rhp_poles({-0.4, -0.3, 1.0, 0.0}), 0);
    const ConverterModel gfl(ConverterKind::gfl, reference::table_gfl(), reference::table_filter());
    EXPECT_EQ(gfl.open_loop_rhp_poles({-0.3, 0.3, 1.0, 0.0}), 0);
}

TEST(ConverterModel, IdentityStub) {
    const ConverterModel id(ConverterKind::identity, {}, {});
    EXPECT_EQ(id.certificate_model().parameter_count(), 0u);
    EXPECT_LT((id.exact({}, 3.0) - CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(ConverterModel, GflExactEqualsAffine) {
    const ConverterModel gfl(ConverterKind::gfl, reference::table_gfl(), reference::table_filter());
    const OperatingPoint op{-0.3, 0.3, 1.0, 0.0};
    EXPECT_LT((gfl.exact(op, 2.0) - gfl.certificate_model().eval(gfl.gamma(op), 2.0)).norm(), 1e-12);
}

TEST(LoopScalars, IntegratorPoleAtOriginThrows) {
    EXPECT_THROW(loop_scalars(reference::table_gfl(), reference::table_filter(), cplx(0.0, 0.0)), NumericalError);
}
