#include <gtest/gtest.h>

#include "srgcert/models.hpp"
#include "srgcert/network.hpp"
#include "srgcert/oracle.hpp"

using namespace srgcert;

namespace {

/// Scalar loop L(s) = num(s) / den(s) with the given open-loop RHP pole count.
LoopEvaluator scalar_loop(std::function<cplx(cplx)> l, int p) {
    return LoopEvaluator(
        [l](double w) {
            CMatrix m(1, 1);
            m(0, 0) = l(cplx(0.0, w));
            return m;
        },
        1, p);
}

OracleVerdict run(const LoopEvaluator& l) { return nyquist_verdict(l, default_oracle_grid()); }

} // namespace

TEST(Nyquist, FirstOrderLag) {
    const auto v = run(scalar_loop([](cplx s) { return 2.0 / (s + 1.0); }, 0));
    EXPECT_EQ(v.verdict, Verdict::stable);
    EXPECT_EQ(v.encirclements, 0);
    EXPECT_NEAR(v.min_eigenlocus_distance_to_minus_one, 1.0, 1e-6);
}

TEST(Nyquist, NegativeGainIsUnstable) {
    const auto v = run(scalar_loop([](cplx s) { return -2.0 / (s + 1.0); }, 0));
    EXPECT_EQ(v.verdict, Verdict::unstable);
    EXPECT_EQ(v.closed_loop_rhp_poles, 1);
}

TEST(Nyquist, OpenLoopUnstableStabilisedByGain) {
    const auto ok = run(scalar_loop([](cplx s) { return 2.0 / (s - 1.0); }, 1));
    EXPECT_EQ(ok.verdict, Verdict::stable);
    EXPECT_EQ(ok.encirclements, -1);
    const auto bad = run(scalar_loop([](cplx s) { return 0.5 / (s - 1.0); }, 1));
    EXPECT_EQ(bad.verdict, Verdict::unstable);
}

TEST(Nyquist, IntegratorAtOrigin) {
    const auto v = run(scalar_loop([](cplx s) { return 2.0 / (s * (s + 1.0)); }, 0));
    EXPECT_EQ(v.origin_order, 1);
    EXPECT_EQ(v.verdict, Verdict::stable);
}

TEST(Nyquist, ThirdOrderGainMargin) {
    // 1 + k/(s+1)^3: stable iff k < 8.
    EXPECT_EQ(run(scalar_loop([](cplx s) { return 5.0 / std::pow(s + 1.0, 3); }, 0)).verdict, Verdict::stable);
    const auto v = run(scalar_loop([](cplx s) { return 11.0 / std::pow(s + 1.0, 3); }, 0));
    EXPECT_EQ(v.verdict, Verdict::unstable);
    EXPECT_EQ(v.closed_loop_rhp_poles, 2);
}

TEST(Nyquist, ImproperLoopGrowth) {
    // 1 + (s + 2) has its zero at s = -3 and grows like s.
    const auto v = run(scalar_loop([](cplx s) { return s + 2.0; }, 0));
    EXPECT_EQ(v.infinity_order, 1);
    EXPECT_EQ(v.verdict, Verdict::stable);
}

TEST(Nyquist, LocusThroughMinusOneIsInconclusive) {
    const auto v = run(scalar_loop([](cplx) { return cplx(-1.0, 0.0); }, 0));
    EXPECT_EQ(v.verdict, Verdict::inconclusive);
}

TEST(Nyquist, MultivariableDiagonal) {
    const LoopEvaluator l(
        [](double w) {
            const cplx s(0.0, w);
            CMatrix m = CMatrix::Zero(2, 2);
            m(0, 0) = 2.0 / (s + 1.0);
            m(1, 1) = -2.0 / (s + 1.0);
            return m;
        },
        2, 0);
    const auto v = run(l);
    EXPECT_EQ(v.verdict, Verdict::unstable);
    EXPECT_EQ(v.closed_loop_rhp_poles, 1);
}

TEST(Nyquist, NonAsymptoticGridIsInconclusive) {
    // A pole pair near the grid's low end breaks the slope estimate.
    const auto v = nyquist_verdict(scalar_loop([](cplx s) { return 1.0 / (s + 1.5); }, 0),
                                   make_log_grid(1.0, 1e6, 200));
    EXPECT_EQ(v.verdict, Verdict::inconclusive);
}

TEST(MakeLoop, IdentityConverterBehindLine) {
    NetworkSpec n;
    n.nodes = {1, 2};
    n.grounded = {1};
    n.lines = {{1, 2, 0.1, 0.3}};
    n.converter_nodes = {2};
    const GridAdmittanceEvaluator grid(n);
    const ConverterModel stub(ConverterKind::identity, {}, {});
    const auto loop = make_loop(grid, {{&stub, {}, 0.0}});
    EXPECT_EQ(loop.open_loop_rhp_poles(), 0);
    // L = Z_line: det(I + Z) vanishes only in the left half plane.
    const auto v = run(loop);
    EXPECT_EQ(v.infinity_order, 2);
    EXPECT_EQ(v.verdict, Verdict::stable);
    EXPECT_THROW(make_loop(grid, {}), std::invalid_argument);
}
