#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "srgcert/errors.hpp"
#include "srgcert/network.hpp"

using namespace srgcert;

namespace {

NetworkSpec fourbus() {
    NetworkSpec n;
    n.nodes = {1, 2, 3, 4};
    n.grounded = {1};
    n.lines = {{2, 4, 0.05, 0.05}, {3, 4, 0.1, 0.1}, {4, 1, 0.5, 0.5}};
    n.shunts = {{4, 1.281, 3.14}};
    n.converter_nodes = {2, 3};
    return n;
}

} // namespace

TEST(LineBlock, LoadImpedanceAtZeroFrequency) {
    const CMatrix y = line_block(1.281, 3.14, kNominalOmega, 0.0);
    const double d = 1.281 * 1.281 + 3.14 * 3.14;
    EXPECT_NEAR(std::abs(y(0, 0) - 1.281 / d), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(y(0, 1) - 3.14 / d), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(y(1, 0) + 3.14 / d), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(y(1, 1) - 1.281 / d), 0.0, 1e-15);
}

TEST(LineBlock, PureResistor) {
    const CMatrix y = line_block(2.0, 0.0, kNominalOmega, 5.0);
    EXPECT_LT((y - 0.5 * CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(LineBlock, PropertyInverseOfImpedance) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.01, 2.0), lw(-2.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        const double r = u(rng), x = u(rng), w = std::pow(10.0, lw(rng));
        CMatrix z(2, 2);
        const cplx diag(r, x * w / kNominalOmega);
        z << diag, -x, x, diag;
        EXPECT_LT((line_block(r, x, kNominalOmega, w) * z - CMatrix::Identity(2, 2)).norm(), 1e-12);
    }
}

TEST(Assemble, BlocksSumToShunts) {
    NetworkSpec n = fourbus();
    n.grounded.clear();
    const CMatrix y = assemble(n, 3.0);
    ASSERT_EQ(y.rows(), 8);
    // Blocks of a Laplacian sum to zero; only the shunt at node 4 remains.
    CMatrix col_total = CMatrix::Zero(2, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) col_total += y.block(2 * i, 2 * j, 2, 2);
    EXPECT_LT((col_total - line_block(1.281, 3.14, kNominalOmega, 3.0)).norm(), 1e-12);
}

TEST(KronReduce, MatchesFullSolve) {
    NetworkSpec n = fourbus();
    n.grounded.clear();
    n.shunts.push_back({1, 0.2, 0.1});
    const double w = 4.0;
    const CMatrix y = assemble(n, w);
    const CMatrix yr = kron_reduce(y, {1, 2}, w);
    ASSERT_EQ(yr.rows(), 4);
    // Voltages at the kept nodes for currents injected there only.
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(8);
    i(2) = cplx(1.0, 0.5);
    i(5) = cplx(-0.3, 0.2);
    const Eigen::VectorXcd v = y.lu().solve(i);
    Eigen::VectorXcd ik(4), vk(4);
    ik << i(2), i(3), i(4), i(5);
    vk << v(2), v(3), v(4), v(5);
    EXPECT_LT((yr * vk - ik).norm(), 1e-12);
}

TEST(KronReduce, SingularInteriorThrows) {
    CMatrix y = CMatrix::Zero(4, 4);
    y.block(0, 0, 2, 2) = CMatrix::Identity(2, 2);
    EXPECT_THROW(kron_reduce(y, {0}, 1.0), NumericalError);
}

TEST(GridAdmittance, SeriesLineToGroundIsLineBlock) {
    NetworkSpec n;
    n.nodes = {1, 2};
    n.grounded = {1};
    n.lines = {{1, 2, 0.1, 0.3}};
    n.converter_nodes = {2};
    const GridAdmittanceEvaluator g(n);
    EXPECT_LT((g(2.0) - line_block(0.1, 0.3, kNominalOmega, 2.0)).norm(), 1e-14);
}

TEST(GridAdmittance, FourBusShapeAndSymmetry) {
    const GridAdmittanceEvaluator g(fourbus());
    EXPECT_EQ(g.converter_count(), 2u);
    EXPECT_EQ(g.block_of(3), 1u);
    const CMatrix y = g(1.0);
    ASSERT_EQ(y.rows(), 4);
    // Reciprocal network: the off-diagonal 2x2 blocks coincide.
    EXPECT_LT((y.block(0, 2, 2, 2) - y.block(2, 0, 2, 2)).norm(), 1e-12);
}

TEST(NetworkValidate, RejectsBadSpecs) {
    auto n = fourbus();
    n.lines.push_back({2, 9, 0.1, 0.1});
    EXPECT_THROW(validate(n), std::invalid_argument);
    n = fourbus();
    n.lines.pop_back();
    n.lines.pop_back();
    EXPECT_THROW(validate(n), std::invalid_argument); // node 3 disconnected
    n = fourbus();
    n.grounded = {2};
    EXPECT_THROW(validate(n), std::invalid_argument);
    n = fourbus();
    n.lines[0].r = -1.0;
    EXPECT_THROW(validate(n), std::invalid_argument);
    n = fourbus();
    n.nodes.push_back(2);
    EXPECT_THROW(validate(n), std::invalid_argument);
    EXPECT_NO_THROW(validate(fourbus()));
}
