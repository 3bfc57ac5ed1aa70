#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "trapdyn/error.hpp"
#include "trapdyn/opt.hpp"
#include "trapdyn/system_io.hpp"
#include "trapdyn/systems.hpp"

using namespace trapdyn;

TEST(Systems, TwoState) {
  const auto ts = systems::two_state();
  EXPECT_EQ(lossless_defect(ts), 0.0);
  Eigen::Vector2d x(0.0, 0.25);
  EXPECT_LT(eval_rhs(ts, x).norm(), 1e-15);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(ts.L_sym()).eigenvalues();
  EXPECT_DOUBLE_EQ(ev(0), -4.0);
  EXPECT_DOUBLE_EQ(ev(1), -1.0);
}

TEST(Systems, Lorenz) {
  const auto lz = systems::lorenz();
  EXPECT_EQ(lossless_defect(lz), 0.0);
  EXPECT_EQ(lz.c().norm(), 0.0);
  Eigen::Vector3d m(0, 0, 38);
  const ShiftedForm sf(lz, m);
  EXPECT_LT(sf.lambda_max(), 0.0);
  EXPECT_LT((sf.d() - Eigen::Vector3d(0, 0, -304.0 / 3.0)).norm(), 1e-12);
  const auto other = systems::lorenz(16, 45.92, 4);
  EXPECT_EQ(other.L()(0, 0), -16);
  EXPECT_EQ(other.L()(1, 0), 45.92);
}

TEST(Systems, StackedIdentitySeedIsLorenz) {
  const auto st = systems::stacked_lorenz(1, 0);
  EXPECT_EQ(st.W, Matrix::Identity(3, 3));
  EXPECT_EQ(system_to_json(st.system), system_to_json(systems::lorenz()));
}

TEST(Systems, StackedIsLosslessAndTraps) {
  for (int K : {1, 2, 3}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto st = systems::stacked_lorenz(K, seed);
      EXPECT_EQ(st.system.dim(), 3 * K);
      EXPECT_LE(lossless_defect(st.system), 1e-12);
      EXPECT_NEAR(solve_existence(st.system).a_star, -1.0, 1e-6);
    }
  }
  EXPECT_THROW(systems::stacked_lorenz(0, 1), Error);
}

TEST(Systems, StackedDeterministic) {
  EXPECT_EQ(system_to_json(systems::stacked_lorenz(3, 7).system),
            system_to_json(systems::stacked_lorenz(3, 7).system));
  EXPECT_NE(system_to_json(systems::stacked_lorenz(3, 7).system),
            system_to_json(systems::stacked_lorenz(3, 8).system));
}

TEST(Systems, RandomOrthogonal) {
  for (int n : {1, 2, 5, 12}) {
    const Matrix W = systems::random_orthogonal(n, 17);
    EXPECT_LT((W.transpose() * W - Matrix::Identity(n, n)).norm(), 1e-12);
    EXPECT_EQ(W, systems::random_orthogonal(n, 17));
  }
  EXPECT_EQ(std::abs(systems::random_orthogonal(1, 3)(0, 0)), 1.0);
}

TEST(Systems, ZeroSystem) {
  const auto z = systems::zero_system(4);
  EXPECT_EQ(z.dim(), 4);
  EXPECT_TRUE(z.terms().empty());
  EXPECT_EQ(solve_existence(z).status, ExistenceStatus::kNoTrappingRegion);
}
