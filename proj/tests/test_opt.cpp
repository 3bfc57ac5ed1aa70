#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "trapdyn/error.hpp"
#include "trapdyn/opt.hpp"
#include "trapdyn/systems.hpp"

using namespace trapdyn;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ShiftedForm two_state_at_zero() { return {systems::two_state(), Vector::Zero(2)}; }
ShiftedForm lorenz_at_38() { return {systems::lorenz(), vec({0, 0, 38})}; }

LosslessQuadraticSystem damped_equilibrium(int n) {
  return {Vector::Zero(n), -Matrix::Identity(n, n), {}};
}

}  // namespace

TEST(Existence, Lorenz) {
  const auto res = solve_existence(systems::lorenz());
  EXPECT_EQ(res.status, ExistenceStatus::kTrappingExists);
  EXPECT_NEAR(res.a_star, -1.0, 1e-6);
  EXPECT_NEAR(res.a_solver, -1.0, 1e-6);
  const ShiftedForm sf(systems::lorenz(), res.m_star);
  EXPECT_LT(sf.lambda_max(), 0.0);
  EXPECT_NEAR(sf.lambda_max(), res.a_star, 1e-12);
  EXPECT_FALSE(res.certificate.has_value());
}

TEST(Existence, ZeroSystemCertificate) {
  for (int n : {1, 2, 3, 5}) {
    const auto sys = systems::zero_system(n);
    const auto res = solve_existence(sys);
    EXPECT_EQ(res.status, ExistenceStatus::kNoTrappingRegion);
    EXPECT_NEAR(res.a_star, 0.0, 1e-6);
    ASSERT_TRUE(res.certificate.has_value());
    EXPECT_TRUE(res.certificate_valid);
    const Matrix expected = Matrix::Identity(n, n) / std::sqrt(double(n));
    EXPECT_LT((*res.certificate - expected).norm(), 1e-6);
    EXPECT_TRUE(certificate_is_valid(sys, *res.certificate));
  }
}

TEST(Existence, UnstableLinearPartHasCertificate) {
  // Q = 0 and L_s with a positive eigenvalue: no shift can help.
  Matrix L = Matrix::Zero(2, 2);
  L(0, 0) = 1.0;
  L(1, 1) = -2.0;
  const LosslessQuadraticSystem sys(Vector::Ones(2), L, {});
  const auto res = solve_existence(sys);
  EXPECT_EQ(res.status, ExistenceStatus::kNoTrappingRegion);
  EXPECT_NEAR(res.a_star, 1.0, 1e-6);
  ASSERT_TRUE(res.certificate.has_value());
  EXPECT_TRUE(res.certificate_valid);
}

TEST(Existence, StackedK3) {
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const auto res = solve_existence(systems::stacked_lorenz(3, seed).system);
    EXPECT_EQ(res.status, ExistenceStatus::kTrappingExists);
    EXPECT_NEAR(res.a_star, -1.0, 1e-6) << "seed " << seed;
  }
}

TEST(Existence, TwoState) {
  const auto res = solve_existence(systems::two_state());
  EXPECT_EQ(res.status, ExistenceStatus::kTrappingExists);
  EXPECT_NEAR(res.a_star, -4.0, 1e-5);
}

TEST(Certificate, RejectsBadCandidates) {
  const auto lz = systems::lorenz();
  EXPECT_FALSE(certificate_is_valid(lz, Matrix::Identity(3, 3) / std::sqrt(3.0)));
  const auto z = systems::zero_system(2);
  Matrix notpsd = Matrix::Zero(2, 2);
  notpsd(0, 0) = 1.0 / std::sqrt(2.0);
  notpsd(1, 1) = -1.0 / std::sqrt(2.0);
  EXPECT_FALSE(certificate_is_valid(z, notpsd));
  EXPECT_FALSE(certificate_is_valid(z, Matrix::Zero(2, 2)));
}

TEST(ConservativeRadius, Examples) {
  EXPECT_NEAR(conservative_radius(two_state_at_zero()), 1.0, 1e-12);
  EXPECT_NEAR(conservative_radius(lorenz_at_38()), 304.0 / 3.0, 1e-9);
  EXPECT_EQ(conservative_radius(ShiftedForm(damped_equilibrium(3), Vector::Zero(3))), 0.0);
  EXPECT_THROW(conservative_radius(ShiftedForm(systems::lorenz(), Vector::Zero(3))),
               NotNegativeDefiniteError);
}

TEST(TightRadiusScalar, Examples) {
  const auto ts = tight_radius_scalar(two_state_at_zero());
  EXPECT_NEAR(ts.radius, 1.0 / std::sqrt(12.0), 1e-9);
  ASSERT_TRUE(ts.lambda_star.has_value());
  EXPECT_NEAR(*ts.lambda_star, 1.0, 1e-6);

  const auto lz = tight_radius_scalar(lorenz_at_38());
  EXPECT_NEAR(lz.radius, std::sqrt(0.25 * std::pow(304.0 / 3.0, 2) / (8.0 / 3.0 - 1.0)),
              1e-6);
  EXPECT_NEAR(*lz.lambda_star, 1.0, 1e-6);

  const auto eq = tight_radius_scalar(ShiftedForm(damped_equilibrium(2), Vector::Zero(2)));
  EXPECT_EQ(eq.radius, 0.0);
  EXPECT_FALSE(eq.lambda_star.has_value());
}

TEST(TightRadiusScalar, DualObjective) {
  const auto sf = lorenz_at_38();
  EXPECT_NEAR(schur_dual_objective(sf, 1.0), 277248.0 / 180.0, 1e-9);
  EXPECT_TRUE(std::isinf(schur_dual_objective(sf, 0.5)));
  EXPECT_GT(schur_dual_objective(sf, 2.0), schur_dual_objective(sf, 1.0));
}

TEST(TightRadiusSdp, Examples) {
  const auto ts = tight_radius_sdp(two_state_at_zero());
  EXPECT_NEAR(ts.gamma_star, 1.0 / 12.0, 1e-7);
  EXPECT_NEAR(ts.lambda_star, 1.0, 1e-5);
  const auto lz = tight_radius_sdp(lorenz_at_38());
  EXPECT_NEAR(lz.gamma_star, 277248.0 / 180.0, 1e-4);
  EXPECT_NEAR(lz.lambda_star, 1.0, 1e-5);
  EXPECT_THROW(tight_radius_sdp(ShiftedForm(damped_equilibrium(2), Vector::Zero(2))),
               DegenerateError);
}

TEST(TightRadiusSdp, StackedMatchesScalar) {
  const auto st = systems::stacked_lorenz(2, 11);
  const auto ex = solve_existence(st.system);
  const ShiftedForm sf(st.system, ex.m_star);
  const double a = tight_radius_sdp(sf).radius;
  const double b = tight_radius_scalar(sf).radius;
  EXPECT_LE(std::abs(a - b) / b, 1e-6);
}

TEST(CriticalSphere, TwoState) {
  const auto cs = critical_sphere(two_state_at_zero(), 1.0, 1.0 / std::sqrt(12.0));
  EXPECT_LT((cs.center - vec({0, 1.0 / 6.0})).norm(), 1e-9);
  EXPECT_NEAR(cs.radius, std::sqrt(1.0 / 12.0 - 1.0 / 36.0), 1e-9);
  ASSERT_EQ(cs.basis.cols(), 1);
  EXPECT_NEAR(std::abs(cs.basis(0, 0)), 1.0, 1e-12);
  const auto pts = cs.points();
  ASSERT_EQ(pts.size(), 2u);
  for (const auto& p : pts) {
    EXPECT_NEAR(std::abs(p(0)), 0.2357022604, 1e-9);
    EXPECT_NEAR(p(1), 1.0 / 6.0, 1e-9);
    EXPECT_NEAR(p.norm(), 1.0 / std::sqrt(12.0), 1e-9);
    EXPECT_NEAR(energy_rate(two_state_at_zero(), p), 0.0, 1e-12);
  }
}

TEST(CriticalSphere, Lorenz) {
  const auto sf = lorenz_at_38();
  const auto tr = tight_radius_scalar(sf);
  const auto cs = critical_sphere(sf, *tr.lambda_star, tr.radius);
  EXPECT_LT((cs.center - vec({0, 0, -30.4})).norm(), 1e-6);
  EXPECT_NEAR(cs.radius, 24.8215, 1e-3);
  ASSERT_EQ(cs.basis.cols(), 1);
  EXPECT_NEAR(std::abs(cs.basis(1, 0)), 1.0, 1e-12);
}

TEST(CriticalSphere, EmptyNullSpace) {
  // lambda above the boundary: I + lambda A_s is nonsingular.
  const auto sf = two_state_at_zero();
  const auto cs = critical_sphere(sf, 0.5, 0.25);
  EXPECT_EQ(cs.basis.cols(), 0);
  EXPECT_EQ(cs.radius, 0.0);
  ASSERT_EQ(cs.points().size(), 1u);
  EXPECT_EQ(cs.points()[0], cs.center);
}

TEST(Analyze, TwoStateAtZero) {
  const auto rep = analyze(systems::two_state(), CenterPolicy::zero());
  ASSERT_TRUE(rep.region.has_value());
  EXPECT_NEAR(rep.region->R_conservative, 1.0, 1e-12);
  EXPECT_NEAR(rep.region->R_tight, 0.288675, 1e-6);
  ASSERT_TRUE(rep.critical.has_value());
  EXPECT_EQ(rep.critical->points().size(), 2u);
  EXPECT_EQ(rep.center_policy, "zero");
  ASSERT_TRUE(rep.route_disagreement.has_value());
  EXPECT_LE(*rep.route_disagreement, 1e-6);
}

TEST(Analyze, ZeroSystem) {
  const auto rep = analyze(systems::zero_system(3));
  EXPECT_EQ(rep.existence.status, ExistenceStatus::kNoTrappingRegion);
  EXPECT_FALSE(rep.region.has_value());
  EXPECT_TRUE(rep.existence.certificate.has_value());
}

TEST(Analyze, LorenzAuto) {
  const auto rep = analyze(systems::lorenz());
  ASSERT_TRUE(rep.region.has_value());
  EXPECT_NEAR(rep.region->ultimate_bound_original,
              rep.region->m.norm() + rep.region->R_tight, 1e-12);
  EXPECT_TRUE(rep.center_may_be_nonunique);
}

TEST(Analyze, UserCenterNotTrapping) {
  EXPECT_THROW(analyze(systems::lorenz(), CenterPolicy::user(Vector::Zero(3))),
               NotNegativeDefiniteError);
}

TEST(Property, TightBelowConservative) {
  for (int seed = 0; seed < props::kPropertySeeds; ++seed) {
    const auto sys = props::random_trapping_system(2 + seed % 5, seed);
    const ShiftedForm sf(sys, Vector::Zero(sys.dim()));
    const auto tr = tight_radius_scalar(sf);
    const double rc = conservative_radius(sf);
    EXPECT_LE(tr.radius, rc * (1 + 1e-12)) << "seed " << seed;
    const auto sdp = tight_radius_sdp(sf);
    EXPECT_LE(std::abs(sdp.radius - tr.radius), 1e-6 * tr.radius) << "seed " << seed;
  }
}

TEST(Property, RotationEquivariance) {
  for (int seed = 0; seed < props::kPropertySeeds; ++seed) {
    const int n = 2 + seed % 4;
    const auto sys = props::random_trapping_system(n, seed);
    const Matrix W = systems::random_orthogonal(n, seed + 500);
    const auto rot = props::rotate(sys, W);
    const auto a = solve_existence(sys);
    const auto b = solve_existence(rot);
    EXPECT_NEAR(a.a_star, b.a_star, 1e-6 * (1 + std::abs(a.a_star))) << "seed " << seed;
    // Same center mapped through W gives the same radius.
    const ShiftedForm sa(sys, a.m_star);
    const ShiftedForm sb(rot, W * a.m_star);
    EXPECT_NEAR(tight_radius_scalar(sa).radius, tight_radius_scalar(sb).radius,
                1e-8 * (1 + tight_radius_scalar(sa).radius))
        << "seed " << seed;
  }
}
