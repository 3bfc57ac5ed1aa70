#pragma once

#include <optional>
#include <string>

#include "trapdyn/model.hpp"
#include "trapdyn/sdp.hpp"

namespace trapdyn {

struct SolverOptions {
  sdp::Options sdp;
  /// Margin for strict negativity; a* < -eps_neg * (1 + ||L_s||_2) certifies
  /// a trapping region.
  double eps_neg = 1e-6;
  /// Backend; nullptr selects sdp::default_solver().
  const sdp::ConicSolver* backend = nullptr;

  const sdp::ConicSolver& solver() const {
    return backend ? *backend : sdp::default_solver();
  }
};

/// Bookkeeping copied out of an sdp::Solution for reports.
struct SolverInfo {
  std::string backend;
  std::string status;
  int iterations = 0;
  double seconds = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
};

enum class ExistenceStatus { kTrappingExists, kNoTrappingRegion, kNumericallyMarginal };

std::string to_string(ExistenceStatus status);

/// Outcome of min a s.t. A_s(m) <= a I.
struct ExistenceResult {
  /// lambda_1(A_s(m_star)) from a direct eigensolve.
  double a_star = 0.0;
  /// Objective value reported by the SDP backend.
  double a_solver = 0.0;
  Vector m_star;
  ExistenceStatus status = ExistenceStatus::kNumericallyMarginal;
  /// Primal optimal point of the SDP, scaled to unit Frobenius norm.
  std::optional<Matrix> certificate;
  bool certificate_valid = false;
  double eps_neg = 0.0;
  SolverInfo solver;
};

/// Theorem-of-alternatives check on a candidate Z: Z psd (to -1e-8),
/// |<Q^(i), Z>| <= 1e-6 for all i and <L_s, Z> >= -1e-6, with ||Z||_F = 1.
bool certificate_is_valid(const LosslessQuadraticSystem& sys, const Matrix& Z);

ExistenceResult solve_existence(const LosslessQuadraticSystem& sys,
                                const SolverOptions& opts = {});

/// ||d(m)|| / |lambda_1|.
double conservative_radius(const ShiftedForm& sf);

struct TightRadius {
  double radius = 0.0;
  /// Empty on the d(m) = 0 branch.
  std::optional<double> lambda_star;
};

/// Tight radius by one-dimensional minimization of the Schur-reduced dual,
/// g(lambda) = -(lambda^2 / 4) d^T (I + lambda A_s)^+ d over
/// lambda >= 1 / |lambda_1|.
TightRadius tight_radius_scalar(const ShiftedForm& sf);

/// g(lambda) itself; +inf when d has a non-negligible component in the null
/// space of I + lambda A_s or lambda is below 1 / |lambda_1|.
double schur_dual_objective(const ShiftedForm& sf, double lambda);

struct TightRadiusSdp {
  double radius = 0.0;
  double lambda_star = 0.0;
  double gamma_star = 0.0;
  SolverInfo solver;
};

/// Tight radius from the (n+1)x(n+1) dual LMI in (lambda, gamma).
TightRadiusSdp tight_radius_sdp(const ShiftedForm& sf,
                                const SolverOptions& opts = {});

/// Points y = center + basis * w, ||w|| = radius, where the tight ball touches
/// the non-decreasing-energy set.
struct CriticalSphere {
  Vector center;
  Matrix basis;
  double radius = 0.0;
  int rank = 0;

  /// center +/- radius * basis.col(c) for every basis column, or just the
  /// center when the null space is empty.
  std::vector<Vector> points() const;
  /// center + basis * w.
  Vector point(const Eigen::Ref<const Vector>& w) const {
    return center + basis * w;
  }
};

CriticalSphere critical_sphere(const ShiftedForm& sf, double lambda_star,
                               double tight_radius);

struct TrappingRegion {
  Vector m;
  double R_tight = 0.0;
  double R_conservative = 0.0;
  std::optional<double> lambda_star;
  /// ||m|| + R_tight.
  double ultimate_bound_original = 0.0;
};

struct CenterPolicy {
  enum class Kind { kSolver, kZero, kUser };
  Kind kind = Kind::kSolver;
  Vector user_m;

  static CenterPolicy solver() { return {}; }
  static CenterPolicy zero() { return {Kind::kZero, {}}; }
  static CenterPolicy user(Vector m) { return {Kind::kUser, std::move(m)}; }
};

struct AnalysisReport {
  int n = 0;
  double lossless_defect = 0.0;
  ExistenceResult existence;
  std::string center_policy;
  /// Always set: the optimal shift is one element of a possibly larger set.
  bool center_may_be_nonunique = true;
  std::optional<TrappingRegion> region;
  std::optional<Vector> A_s_eigenvalues;
  std::optional<Vector> d;
  std::optional<TightRadiusSdp> sdp_route;
  std::optional<CriticalSphere> critical;
  std::optional<EnergyEllipsoid> ellipsoid;
  /// |R_scalar - R_sdp| / R_scalar.
  std::optional<double> route_disagreement;
};

/// Existence SDP, then (when a trapping region exists) both radius routes,
/// the critical sphere and the ellipsoid at the center chosen by policy.
AnalysisReport analyze(const LosslessQuadraticSystem& sys,
                       const CenterPolicy& policy = {},
                       const SolverOptions& opts = {});

}  // namespace trapdyn
