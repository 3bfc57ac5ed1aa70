#include "trapdyn/opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "trapdyn/error.hpp"

namespace trapdyn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolverInfo info_from(const sdp::ConicSolver& backend,
                     const sdp::Solution& sol) {
  SolverInfo info;
  info.backend = backend.name();
  info.status = sdp::to_string(sol.status);
  info.iterations = sol.iterations;
  info.seconds = sol.seconds;
  info.relative_gap = sol.relative_gap;
  info.primal_infeasibility = sol.primal_infeasibility;
  info.dual_infeasibility = sol.dual_infeasibility;
  return info;
}

// Isometric vectorization of the upper triangle: <A, B>_F = svec(A).svec(B).
Vector svec(const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  Vector v(n * (n + 1) / 2);
  int p = 0;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r <= c; ++r) {
      v(p++) = (r == c) ? A(r, c) : std::sqrt(2.0) * A(r, c);
    }
  }
  return v;
}

Matrix smat(const Eigen::Ref<const Vector>& v, int n) {
  Matrix A(n, n);
  int p = 0;
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r <= c; ++r) {
      const double x = (r == c) ? v(p) : v(p) / std::sqrt(2.0);
      A(r, c) = x;
      A(c, r) = x;
      ++p;
    }
  }
  return A;
}

double spectral_norm_sym(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void require_negative_definite(const ShiftedForm& sf) {
  if (!sf.negative_definite()) {
    std::ostringstream msg;
    msg << "A_s(m) is not negative definite (lambda_1 = " << sf.lambda_max()
        << ")";
    throw NotNegativeDefiniteError(msg.str());
  }
}

// Eigenvalues of I + lambda A_s at or below this magnitude count as zero.
double rank_threshold(const ShiftedForm& sf, double lambda) {
  const double norm_as = std::abs(sf.eigenvalues()(sf.dim() - 1));
  return 1e-8 * (1.0 + std::abs(lambda) * norm_as);
}

}  // namespace

std::string to_string(ExistenceStatus status) {
  switch (status) {
    case ExistenceStatus::kTrappingExists:
      return "TrappingExists";
    case ExistenceStatus::kNoTrappingRegion:
      return "NoTrappingRegion";
    case ExistenceStatus::kNumericallyMarginal:
      return "NumericallyMarginal";
  }
  return "unknown";
}

bool certificate_is_valid(const LosslessQuadraticSystem& sys, const Matrix& Z) {
  const int n = sys.dim();
  if (Z.rows() != n || Z.cols() != n || !Z.allFinite()) return false;
  if ((Z - Z.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (std::abs(Z.norm() - 1.0) > 1e-6) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Z, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-8) return false;
  Vector qz = Vector::Zero(n);
  for (const auto& t : sys.terms()) {
    qz(t.i) += (t.j == t.k ? 1.0 : 2.0) * t.value * Z(t.j, t.k);
  }
  if (qz.cwiseAbs().maxCoeff() > 1e-6) return false;
  return sys.L_sym().cwiseProduct(Z).sum() >= -1e-6;
}

ExistenceResult solve_existence(const LosslessQuadraticSystem& sys,
                                const SolverOptions& opts) {
  const int n = sys.dim();
  const Matrix Ls = sys.L_sym();

  // m enters only through sum_k m_k Q^(k). Reparametrize over an orthonormal
  // basis of that span so the Schur complement stays nonsingular when slices
  // vanish or are linearly dependent.
  Matrix cols(n * (n + 1) / 2, n);
  for (int k = 0; k < n; ++k) cols.col(k) = svec(sys.q_slice(k));
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * std::max(sv(0), 1e-300)) ++rank;

  const double norm_ls = spectral_norm_sym(Ls);
  const double scale = std::max(1.0, norm_ls);

  sdp::Problem prob;
  prob.block_sizes = {n};
  prob.C = {-Ls / scale};
  prob.A.reserve(rank + 1);
  for (int j = 0; j < rank; ++j) {
    prob.A.push_back({-smat(svd.matrixU().col(j), n)});
  }
  prob.A.push_back({-Matrix::Identity(n, n)});
  prob.b = Vector::Zero(rank + 1);
  prob.b(rank) = -1.0;

  const auto& backend = opts.solver();
  const sdp::Solution sol = backend.solve(prob, opts.sdp);
  if (!sol.usable()) {
    throw SolverError("existence SDP did not converge",
                      sdp::to_string(sol.status));
  }

  ExistenceResult res;
  res.solver = info_from(backend, sol);
  const Vector t = scale * sol.y.head(rank);
  res.m_star = svd.matrixV().leftCols(rank) *
               t.cwiseQuotient(sv.head(rank));
  res.a_solver = scale * sol.y(rank);
  const ShiftedForm sf(sys, res.m_star);
  res.a_star = sf.lambda_max();
  // The slack a bounds lambda_1 up to the dual residual.
  const double verify_tol = 1e-6 * (1.0 + norm_ls);
  if (!std::isfinite(res.a_star) ||
      std::abs(res.a_star - res.a_solver) > verify_tol) {
    std::ostringstream msg;
    msg << "existence SDP failed re-verification: solver a = " << res.a_solver
        << ", lambda_1(A_s(m)) = " << res.a_star;
    throw SolverError(msg.str(), res.solver.status);
  }

  res.eps_neg = opts.eps_neg * (1.0 + norm_ls);
  if (res.a_star < -res.eps_neg) {
    res.status = ExistenceStatus::kTrappingExists;
    return res;
  }
  Matrix Z = sol.X[0];
  const double zn = Z.norm();
  if (zn > 0.0) Z /= zn;
  res.certificate_valid = certificate_is_valid(sys, Z);
  res.certificate = std::move(Z);
  res.status = (res.a_star > res.eps_neg || res.certificate_valid)
                   ? ExistenceStatus::kNoTrappingRegion
                   : ExistenceStatus::kNumericallyMarginal;
  return res;
}

double conservative_radius(const ShiftedForm& sf) {
  require_negative_definite(sf);
  return sf.d().norm() / std::abs(sf.lambda_max());
}

double schur_dual_objective(const ShiftedForm& sf, double lambda) {
  require_negative_definite(sf);
  const Vector& lam = sf.eigenvalues();
  const Vector w = sf.eigenvectors().transpose() * sf.d();
  const double zero_component = 1e-10 * sf.d().norm();
  const double thr = rank_threshold(sf, lambda);
  double sum = 0.0;
  for (int i = 0; i < sf.dim(); ++i) {
    const double e = 1.0 + lambda * lam(i);
    if (e > thr) return kInf;  // I + lambda A_s is not negative semidefinite
    if (e >= -thr) {
      if (std::abs(w(i)) > zero_component) return kInf;
      continue;
    }
    sum += w(i) * w(i) / e;
  }
  return -0.25 * lambda * lambda * sum;
}

TightRadius tight_radius_scalar(const ShiftedForm& sf) {
  require_negative_definite(sf);
  if (sf.drift_vanishes()) return {0.0, std::nullopt};

  const double boundary = 1.0 / std::abs(sf.lambda_max());
  const double lo = boundary * (1.0 + 1e-12);
  auto g = [&](double x) { return schur_dual_objective(sf, x); };

  // Bracket: double the upper end until g turns upward.
  double g_prev = g(lo);
  double hi = 2.0 * lo;
  for (int it = 0; it < 200; ++it) {
    const double g_hi = g(hi);
    if (g_hi > g_prev) break;
    g_prev = g_hi;
    hi *= 2.0;
  }

  // Golden-section search; g is convex on [lo, inf).
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  for (int it = 0; it < 400 && (b - a) > 1e-10 * std::max(x1, boundary); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = g(x2);
    }
  }
  double best_x = f1 <= f2 ? x1 : x2;
  double best_g = std::min(f1, f2);
  if (const double g_lo = g(lo); g_lo <= best_g) {
    best_x = lo;
    best_g = g_lo;
  }
  if (!std::isfinite(best_g) || best_g < 0.0) {
    std::ostringstream msg;
    msg << "scalar dual minimization failed (g = " << best_g << ")";
    throw InconsistencyError(msg.str());
  }
  return {std::sqrt(best_g), best_x};
}

TightRadiusSdp tight_radius_sdp(const ShiftedForm& sf,
                                const SolverOptions& opts) {
  require_negative_definite(sf);
  if (sf.drift_vanishes()) {
    throw DegenerateError(
        "tight_radius_sdp needs d(m) != 0; the d = 0 branch has radius 0");
  }
  const int n = sf.dim();
  const double l1 = std::abs(sf.lambda_max());
  const double dn = sf.d().norm();
  // Work with A_s / |lambda_1| and d / ||d||; lambda and gamma are rescaled
  // on the way out.
  const Matrix As_hat = sf.A_s() / l1;
  const Vector d_hat = sf.d() / dn;

  // S = -f2(lambda, gamma) = C - lambda A_lambda - gamma A_gamma, plus the
  // 1x1 block lambda >= 0.
  sdp::Problem prob;
  prob.block_sizes = {n + 1, 1};
  Matrix C = Matrix::Zero(n + 1, n + 1);
  C.topLeftCorner(n, n) = -Matrix::Identity(n, n);
  prob.C = {C, Matrix::Zero(1, 1)};

  Matrix A_lambda = Matrix::Zero(n + 1, n + 1);
  A_lambda.topLeftCorner(n, n) = As_hat;
  A_lambda.topRightCorner(n, 1) = 0.5 * d_hat;
  A_lambda.bottomLeftCorner(1, n) = 0.5 * d_hat.transpose();
  Matrix A_gamma = Matrix::Zero(n + 1, n + 1);
  A_gamma(n, n) = -1.0;
  prob.A = {{A_lambda, -Matrix::Ones(1, 1)}, {A_gamma, Matrix::Zero(1, 1)}};
  prob.b = Vector::Zero(2);
  prob.b(1) = -1.0;

  const auto& backend = opts.solver();
  const sdp::Solution sol = backend.solve(prob, opts.sdp);
  if (!sol.usable()) {
    throw SolverError("radius SDP did not converge", sdp::to_string(sol.status));
  }
  const double lambda_hat = sol.y(0);
  const double gamma_hat = sol.y(1);

  // Re-verify the LMI at the returned point.
  Matrix f2 = Matrix::Zero(n + 1, n + 1);
  f2.topLeftCorner(n, n) =
      Matrix::Identity(n, n) + lambda_hat * As_hat;
  f2.topRightCorner(n, 1) = 0.5 * lambda_hat * d_hat;
  f2.bottomLeftCorner(1, n) = 0.5 * lambda_hat * d_hat.transpose();
  f2(n, n) = -gamma_hat;
  Eigen::SelfAdjointEigenSolver<Matrix> es(f2, Eigen::EigenvaluesOnly);
  const double worst = es.eigenvalues()(n);
  if (lambda_hat < 0.0 || worst > 1e-6 * (1.0 + std::abs(gamma_hat))) {
    std::ostringstream msg;
    msg << "radius SDP failed re-verification: lambda = " << lambda_hat
        << ", max eig of f2 = " << worst;
    throw SolverError(msg.str(), sdp::to_string(sol.status));
  }

  TightRadiusSdp out;
  out.lambda_star = lambda_hat / l1;
  out.gamma_star = std::max(0.0, gamma_hat) * (dn / l1) * (dn / l1);
  out.radius = std::sqrt(out.gamma_star);
  out.solver = info_from(backend, sol);
  return out;
}

std::vector<Vector> CriticalSphere::points() const {
  std::vector<Vector> out;
  if (basis.cols() == 0 || radius == 0.0) {
    out.push_back(center);
    return out;
  }
  for (int c = 0; c < basis.cols(); ++c) {
    out.push_back(center + radius * basis.col(c));
    out.push_back(center - radius * basis.col(c));
  }
  return out;
}

CriticalSphere critical_sphere(const ShiftedForm& sf, double lambda_star,
                               double tight_radius) {
  require_negative_definite(sf);
  if (sf.drift_vanishes()) {
    throw DegenerateError("critical sphere is undefined when d(m) = 0");
  }
  const int n = sf.dim();
  const Vector& lam = sf.eigenvalues();
  const Matrix& U = sf.eigenvectors();
  const double thr = rank_threshold(sf, lambda_star);

  CriticalSphere cs;
  cs.center = Vector::Zero(n);
  std::vector<int> null_cols;
  for (int i = 0; i < n; ++i) {
    const double e = 1.0 + lambda_star * lam(i);
    if (std::abs(e) <= thr) {
      null_cols.push_back(i);
      continue;
    }
    cs.center -= 0.5 * lambda_star * (U.col(i).dot(sf.d()) / e) * U.col(i);
  }
  cs.rank = n - static_cast<int>(null_cols.size());
  cs.basis.resize(n, static_cast<Eigen::Index>(null_cols.size()));
  for (std::size_t c = 0; c < null_cols.size(); ++c) {
    cs.basis.col(c) = U.col(null_cols[c]);
  }

  const double r2 = tight_radius * tight_radius;
  const double slack = r2 - cs.center.squaredNorm();
  if (slack < -1e-6 * r2) {
    std::ostringstream msg;
    msg << "critical sphere: ||center||^2 exceeds R*^2 by " << -slack;
    throw InconsistencyError(msg.str());
  }
  cs.radius = null_cols.empty() ? 0.0 : std::sqrt(std::max(0.0, slack));
  return cs;
}

AnalysisReport analyze(const LosslessQuadraticSystem& sys,
                       const CenterPolicy& policy, const SolverOptions& opts) {
  AnalysisReport rep;
  rep.n = sys.dim();
  rep.lossless_defect = lossless_defect(sys);
  rep.existence = solve_existence(sys, opts);
  switch (policy.kind) {
    case CenterPolicy::Kind::kSolver:
      rep.center_policy = "solver";
      break;
    case CenterPolicy::Kind::kZero:
      rep.center_policy = "zero";
      break;
    case CenterPolicy::Kind::kUser:
      rep.center_policy = "user";
      break;
  }
  if (rep.existence.status != ExistenceStatus::kTrappingExists) return rep;

  Vector m;
  switch (policy.kind) {
    case CenterPolicy::Kind::kSolver:
      m = rep.existence.m_star;
      break;
    case CenterPolicy::Kind::kZero:
      m = Vector::Zero(sys.dim());
      break;
    case CenterPolicy::Kind::kUser:
      if (policy.user_m.size() != sys.dim()) {
        throw DimensionError("user center has the wrong dimension");
      }
      m = policy.user_m;
      break;
  }
  const ShiftedForm sf(sys, m);
  require_negative_definite(sf);

  TrappingRegion region;
  region.m = m;
  region.R_conservative = conservative_radius(sf);
  const TightRadius tight = tight_radius_scalar(sf);
  region.R_tight = tight.radius;
  region.lambda_star = tight.lambda_star;
  region.ultimate_bound_original = m.norm() + tight.radius;
  rep.region = region;
  rep.A_s_eigenvalues = sf.eigenvalues();
  rep.d = sf.d();
  rep.ellipsoid = ellipsoid_E(sf);

  if (!sf.drift_vanishes()) {
    rep.sdp_route = tight_radius_sdp(sf, opts);
    const double diff = std::abs(rep.sdp_route->radius - tight.radius) /
                        std::max(tight.radius, 1e-300);
    rep.route_disagreement = diff;
    if (diff > 1e-6) {
      std::ostringstream msg;
      msg << "tight radius routes disagree: scalar " << tight.radius
          << " vs SDP " << rep.sdp_route->radius;
      throw InconsistencyError(msg.str());
    }
    rep.critical = critical_sphere(sf, *tight.lambda_star, tight.radius);
  }
  return rep;
}

}  // namespace trapdyn
