#include "trapdyn/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "trapdyn/error.hpp"

namespace trapdyn::sdp {
namespace {

using Blocks = std::vector<Matrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

void symmetrize(Blocks& a) {
  for (auto& blk : a) blk = 0.5 * (blk + blk.transpose()).eval();
}

// <A_i, P> for every constraint; P need not be symmetric since A_i is.
Vector apply_A(const Problem& p, const Blocks& P) {
  Vector out(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i) out(i) = inner(p.A[i], P);
  return out;
}

// sum_i y_i A_i
Blocks apply_At(const Problem& p, const Vector& y) {
  Blocks out(p.num_blocks());
  for (int b = 0; b < p.num_blocks(); ++b) {
    out[b] = Matrix::Zero(p.block_sizes[b], p.block_sizes[b]);
    for (int i = 0; i < p.num_constraints(); ++i) {
      if (y(i) != 0.0) out[b] += y(i) * p.A[i][b];
    }
  }
  return out;
}

// Largest alpha with X + alpha dX psd, given the Cholesky factor of X.
double max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dX) {
  if (dX.rows() == 1) {
    const double x = chol.matrixL()(0, 0) * chol.matrixL()(0, 0);
    return dX(0, 0) >= 0.0 ? std::numeric_limits<double>::infinity()
                           : -x / dX(0, 0);
  }
  const Matrix T = chol.matrixL().solve(dX);
  Matrix M = chol.matrixL().solve(T.transpose());
  M = 0.5 * (M + M.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

struct Residuals {
  Vector rp;
  Blocks rd;
  double pobj = 0.0;
  double dobj = 0.0;
  double rel_gap = 0.0;
  double pinf = 0.0;
  double dinf = 0.0;
  double mu = 0.0;

  double worst() const { return std::max({rel_gap, pinf, dinf}); }
};

Residuals residuals(const Problem& p, const Blocks& X, const Vector& y,
                    const Blocks& S, double norm_b, double norm_C, int order) {
  Residuals r;
  r.rp = p.b - apply_A(p, X);
  r.rd = apply_At(p, y);
  for (int b = 0; b < p.num_blocks(); ++b) r.rd[b] = p.C[b] - r.rd[b] - S[b];
  r.pobj = inner(p.C, X);
  r.dobj = p.b.dot(y);
  const double xs = inner(X, S);
  r.mu = xs / order;
  const double denom = 1.0 + std::abs(r.pobj) + std::abs(r.dobj);
  r.rel_gap = std::max(std::abs(r.pobj - r.dobj), std::abs(xs)) / denom;
  r.pinf = r.rp.norm() / (1.0 + norm_b);
  r.dinf = frob(r.rd) / (1.0 + norm_C);
  return r;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kNearOptimal:
      return "near_optimal";
    case Status::kMaxIterations:
      return "max_iterations";
    case Status::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

void Problem::validate() const {
  const int nb = num_blocks();
  if (static_cast<int>(C.size()) != nb) {
    throw DimensionError("sdp: C must have one entry per block");
  }
  if (static_cast<int>(A.size()) != num_constraints()) {
    throw DimensionError("sdp: A must have one entry per constraint");
  }
  for (int b = 0; b < nb; ++b) {
    const int s = block_sizes[b];
    if (s < 1 || C[b].rows() != s || C[b].cols() != s) {
      throw DimensionError("sdp: block " + std::to_string(b) +
                           " of C has the wrong shape");
    }
    for (int i = 0; i < num_constraints(); ++i) {
      if (static_cast<int>(A[i].size()) != nb || A[i][b].rows() != s ||
          A[i][b].cols() != s) {
        throw DimensionError("sdp: A[" + std::to_string(i) + "] block " +
                             std::to_string(b) + " has the wrong shape");
      }
    }
  }
}

Solution InteriorPointSolver::solve(const Problem& p,
                                    const Options& options) const {
  p.validate();
  const auto start = std::chrono::steady_clock::now();
  const int m = p.num_constraints();
  const int nb = p.num_blocks();
  int order = 0;
  for (int s : p.block_sizes) order += s;

  const double norm_b = p.b.norm();
  const double norm_C = frob(p.C);

  // Starting point scaled to the data, as in SDPT3.
  Blocks X(nb), S(nb);
  Vector y = Vector::Zero(m);
  for (int b = 0; b < nb; ++b) {
    const int s = p.block_sizes[b];
    double xi = std::max(10.0, std::sqrt(double(s)));
    double eta = xi;
    double max_a = 0.0;
    for (int i = 0; i < m; ++i) {
      const double na = p.A[i][b].norm();
      xi = std::max(xi, s * (1.0 + std::abs(p.b(i))) / (1.0 + na));
      max_a = std::max(max_a, na);
    }
    eta = std::max(eta, (1.0 + std::max(max_a, p.C[b].norm())) /
                            std::sqrt(double(s)));
    X[b] = xi * Matrix::Identity(s, s);
    S[b] = eta * Matrix::Identity(s, s);
  }

  Solution best;
  double best_worst = std::numeric_limits<double>::infinity();
  auto keep = [&](const Residuals& r, int iter) {
    if (r.worst() >= best_worst) return;
    best_worst = r.worst();
    best.X = X;
    best.S = S;
    best.y = y;
    best.primal_objective = r.pobj;
    best.dual_objective = r.dobj;
    best.relative_gap = r.rel_gap;
    best.primal_infeasibility = r.pinf;
    best.dual_infeasibility = r.dinf;
    best.iterations = iter;
  };
  auto finish = [&](Status fallback) {
    if (best_worst <= options.tolerance) {
      best.status = Status::kOptimal;
    } else if (best_worst <= options.near_tolerance) {
      best.status = Status::kNearOptimal;
    } else {
      best.status = fallback;
    }
    best.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    return best;
  };

  int stalled = 0;
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const Residuals r = residuals(p, X, y, S, norm_b, norm_C, order);
    keep(r, iter);
    if (r.worst() <= options.tolerance) return finish(Status::kOptimal);
    if (iter == options.max_iterations) break;

    std::vector<Eigen::LLT<Matrix>> chol_x(nb), chol_s(nb);
    Blocks Sinv(nb);
    bool ok = true;
    for (int b = 0; b < nb; ++b) {
      chol_x[b].compute(X[b]);
      chol_s[b].compute(S[b]);
      if (chol_x[b].info() != Eigen::Success ||
          chol_s[b].info() != Eigen::Success) {
        ok = false;
        break;
      }
      Sinv[b] = chol_s[b].solve(
          Matrix::Identity(p.block_sizes[b], p.block_sizes[b]));
      Sinv[b] = 0.5 * (Sinv[b] + Sinv[b].transpose()).eval();
    }
    if (!ok) return finish(Status::kNumericalFailure);

    // Schur complement M_ij = <A_i, X A_j S^-1>.
    Matrix M = Matrix::Zero(m, m);
    for (int b = 0; b < nb; ++b) {
      for (int j = 0; j < m; ++j) {
        if (p.A[j][b].isZero(0.0)) continue;
        const Matrix G = X[b] * p.A[j][b] * Sinv[b];
        for (int i = 0; i < m; ++i) {
          M(i, j) += p.A[i][b].cwiseProduct(G).sum();
        }
      }
    }
    M = 0.5 * (M + M.transpose()).eval();
    Eigen::LLT<Matrix> chol_m(M);
    if (chol_m.info() != Eigen::Success) {
      const double reg = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      M.diagonal().array() += reg;
      chol_m.compute(M);
      if (chol_m.info() != Eigen::Success) {
        return finish(Status::kNumericalFailure);
      }
    }

    // X Rd S^-1 is shared by both solves.
    Blocks xrs(nb);
    for (int b = 0; b < nb; ++b) xrs[b] = X[b] * r.rd[b] * Sinv[b];
    const Vector a_xrs = apply_A(p, xrs);

    // Solves for the direction whose complementarity target is
    // X + dX = target - X dS S^-1.
    auto direction = [&](const Blocks& target, Blocks& dX, Vector& dy,
                         Blocks& dS) {
      dy = chol_m.solve(r.rp - apply_A(p, target) + a_xrs);
      dS = apply_At(p, dy);
      for (int b = 0; b < nb; ++b) dS[b] = r.rd[b] - dS[b];
      dX.resize(nb);
      for (int b = 0; b < nb; ++b) dX[b] = target[b] - X[b] * dS[b] * Sinv[b];
      symmetrize(dX);
      symmetrize(dS);
    };
    auto steps = [&](const Blocks& dX, const Blocks& dS) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = ap;
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(chol_x[b], dX[b]));
        ad = std::min(ad, max_step(chol_s[b], dS[b]));
      }
      return std::pair{ap, ad};
    };

    // Predictor: affine-scaling direction.
    Blocks target(nb);
    for (int b = 0; b < nb; ++b) target[b] = -X[b];
    Blocks dXa, dSa;
    Vector dya;
    direction(target, dXa, dya, dSa);
    auto [ap_a, ad_a] = steps(dXa, dSa);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);

    double xs_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      xs_aff += (X[b] + ap_a * dXa[b]).cwiseProduct(S[b] + ad_a * dSa[b]).sum();
    }
    const double ratio = std::max(0.0, xs_aff) / (r.mu * order);
    const double expon = std::max(1.0, 3.0 * std::min(ap_a, ad_a) * std::min(ap_a, ad_a));
    const double sigma = std::min(1.0, std::pow(ratio, expon));

    // Corrector: centering plus second-order term.
    for (int b = 0; b < nb; ++b) {
      target[b] = sigma * r.mu * Sinv[b] - X[b] - dXa[b] * dSa[b] * Sinv[b];
    }
    Blocks dX, dS;
    Vector dy;
    direction(target, dX, dy, dS);
    auto [ap, ad] = steps(dX, dS);
    const double gamma =
        std::max(options.step_fraction, 0.9 + 0.09 * std::min(ap_a, ad_a));
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (int b = 0; b < nb; ++b) {
      X[b] += ap * dX[b];
      S[b] += ad * dS[b];
    }
    y += ad * dy;
    symmetrize(X);
    symmetrize(S);

    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 3) return finish(Status::kNumericalFailure);
  }
  return finish(Status::kMaxIterations);
}

const ConicSolver& default_solver() {
  static const InteriorPointSolver solver;
  return solver;
}

}  // namespace trapdyn::sdp
