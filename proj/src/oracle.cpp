#include "trapdyn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "trapdyn/error.hpp"

namespace trapdyn::oracle {

std::vector<Vector> sample_E_boundary(const EnergyEllipsoid& ee,
                                      std::size_t count, std::uint64_t seed) {
  if (ee.degenerate) {
    throw DegenerateError("cannot sample a degenerate ellipsoid (d = 0)");
  }
  const int n = ee.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  Vector u(n);
  while (out.size() < count) {
    for (int i = 0; i < n; ++i) u(i) = normal(rng);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    out.push_back(ee.point(u / norm));
  }
  return out;
}

SampleReport brute_force_radius(const EnergyEllipsoid& ee, std::size_t count,
                                std::uint64_t seed) {
  if (ee.degenerate) {
    throw DegenerateError("cannot sample a degenerate ellipsoid (d = 0)");
  }
  // Same stream as sample_E_boundary, without materializing the points.
  const int n = ee.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleReport rep;
  rep.argmax_point = ee.center;
  Vector u(n);
  while (rep.sample_count < count) {
    for (int i = 0; i < n; ++i) u(i) = normal(rng);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    const Vector y = ee.point(u / norm);
    ++rep.sample_count;
    const double r = y.norm();
    if (r > rep.max_norm_found) {
      rep.max_norm_found = r;
      rep.argmax_point = y;
    }
    // Residual of sum_i ((U^T (y - center))_i / alpha_i)^2 = 1.
    const Vector z =
        (ee.axes.transpose() * (y - ee.center)).cwiseQuotient(ee.semi_axes);
    rep.max_constraint_violation =
        std::max(rep.max_constraint_violation, std::abs(z.squaredNorm() - 1.0));
  }
  return rep;
}

LatticeResult lattice_search_shift(const LosslessQuadraticSystem& sys,
                                   double box_halfwidth, int points_per_axis) {
  const int n = sys.dim();
  if (n > 4) {
    std::ostringstream msg;
    msg << "lattice search refused for n = " << n << ": "
        << std::pow(double(points_per_axis), n) << " eigenvalue solves";
    throw TooExpensiveError(msg.str());
  }
  if (points_per_axis < 1) throw Error("points_per_axis must be positive");

  auto coord = [&](int idx) {
    if (points_per_axis == 1) return 0.0;
    return -box_halfwidth + 2.0 * box_halfwidth * idx / (points_per_axis - 1);
  };
  const Matrix Ls = sys.L_sym();
  LatticeResult best;
  best.best_lambda1 = std::numeric_limits<double>::infinity();
  std::vector<int> idx(n, 0);
  Vector m(n);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  while (true) {
    for (int i = 0; i < n; ++i) m(i) = coord(idx[i]);
    es.compute(Ls - sys.contract(m), Eigen::EigenvaluesOnly);
    const double l1 = es.eigenvalues()(n - 1);
    ++best.evaluations;
    if (l1 < best.best_lambda1) {
      best.best_lambda1 = l1;
      best.best_m = m;
    }
    int axis = 0;
    while (axis < n && ++idx[axis] == points_per_axis) idx[axis++] = 0;
    if (axis == n) break;
  }
  return best;
}

}  // namespace trapdyn::oracle
