#include "trapdyn/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "trapdyn/error.hpp"

namespace trapdyn {
namespace {

void check_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << expected << ", got " << got;
    throw DimensionError(msg.str());
  }
}

auto key(const QuadTerm& t) { return std::tie(t.i, t.j, t.k); }

}  // namespace

LosslessQuadraticSystem::LosslessQuadraticSystem(Vector c, Matrix L,
                                                 std::vector<QuadTerm> terms,
                                                 Validation validation)
    : c_(std::move(c)), L_(std::move(L)), terms_(std::move(terms)) {
  const int n = dim();
  if (n < 1) throw DimensionError("system dimension must be positive");
  if (L_.rows() != n || L_.cols() != n) {
    std::ostringstream msg;
    msg << "L must be " << n << "x" << n << ", got " << L_.rows() << "x"
        << L_.cols();
    throw DimensionError(msg.str());
  }
  for (auto& t : terms_) {
    if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n || t.k < 0 || t.k >= n) {
      std::ostringstream msg;
      msg << "quadratic term index (" << t.i << ", " << t.j << ", " << t.k
          << ") out of range for n = " << n;
      throw DimensionError(msg.str());
    }
    if (t.j > t.k) std::swap(t.j, t.k);
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const QuadTerm& a, const QuadTerm& b) { return key(a) < key(b); });
  auto dup = std::adjacent_find(
      terms_.begin(), terms_.end(),
      [](const QuadTerm& a, const QuadTerm& b) { return key(a) == key(b); });
  if (dup != terms_.end()) {
    std::ostringstream msg;
    msg << "duplicate quadratic term (" << dup->i << ", " << dup->j << ", "
        << dup->k << ")";
    throw Error(msg.str());
  }
  for (const auto& t : terms_) {
    max_abs_q_ = std::max(max_abs_q_, std::abs(t.value));
  }
  if (!c_.allFinite() || !L_.allFinite() || !std::isfinite(max_abs_q_)) {
    throw Error("system coefficients must be finite");
  }
  if (validation == Validation::kLossless) {
    const double defect = lossless_defect(*this);
    if (defect > kLosslessTolerance * (1.0 + max_abs_q_)) {
      std::ostringstream msg;
      msg << "quadratic term is not lossless: defect " << defect;
      throw NotLosslessError(msg.str());
    }
  }
}

double LosslessQuadraticSystem::q(int i, int j, int k) const {
  if (j > k) std::swap(j, k);
  const QuadTerm probe{i, j, k, 0.0};
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), probe,
      [](const QuadTerm& a, const QuadTerm& b) { return key(a) < key(b); });
  if (it != terms_.end() && key(*it) == key(probe)) return it->value;
  return 0.0;
}

Matrix LosslessQuadraticSystem::q_slice(int i) const {
  const int n = dim();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& t : terms_) {
    if (t.i != i) continue;
    out(t.j, t.k) = t.value;
    out(t.k, t.j) = t.value;
  }
  return out;
}

Matrix LosslessQuadraticSystem::contract(
    const Eigen::Ref<const Vector>& w) const {
  const int n = dim();
  check_dim(n, w.size(), "contract");
  Matrix out = Matrix::Zero(n, n);
  for (const auto& t : terms_) {
    const double v = w(t.i) * t.value;
    out(t.j, t.k) += v;
    if (t.j != t.k) out(t.k, t.j) += v;
  }
  return out;
}

Vector LosslessQuadraticSystem::quadratic(
    const Eigen::Ref<const Vector>& x) const {
  const int n = dim();
  check_dim(n, x.size(), "quadratic");
  Vector f = Vector::Zero(n);
  for (const auto& t : terms_) {
    const double xx = x(t.j) * x(t.k);
    f(t.i) += (t.j == t.k ? 1.0 : 2.0) * t.value * xx;
  }
  return f;
}

double lossless_defect(const LosslessQuadraticSystem& sys) {
  // The triple sum is symmetric in (i, j, k), so it only needs evaluating on
  // sorted multisets that touch at least one stored entry.
  std::set<std::tuple<int, int, int>> seen;
  double worst = 0.0;
  for (const auto& t : sys.terms()) {
    std::array<int, 3> idx{t.i, t.j, t.k};
    std::sort(idx.begin(), idx.end());
    if (!seen.emplace(idx[0], idx[1], idx[2]).second) continue;
    const auto [a, b, c] = idx;
    const double sum = sys.q(a, b, c) + sys.q(b, a, c) + sys.q(c, a, b);
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

Vector eval_rhs(const LosslessQuadraticSystem& sys,
                const Eigen::Ref<const Vector>& x) {
  check_dim(sys.dim(), x.size(), "eval_rhs");
  return sys.c() + sys.L() * x + sys.quadratic(x);
}

ShiftedForm::ShiftedForm(const LosslessQuadraticSystem& sys, Vector m)
    : m_(std::move(m)) {
  const int n = sys.dim();
  check_dim(n, m_.size(), "shift");

  const Vector Lm = sys.L() * m_;
  const Vector fm = sys.quadratic(m_);
  d_ = sys.c() + Lm + fm;
  d_scale_ = sys.c().norm() + Lm.norm() + fm.norm();

  // A(m) = L + 2 [m^T Q^(1); ...; m^T Q^(n)].
  A_ = sys.L();
  for (const auto& t : sys.terms()) {
    A_(t.i, t.k) += 2.0 * t.value * m_(t.j);
    if (t.j != t.k) A_(t.i, t.j) += 2.0 * t.value * m_(t.k);
  }

  Matrix As = sys.L_sym() - sys.contract(m_);
  A_s_ = 0.5 * (As + As.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> es(A_s_);
  eigs_ = es.eigenvalues().reverse();
  eigvecs_ = es.eigenvectors().rowwise().reverse();
}

bool ShiftedForm::drift_vanishes() const {
  return d_.norm() <= 1e-10 * d_scale_;
}

ShiftedForm shift(const LosslessQuadraticSystem& sys,
                  const Eigen::Ref<const Vector>& m) {
  return ShiftedForm(sys, Vector(m));
}

double energy_rate(const ShiftedForm& sf, const Eigen::Ref<const Vector>& y) {
  check_dim(sf.dim(), y.size(), "energy_rate");
  return sf.d().dot(y) + y.dot(sf.A_s() * y);
}

Vector EnergyEllipsoid::point(const Eigen::Ref<const Vector>& u) const {
  check_dim(dim(), u.size(), "EnergyEllipsoid::point");
  return center + axes * semi_axes.cwiseProduct(u);
}

EnergyEllipsoid ellipsoid_E(const ShiftedForm& sf) {
  if (!sf.negative_definite()) {
    std::ostringstream msg;
    msg << "A_s(m) is not negative definite (lambda_1 = " << sf.lambda_max()
        << ")";
    throw NotNegativeDefiniteError(msg.str());
  }
  const int n = sf.dim();
  EnergyEllipsoid ee;
  ee.axes = sf.eigenvectors();
  if (sf.drift_vanishes()) {
    ee.center = Vector::Zero(n);
    ee.semi_axes = Vector::Zero(n);
    ee.degenerate = true;
    return ee;
  }
  const Vector& lam = sf.eigenvalues();
  const Vector w = ee.axes.transpose() * sf.d();
  const Vector Ainv_d = ee.axes * w.cwiseQuotient(lam);
  const double dAd = w.cwiseAbs2().cwiseQuotient(lam).sum();  // < 0
  ee.center = -0.5 * Ainv_d;
  ee.semi_axes = (dAd / lam.array()).sqrt().matrix() * 0.5;
  ee.peak_rate = -0.25 * dAd;
  return ee;
}

}  // namespace trapdyn
