#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace trapdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One stored entry of the quadratic tensor: Q^(i)_{jk} = Q^(i)_{kj} = value.
/// Indices are zero-based and j <= k.
struct QuadTerm {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;

  friend bool operator==(const QuadTerm&, const QuadTerm&) = default;
};

/// Relative tolerance for the lossless identity, scaled by 1 + max |Q|.
inline constexpr double kLosslessTolerance = 1e-12;

/// xdot = c + L x + f(x) with f_i(x) = x^T Q^(i) x and x^T f(x) = 0.
///
/// The tensor is held as sparse upper-triangle triplets per slice, sorted by
/// (i, j, k). Duplicate triplets are rejected. The lossless identity is
/// checked on construction unless Validation::kUnchecked is passed.
class LosslessQuadraticSystem {
 public:
  enum class Validation { kLossless, kUnchecked };

  LosslessQuadraticSystem(Vector c, Matrix L, std::vector<QuadTerm> terms,
                          Validation validation = Validation::kLossless);

  int dim() const { return static_cast<int>(c_.size()); }
  const Vector& c() const { return c_; }
  const Matrix& L() const { return L_; }
  Matrix L_sym() const { return 0.5 * (L_ + L_.transpose()); }
  std::span<const QuadTerm> terms() const { return terms_; }

  /// Q^(i)_{jk}, symmetrized on read.
  double q(int i, int j, int k) const;
  /// Dense Q^(i).
  Matrix q_slice(int i) const;
  /// sum_k w_k Q^(k).
  Matrix contract(const Eigen::Ref<const Vector>& w) const;
  /// f(x).
  Vector quadratic(const Eigen::Ref<const Vector>& x) const;
  double max_abs_q() const { return max_abs_q_; }

 private:
  Vector c_;
  Matrix L_;
  std::vector<QuadTerm> terms_;
  double max_abs_q_ = 0.0;
};

/// max over index triples of |Q^(i)_{jk} + Q^(j)_{ik} + Q^(k)_{ij}|.
double lossless_defect(const LosslessQuadraticSystem& sys);

/// c + L x + f(x).
Vector eval_rhs(const LosslessQuadraticSystem& sys,
                const Eigen::Ref<const Vector>& x);

/// Dynamics expressed in y = x - m. A_s is symmetric; its spectrum is stored
/// in descending order with matching eigenvector columns.
class ShiftedForm {
 public:
  ShiftedForm(const LosslessQuadraticSystem& sys, Vector m);

  int dim() const { return static_cast<int>(m_.size()); }
  const Vector& m() const { return m_; }
  const Vector& d() const { return d_; }
  const Matrix& A() const { return A_; }
  const Matrix& A_s() const { return A_s_; }
  /// lambda_1 >= ... >= lambda_n.
  const Vector& eigenvalues() const { return eigs_; }
  const Matrix& eigenvectors() const { return eigvecs_; }
  double lambda_max() const { return eigs_(0); }
  bool negative_definite() const { return eigs_(0) < 0.0; }
  /// Magnitude of the terms that make up d(m); used for relative thresholds.
  double d_scale() const { return d_scale_; }
  /// True when ||d|| is negligible against d_scale().
  bool drift_vanishes() const;

 private:
  Vector m_;
  Vector d_;
  Matrix A_;
  Matrix A_s_;
  Vector eigs_;
  Matrix eigvecs_;
  double d_scale_ = 1.0;
};

ShiftedForm shift(const LosslessQuadraticSystem& sys,
                  const Eigen::Ref<const Vector>& m);

/// d(m)^T y + y^T A_s(m) y, the rate of change of 0.5 ||y||^2.
double energy_rate(const ShiftedForm& sf, const Eigen::Ref<const Vector>& y);

/// Boundary of the set where energy_rate >= 0, for A_s negative definite.
struct EnergyEllipsoid {
  Vector center;
  Matrix axes;
  Vector semi_axes;
  double peak_rate = 0.0;
  /// Set when d(m) = 0 and the set collapses to the single point 0.
  bool degenerate = false;

  int dim() const { return static_cast<int>(center.size()); }
  /// center + axes * diag(semi_axes) * u.
  Vector point(const Eigen::Ref<const Vector>& u) const;
};

EnergyEllipsoid ellipsoid_E(const ShiftedForm& sf);

}  // namespace trapdyn
