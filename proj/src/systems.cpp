#include "trapdyn/systems.hpp"

#include <random>

#include <Eigen/QR>

#include "trapdyn/error.hpp"

namespace trapdyn::systems {

LosslessQuadraticSystem two_state() {
  Vector c(2);
  c << 0.0, 1.0;
  Matrix L(2, 2);
  L << -1.0, 0.0, 0.0, -4.0;
  // f1 = -x1 x2, f2 = x1^2.
  std::vector<QuadTerm> q{{0, 0, 1, -0.5}, {1, 0, 0, 1.0}};
  return LosslessQuadraticSystem(std::move(c), std::move(L), std::move(q));
}

LosslessQuadraticSystem lorenz(double sigma, double rho, double alpha) {
  Matrix L(3, 3);
  L << -sigma, sigma, 0.0,
       rho, -1.0, 0.0,
       0.0, 0.0, -alpha;
  // f2 = -x1 x3, f3 = x1 x2.
  std::vector<QuadTerm> q{{1, 0, 2, -0.5}, {2, 0, 1, 0.5}};
  return LosslessQuadraticSystem(Vector::Zero(3), std::move(L), std::move(q));
}

Matrix random_orthogonal(int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_orthogonal: n must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) G(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& R = qr.matrixQR();
  for (int c = 0; c < n; ++c) {
    if (R(c, c) < 0.0) Q.col(c) = -Q.col(c);
  }
  return Q;
}

StackedSystem stacked_lorenz(int K, std::uint64_t seed) {
  if (K < 1) throw DimensionError("stacked_lorenz: K must be positive");
  const int n = 3 * K;
  const LosslessQuadraticSystem block = lorenz();

  Matrix Lz = Matrix::Zero(n, n);
  for (int b = 0; b < K; ++b) Lz.block(3 * b, 3 * b, 3, 3) = block.L();

  const Matrix W = seed == 0 ? Matrix(Matrix::Identity(n, n))
                             : random_orthogonal(n, seed);
  Matrix L = W * Lz * W.transpose();

  // f(x) = W f_z(W^T x) gives Q^(i) = sum_p W(i, p) W Q_z^(p) W^T. Each
  // stacked slice Q_z^(p) is v (e_a e_b^T + e_b e_a^T), so W Q_z^(p) W^T is
  // v (w_a w_b^T + w_b w_a^T) with w_a the a-th column of W.
  struct Slice {
    int p;
    Matrix rotated;
  };
  std::vector<Slice> slices;
  for (int b = 0; b < K; ++b) {
    for (const auto& t : block.terms()) {
      const int p = 3 * b + t.i;
      const Vector wa = W.col(3 * b + t.j);
      const Vector wb = W.col(3 * b + t.k);
      slices.push_back(
          {p, t.value * (wa * wb.transpose() + wb * wa.transpose())});
    }
  }

  std::vector<QuadTerm> terms;
  for (int i = 0; i < n; ++i) {
    Matrix Qi = Matrix::Zero(n, n);
    for (const auto& s : slices) {
      const double w = W(i, s.p);
      if (w != 0.0) Qi += w * s.rotated;
    }
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j <= k; ++j) {
        const double v = 0.5 * (Qi(j, k) + Qi(k, j));
        if (v != 0.0) terms.push_back({i, j, k, v});
      }
    }
  }
  return {LosslessQuadraticSystem(Vector::Zero(n), std::move(L),
                                  std::move(terms)),
          W};
}

LosslessQuadraticSystem zero_system(int n) {
  if (n < 1) throw DimensionError("zero_system: n must be positive");
  return LosslessQuadraticSystem(Vector::Zero(n), Matrix::Zero(n, n), {});
}

}  // namespace trapdyn::systems
