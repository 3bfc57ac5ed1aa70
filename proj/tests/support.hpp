#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "trapdyn/model.hpp"

namespace trapdyn::props {

inline constexpr int kPropertySeeds = 50;

inline Matrix gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix M(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) M(r, c) = g(rng);
  return M;
}

// Quadratic part f_i(x) = sum_{j,k} T_ijk x_j x_k with T antisymmetric in
// (i, j), so x^T f(x) = 0 by construction.
inline std::vector<QuadTerm> random_lossless_terms(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> T(static_cast<std::size_t>(n * n * n), 0.0);
  auto at = [&](int i, int j, int k) -> double& { return T[(i * n + j) * n + k]; };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = g(rng);
        at(i, j, k) = v;
        at(j, i, k) = -v;
      }
  std::vector<QuadTerm> terms;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = j == k ? at(i, j, j) : 0.5 * (at(i, j, k) + at(i, k, j));
        if (v != 0.0) terms.push_back({i, j, k, v});
      }
  return terms;
}

// Random lossless system with L_s negative definite, so m = 0 already traps.
inline LosslessQuadraticSystem random_trapping_system(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix B = gaussian(n, n, rng);
  const Matrix K = gaussian(n, n, rng);
  Matrix L = -(B * B.transpose() / n) - 0.5 * Matrix::Identity(n, n);
  L += 0.5 * (K - K.transpose());
  const Vector c = gaussian(n, 1, rng);
  return LosslessQuadraticSystem(c, L, random_lossless_terms(n, rng));
}

// x = W z: c' = W c, L' = W L W^T, Q'^(i) = sum_p W_ip W Q^(p) W^T.
inline LosslessQuadraticSystem rotate(const LosslessQuadraticSystem& sys,
                                      const Matrix& W) {
  const int n = sys.dim();
  std::vector<Matrix> Qr(n, Matrix::Zero(n, n));
  for (int p = 0; p < n; ++p) {
    const Matrix R = W * sys.q_slice(p) * W.transpose();
    for (int i = 0; i < n; ++i) Qr[i] += W(i, p) * R;
  }
  std::vector<QuadTerm> terms;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const double v = 0.5 * (Qr[i](j, k) + Qr[i](k, j));
        if (v != 0.0) terms.push_back({i, j, k, v});
      }
  return LosslessQuadraticSystem(W * sys.c(), W * sys.L() * W.transpose(),
                                 std::move(terms));
}

}  // namespace trapdyn::props
