#pragma once

#include <cstdint>

#include "trapdyn/model.hpp"

namespace trapdyn::systems {

/// xdot = (0, 1) + diag(-1, -4) x + (-x1 x2, x1^2).
LosslessQuadraticSystem two_state();

/// Lorenz system with c = 0 and nonlinearity (0, -x1 x3, x1 x2).
LosslessQuadraticSystem lorenz(double sigma = 10.0, double rho = 28.0,
                               double alpha = 8.0 / 3.0);

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the signs fixed so that diag(R) > 0. Deterministic per seed.
Matrix random_orthogonal(int n, std::uint64_t seed);

struct StackedSystem {
  LosslessQuadraticSystem system;
  /// x = W z.
  Matrix W;
};

/// K default Lorenz copies stacked block-diagonally and rotated by a random
/// orthogonal W: L = W L_z W^T, f(x) = W f_z(W^T x). seed = 0 keeps W = I.
StackedSystem stacked_lorenz(int K, std::uint64_t seed);

/// xdot = 0 in n dimensions.
LosslessQuadraticSystem zero_system(int n);

}  // namespace trapdyn::systems
