#pragma once

#include <cstdint>
#include <vector>

#include "trapdyn/model.hpp"

namespace trapdyn::oracle {

// Brute-force checks that share nothing with the convex machinery in opt:
// they only parametrize the ellipsoid and evaluate eigenvalues directly.

/// count points center + U diag(semi_axes) u with u uniform on the unit
/// sphere (normalized Gaussians). Same seed, same points, bit for bit.
std::vector<Vector> sample_E_boundary(const EnergyEllipsoid& ee,
                                      std::size_t count, std::uint64_t seed);

struct SampleReport {
  std::size_t sample_count = 0;
  double max_norm_found = 0.0;
  Vector argmax_point;
  /// Largest residual of the normalized ellipsoid equation over the samples.
  double max_constraint_violation = 0.0;
};

/// Largest ||y|| over sampled boundary points of E; a lower bound on the
/// tight radius.
SampleReport brute_force_radius(const EnergyEllipsoid& ee, std::size_t count,
                                std::uint64_t seed);

struct LatticeResult {
  Vector best_m;
  double best_lambda1 = 0.0;
  std::size_t evaluations = 0;
};

/// Exhaustive lambda_1(A_s(m)) over the lattice [-h, h]^n with
/// points_per_axis points per axis. Refuses n > 4.
LatticeResult lattice_search_shift(const LosslessQuadraticSystem& sys,
                                   double box_halfwidth, int points_per_axis);

}  // namespace trapdyn::oracle
