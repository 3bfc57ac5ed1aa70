#pragma once

#include <string>
#include <vector>

#include "trapdyn/model.hpp"

namespace trapdyn::sdp {

// Block-diagonal semidefinite program in the standard primal/dual pair
//
//   primal:  minimize <C, X>   s.t. <A_i, X> = b_i,  X psd
//   dual:    maximize b^T y    s.t. S = C - sum_i y_i A_i,  S psd
//
// Every matrix is a list of dense symmetric blocks with sizes block_sizes.
// A 1x1 block is an ordinary nonnegativity constraint.
struct Problem {
  std::vector<int> block_sizes;
  std::vector<Matrix> C;               // C[block]
  std::vector<std::vector<Matrix>> A;  // A[constraint][block]
  Vector b;

  int num_constraints() const { return static_cast<int>(b.size()); }
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  /// Throws DimensionError on inconsistent shapes.
  void validate() const;
};

struct Options {
  /// Target for relative gap and relative primal/dual infeasibility.
  double tolerance = 1e-9;
  /// Looser level still reported as kNearOptimal when progress stalls.
  double near_tolerance = 1e-6;
  int max_iterations = 100;
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.95;
};

enum class Status {
  kOptimal,
  kNearOptimal,
  kMaxIterations,
  kNumericalFailure,
};

std::string to_string(Status status);

struct Solution {
  Status status = Status::kNumericalFailure;
  std::vector<Matrix> X;
  std::vector<Matrix> S;
  Vector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  double seconds = 0.0;

  bool usable() const {
    return status == Status::kOptimal || status == Status::kNearOptimal;
  }
};

/// Abstract conic backend. Implementations must be reentrant.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual Solution solve(const Problem& problem,
                         const Options& options) const = 0;
  virtual std::string name() const = 0;
};

/// Infeasible-start primal-dual path-following method with the HKM search
/// direction and a Mehrotra predictor-corrector step. Dense linear algebra
/// throughout; the Schur complement costs O(m n^3 + m^2 n^2) per iteration
/// for m constraints and block order n.
class InteriorPointSolver final : public ConicSolver {
 public:
  Solution solve(const Problem& problem, const Options& options) const override;
  std::string name() const override { return "hkm-predictor-corrector"; }
};

/// The backend used when the caller does not supply one.
const ConicSolver& default_solver();

}  // namespace trapdyn::sdp
