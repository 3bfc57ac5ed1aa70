#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trapdyn/model.hpp"

namespace trapdyn::sim {

/// Uniformly sampled solution of xdot = c + L x + f(x).
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  double step_size = 0.0;
  std::string method = "rk4";

  std::size_t size() const { return times.size(); }
};

/// Classical fixed-step fourth-order Runge-Kutta from t = 0 to the last
/// multiple of dt not exceeding t_final. Throws DivergenceError if a state
/// norm exceeds 1e12 or becomes non-finite.
Trajectory integrate(const LosslessQuadraticSystem& sys,
                     const Eigen::Ref<const Vector>& x0, double t_final,
                     double dt);

/// ||x(t_i) - m|| per sample.
std::vector<double> energy_trace(const Trajectory& traj,
                                 const Eigen::Ref<const Vector>& m);

/// True iff ||x(t) - m|| <= R (1 + 1e-3) for every sample with t >= settle.
bool check_ultimate_bound(const Trajectory& traj,
                          const Eigen::Ref<const Vector>& m, double R,
                          double settle_time);

struct MonotonicityReport {
  /// Max energy_rate over samples outside the inflated ball; -inf if none.
  double max_violation = 0.0;
  std::size_t samples_outside = 0;
  bool vacuous() const { return samples_outside == 0; }
};

/// Energy rate at every sample farther than R (1 + 1e-3) from the shift
/// center of sf. A valid trapping radius gives a strictly negative maximum.
MonotonicityReport monotonicity_outside(const Trajectory& traj,
                                        const ShiftedForm& sf, double R);

/// Axis-aligned box for random initial conditions.
struct Box {
  Vector lo;
  Vector hi;
};

/// count points uniform in box; deterministic per seed.
std::vector<Vector> random_initial_conditions(const Box& box, int count,
                                              std::uint64_t seed);

struct EnsembleMember {
  Vector x0;
  std::optional<Trajectory> trajectory;
  /// Set when integration failed (divergence or non-finite state).
  std::string error;
};

/// Integrates every initial condition on up to `jobs` threads. Failures are
/// recorded per member instead of aborting the ensemble.
std::vector<EnsembleMember> integrate_ensemble(
    const LosslessQuadraticSystem& sys, const std::vector<Vector>& initial,
    double t_final, double dt, int jobs = 1);

/// CSV with header t,x1,...,xn,dist_to_center and full precision rows.
void write_trajectory_csv(const Trajectory& traj,
                          const Eigen::Ref<const Vector>& center,
                          const std::filesystem::path& path);

}  // namespace trapdyn::sim
