#include "trapdyn/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "trapdyn/error.hpp"
#include "trapdyn/system_io.hpp"

namespace trapdyn::sim {
namespace {

constexpr double kDivergenceNorm = 1e12;

void check_state(const Vector& x, double t) {
  if (!x.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state at t = " << t;
    throw DivergenceError(msg.str());
  }
  if (x.norm() > kDivergenceNorm) {
    std::ostringstream msg;
    msg << "state norm exceeded 1e12 at t = " << t;
    throw DivergenceError(msg.str());
  }
}

}  // namespace

Trajectory integrate(const LosslessQuadraticSystem& sys,
                     const Eigen::Ref<const Vector>& x0, double t_final,
                     double dt) {
  if (x0.size() != sys.dim()) {
    throw DimensionError("integrate: initial state has the wrong dimension");
  }
  if (!(dt > 0.0) || !(t_final >= dt)) {
    throw Error("integrate: need dt > 0 and t_final >= dt");
  }
  // Guard against t_final / dt landing a hair below an integer.
  const auto steps = static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));

  Trajectory traj;
  traj.step_size = dt;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  Vector x = x0;
  check_state(x, 0.0);
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (std::size_t s = 1; s <= steps; ++s) {
    const Vector k1 = eval_rhs(sys, x);
    const Vector k2 = eval_rhs(sys, x + 0.5 * dt * k1);
    const Vector k3 = eval_rhs(sys, x + 0.5 * dt * k2);
    const Vector k4 = eval_rhs(sys, x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t = static_cast<double>(s) * dt;
    check_state(x, t);
    traj.times.push_back(t);
    traj.states.push_back(x);
  }
  return traj;
}

std::vector<double> energy_trace(const Trajectory& traj,
                                 const Eigen::Ref<const Vector>& m) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& x : traj.states) {
    if (x.size() != m.size()) {
      throw DimensionError("energy_trace: center has the wrong dimension");
    }
    out.push_back((x - m).norm());
  }
  return out;
}

bool check_ultimate_bound(const Trajectory& traj,
                          const Eigen::Ref<const Vector>& m, double R,
                          double settle_time) {
  const double limit = R * (1.0 + 1e-3);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < settle_time) continue;
    if ((traj.states[i] - m).norm() > limit) return false;
  }
  return true;
}

MonotonicityReport monotonicity_outside(const Trajectory& traj,
                                        const ShiftedForm& sf, double R) {
  MonotonicityReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  const double limit = R * (1.0 + 1e-3);
  for (const auto& x : traj.states) {
    const Vector y = x - sf.m();
    if (y.norm() <= limit) continue;
    ++rep.samples_outside;
    rep.max_violation = std::max(rep.max_violation, energy_rate(sf, y));
  }
  return rep;
}

std::vector<Vector> random_initial_conditions(const Box& box, int count,
                                              std::uint64_t seed) {
  if (box.lo.size() != box.hi.size()) {
    throw DimensionError("random_initial_conditions: box bounds differ in size");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(std::max(count, 0));
  for (int c = 0; c < count; ++c) {
    Vector x(box.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * unit(rng);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<EnsembleMember> integrate_ensemble(
    const LosslessQuadraticSystem& sys, const std::vector<Vector>& initial,
    double t_final, double dt, int jobs) {
  std::vector<EnsembleMember> members(initial.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < members.size(); i = next++) {
      members[i].x0 = initial[i];
      try {
        members[i].trajectory = integrate(sys, initial[i], t_final, dt);
      } catch (const Error& e) {
        members[i].error = e.what();
      }
    }
  };
  const int threads =
      std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, initial.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return members;
}

void write_trajectory_csv(const Trajectory& traj,
                          const Eigen::Ref<const Vector>& center,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const auto n = center.size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i + 1;
  out << ",dist_to_center\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const Vector& x = traj.states[s];
    out << format_double(traj.times[s]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(x(i));
    out << ',' << format_double((x - center).norm()) << '\n';
  }
}

}  // namespace trapdyn::sim
