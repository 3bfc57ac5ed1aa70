#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trapdyn/opt.hpp"

namespace trapdyn::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitTrapping = 0;
inline constexpr int kExitNoTrapping = 1;
inline constexpr int kExitMarginal = 2;
inline constexpr int kExitError = 3;

inline constexpr std::uint64_t kDefaultSeed = 42;

/// TRAPDYN_SEED if set and parseable, else kDefaultSeed.
std::uint64_t default_seed();

struct Tolerances {
  std::optional<double> eps_neg;
  std::optional<double> solver_tol;

  SolverOptions solver_options() const;
};

struct CheckConfig {
  std::filesystem::path input;
  Tolerances tol;
};

struct RadiusConfig {
  std::filesystem::path input;
  /// "auto", "zero" or comma-separated coordinates.
  std::string center = "auto";
  std::filesystem::path out_dir = ".";
  std::size_t boundary_samples = 2000;
  std::uint64_t seed = kDefaultSeed;
  Tolerances tol;
};

struct SimulateConfig {
  std::filesystem::path input;
  std::string center = "auto";
  /// Ball radius to test; computed with analyze() when absent.
  std::optional<double> radius;
  int n_traj = 10;
  double t_final = 50.0;
  double dt = 1e-3;
  /// Defaults to t_final / 2.
  std::optional<double> settle_time;
  /// "lo:hi,lo:hi,..." per coordinate; defaults to center +/- max(3, R).
  std::string box;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  bool write_csv = true;
  Tolerances tol;
};

struct BenchConfig {
  std::vector<int> K;
  int trials = 3;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output = "bench.csv";
  Tolerances tol;
};

struct GenConfig {
  std::string name;
  int n = 3;
  int K = 1;
  std::uint64_t seed = kDefaultSeed;
  double sigma = 10.0;
  double rho = 28.0;
  double alpha = 8.0 / 3.0;
  /// Empty writes to the output stream.
  std::filesystem::path output;
};

int cmd_check(const CheckConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_radius(const RadiusConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateConfig& cfg, std::ostream& out,
                 std::ostream& err);
int cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gen(const GenConfig& cfg, std::ostream& out, std::ostream& err);

/// Least-squares slope of log(time) against log(n).
double loglog_slope(const std::vector<double>& n, const std::vector<double>& t);

/// Full command line (argv[0] included); returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace trapdyn::cli
