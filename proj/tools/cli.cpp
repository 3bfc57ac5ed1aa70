#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <new>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "trapdyn/error.hpp"
#include "trapdyn/oracle.hpp"
#include "trapdyn/report.hpp"
#include "trapdyn/sim.hpp"
#include "trapdyn/system_io.hpp"
#include "trapdyn/systems.hpp"

namespace trapdyn::cli {
namespace {

using nlohmann::json;

std::string fmt_vec(const Vector& v) {
  std::ostringstream out;
  out << std::setprecision(10) << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v(i);
  out << "]";
  return out.str();
}

std::vector<double> split_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error("cannot parse number \"" + item + "\"");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error("cannot parse number \"" + item + "\"");
    }
    out.push_back(v);
  }
  return out;
}

CenterPolicy parse_center(const std::string& text, int n) {
  if (text == "auto" || text == "solver") return CenterPolicy::solver();
  if (text == "zero") return CenterPolicy::zero();
  const auto v = split_numbers(text, ',');
  if (static_cast<int>(v.size()) != n) {
    throw DimensionError("--center needs " + std::to_string(n) +
                         " comma-separated values");
  }
  return CenterPolicy::user(Eigen::Map<const Vector>(v.data(), n));
}

sim::Box parse_box(const std::string& text, int n) {
  sim::Box box{Vector(n), Vector(n)};
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    const auto v = split_numbers(item, ':');
    if (v.size() != 2 || i >= n || !(v[0] < v[1])) {
      throw Error("--box expects lo:hi per coordinate, e.g. -3:3,-3:3");
    }
    box.lo(i) = v[0];
    box.hi(i) = v[1];
    ++i;
  }
  if (i != n) throw DimensionError("--box needs " + std::to_string(n) + " ranges");
  return box;
}

int exit_code(ExistenceStatus s) {
  switch (s) {
    case ExistenceStatus::kTrappingExists:
      return kExitTrapping;
    case ExistenceStatus::kNoTrappingRegion:
      return kExitNoTrapping;
    case ExistenceStatus::kNumericallyMarginal:
      return kExitMarginal;
  }
  return kExitError;
}

void print_certificate(const ExistenceResult& ex, std::ostream& out) {
  if (!ex.certificate) return;
  out << "certificate (" << (ex.certificate_valid ? "valid" : "NOT valid")
      << "):\n";
  const Matrix& Z = *ex.certificate;
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    out << "  " << fmt_vec(Z.row(r).transpose()) << "\n";
  }
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << doc.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TRAPDYN_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
  }
  return kDefaultSeed;
}

SolverOptions Tolerances::solver_options() const {
  SolverOptions opts;
  if (eps_neg) opts.eps_neg = *eps_neg;
  if (solver_tol) opts.sdp.tolerance = *solver_tol;
  return opts;
}

int cmd_check(const CheckConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto sys = load_system(cfg.input);
    const auto ex = solve_existence(sys, cfg.tol.solver_options());
    out << std::setprecision(10);
    out << "n: " << sys.dim() << "\n";
    out << "lossless_defect: " << lossless_defect(sys) << "\n";
    out << "a_star: " << ex.a_star << "\n";
    out << "status: " << to_string(ex.status) << "\n";
    out << "m_star: " << fmt_vec(ex.m_star) << "\n";
    print_certificate(ex, out);
    out << "solver: " << ex.solver.backend << ", " << ex.solver.status << ", "
        << ex.solver.iterations << " iterations, " << ex.solver.seconds
        << " s\n";
    return exit_code(ex.status);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_radius(const RadiusConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto sys = load_system(cfg.input);
    const auto policy = parse_center(cfg.center, sys.dim());
    const auto rep = analyze(sys, policy, cfg.tol.solver_options());
    out << std::setprecision(10);
    out << "a_star: " << rep.existence.a_star << "\n";
    out << "status: " << to_string(rep.existence.status) << "\n";
    if (!rep.region) {
      err << "no trapping region can be certified ("
          << to_string(rep.existence.status) << ")\n";
      print_certificate(rep.existence, out);
      return exit_code(rep.existence.status);
    }
    const auto& region = *rep.region;
    out << "center m: " << fmt_vec(region.m) << "\n";
    out << "R_conservative: " << region.R_conservative << "\n";
    out << "R_tight: " << region.R_tight << "\n";
    if (region.lambda_star) out << "lambda_star: " << *region.lambda_star << "\n";
    if (rep.sdp_route) {
      out << "R_tight (dual SDP): " << rep.sdp_route->radius
          << "  lambda_star (dual SDP): " << rep.sdp_route->lambda_star << "\n";
    }
    out << "ultimate bound (original coordinates): "
        << region.ultimate_bound_original << "\n";
    if (rep.critical) {
      const auto& cs = *rep.critical;
      out << "critical sphere: center " << fmt_vec(cs.center) << ", radius "
          << cs.radius << ", dimension " << cs.basis.cols() << "\n";
      for (const auto& y : cs.points()) {
        out << "  y* = " << fmt_vec(y) << "   x* = " << fmt_vec(y + region.m)
            << "\n";
      }
    }

    std::filesystem::create_directories(cfg.out_dir);
    json doc = to_json(rep);
    doc["input"] = cfg.input.string();
    doc["seed"] = cfg.seed;
    write_json(doc, cfg.out_dir / "report.json");

    const auto csv_path = cfg.out_dir / "ellipsoid_boundary.csv";
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write " + csv_path.string());
    for (int i = 0; i < sys.dim(); ++i) csv << (i ? "," : "") << "x" << i + 1;
    csv << "\n";
    std::vector<Vector> pts;
    if (rep.ellipsoid->degenerate) {
      pts.push_back(Vector::Zero(sys.dim()));
    } else {
      pts = oracle::sample_E_boundary(*rep.ellipsoid, cfg.boundary_samples,
                                      cfg.seed);
    }
    for (const auto& y : pts) {
      const Vector x = y + region.m;
      for (int i = 0; i < sys.dim(); ++i) {
        csv << (i ? "," : "") << format_double(x(i));
      }
      csv << "\n";
    }
    out << "wrote " << (cfg.out_dir / "report.json").string() << " and "
        << csv_path.string() << "\n";
    return kExitTrapping;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  try {
    if (cfg.n_traj < 1) throw Error("--n-traj must be positive");
    const auto sys = load_system(cfg.input);
    const int n = sys.dim();
    const auto policy = parse_center(cfg.center, n);

    Vector m;
    double R = 0.0;
    if (policy.kind != CenterPolicy::Kind::kSolver && cfg.radius) {
      m = policy.kind == CenterPolicy::Kind::kZero ? Vector(Vector::Zero(n))
                                                   : policy.user_m;
      R = *cfg.radius;
    } else {
      const auto rep = analyze(sys, policy, cfg.tol.solver_options());
      if (!rep.region) {
        err << "no trapping region to test ("
            << to_string(rep.existence.status) << ")\n";
        return exit_code(rep.existence.status);
      }
      m = rep.region->m;
      R = cfg.radius ? *cfg.radius : rep.region->R_tight;
    }
    const double settle = cfg.settle_time.value_or(cfg.t_final / 2.0);
    if (!(settle < cfg.t_final)) throw Error("--settle must be below --t-final");

    sim::Box box;
    if (cfg.box.empty()) {
      const double w = std::max(3.0, R);
      box = {m.array() - w, m.array() + w};
    } else {
      box = parse_box(cfg.box, n);
    }
    const auto x0s = sim::random_initial_conditions(box, cfg.n_traj, cfg.seed);
    const auto members =
        sim::integrate_ensemble(sys, x0s, cfg.t_final, cfg.dt, cfg.jobs);
    const ShiftedForm sf(sys, m);

    if (cfg.write_csv) std::filesystem::create_directories(cfg.out_dir);
    std::ofstream summary;
    if (cfg.write_csv) {
      summary.open(cfg.out_dir / "summary.csv");
      if (!summary) throw Error("cannot write summary.csv");
      summary << "traj,seed";
      for (int i = 0; i < n; ++i) summary << ",x0_" << i + 1;
      summary << ",trapped,max_dist_after_settle,max_rate_outside,error\n";
    }

    int trapped = 0;
    double worst_rate = -std::numeric_limits<double>::infinity();
    out << std::setprecision(8);
    out << "center " << fmt_vec(m) << ", R = " << R << ", settle_time = "
        << settle << ", seed = " << cfg.seed << "\n";
    for (std::size_t t = 0; t < members.size(); ++t) {
      const auto& mem = members[t];
      bool ok = false;
      double max_dist = std::numeric_limits<double>::quiet_NaN();
      double rate = std::numeric_limits<double>::quiet_NaN();
      if (mem.trajectory) {
        const auto& traj = *mem.trajectory;
        ok = sim::check_ultimate_bound(traj, m, R, settle);
        const auto trace = sim::energy_trace(traj, m);
        max_dist = 0.0;
        for (std::size_t s = 0; s < trace.size(); ++s) {
          if (traj.times[s] >= settle) max_dist = std::max(max_dist, trace[s]);
        }
        const auto mono = sim::monotonicity_outside(traj, sf, R);
        if (!mono.vacuous()) {
          rate = mono.max_violation;
          worst_rate = std::max(worst_rate, rate);
        }
        if (cfg.write_csv) {
          std::ostringstream name;
          name << "traj_" << std::setw(3) << std::setfill('0') << t << ".csv";
          sim::write_trajectory_csv(traj, m, cfg.out_dir / name.str());
        }
      }
      trapped += ok ? 1 : 0;
      out << "  traj " << t << ": " << (ok ? "trapped" : "NOT trapped");
      if (!mem.error.empty()) out << " (" << mem.error << ")";
      out << "\n";
      if (cfg.write_csv) {
        summary << t << "," << cfg.seed;
        for (int i = 0; i < n; ++i) summary << "," << format_double(mem.x0(i));
        summary << "," << (ok ? 1 : 0) << "," << format_double(max_dist) << ","
                << format_double(rate) << ",\"" << mem.error << "\"\n";
      }
    }
    out << "trapped: " << trapped << "/" << members.size() << "\n";
    if (std::isfinite(worst_rate)) {
      out << "max energy rate outside ball: " << worst_rate << "\n";
    } else {
      out << "max energy rate outside ball: vacuous (no samples outside)\n";
    }
    return trapped == static_cast<int>(members.size()) ? kExitTrapping
                                                        : kExitNoTrapping;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& t) {
  if (n.size() != t.size() || n.size() < 2) {
    throw Error("slope fit needs at least two points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = std::log(n[i]);
    const double y = std::log(t[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

int cmd_bench(const BenchConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.K.empty()) {
    err << "usage error: bench needs a non-empty K list (--k 1,2,4)\n";
    return kExitError;
  }
  if (cfg.trials < 1) {
    err << "usage error: --trials must be positive\n";
    return kExitError;
  }
  try {
    if (cfg.output.has_parent_path()) {
      std::filesystem::create_directories(cfg.output.parent_path());
    }
    std::ofstream csv(cfg.output);
    if (!csv) throw Error("cannot write " + cfg.output.string());
    csv << "K,n,trial,seed,t_sdp1,t_sdp2,a_star,R_tight,status\n";
    const auto opts = cfg.tol.solver_options();

    std::map<int, std::vector<double>> totals;
    out << std::setprecision(6);
    for (int K : cfg.K) {
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const std::uint64_t seed =
            cfg.seed + 1000ULL * static_cast<std::uint64_t>(trial) + K;
        double t1 = std::numeric_limits<double>::quiet_NaN();
        double t2 = t1, a = t1, r = t1;
        std::string status;
        try {
          const auto stacked = systems::stacked_lorenz(K, seed);
          auto t0 = std::chrono::steady_clock::now();
          const auto ex = solve_existence(stacked.system, opts);
          t1 = seconds_since(t0);
          a = ex.a_star;
          status = to_string(ex.status);
          if (ex.status == ExistenceStatus::kTrappingExists) {
            const ShiftedForm sf(stacked.system, ex.m_star);
            t0 = std::chrono::steady_clock::now();
            r = tight_radius_sdp(sf, opts).radius;
            t2 = seconds_since(t0);
            totals[3 * K].push_back(t1 + t2);
          }
        } catch (const std::bad_alloc&) {
          status = "failed: out of memory";
        } catch (const std::exception& e) {
          status = std::string("failed: ") + e.what();
        }
        csv << K << "," << 3 * K << "," << trial << "," << seed << ","
            << format_double(t1) << "," << format_double(t2) << ","
            << format_double(a) << "," << format_double(r) << ",\"" << status
            << "\"\n";
        out << "K=" << K << " n=" << 3 * K << " trial=" << trial
            << " a*=" << a << " R*=" << r << " t_sdp1=" << t1
            << " t_sdp2=" << t2 << " " << status << "\n";
      }
    }

    std::vector<double> ns, meds;
    for (const auto& [n, ts] : totals) {
      ns.push_back(n);
      meds.push_back(median(ts));
      out << "n=" << n << " median total time " << meds.back() << " s\n";
    }
    if (ns.size() >= 2) {
      const std::size_t half = std::max<std::size_t>(2, (ns.size() + 1) / 2);
      const std::vector<double> tail_n(ns.end() - half, ns.end());
      const std::vector<double> tail_t(meds.end() - half, meds.end());
      out << "log-log slope over the largest " << half
          << " sizes: " << loglog_slope(tail_n, tail_t) << "\n";
    }
    out << "wrote " << cfg.output.string() << "\n";
    return kExitTrapping;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_gen(const GenConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::optional<LosslessQuadraticSystem> sys;
    if (cfg.name == "two-state") {
      sys = systems::two_state();
    } else if (cfg.name == "lorenz") {
      sys = systems::lorenz(cfg.sigma, cfg.rho, cfg.alpha);
    } else if (cfg.name == "stacked") {
      sys = systems::stacked_lorenz(cfg.K, cfg.seed).system;
    } else if (cfg.name == "zero") {
      sys = systems::zero_system(cfg.n);
    } else {
      err << "error: unknown system \"" << cfg.name
          << "\" (expected two-state, lorenz, stacked or zero)\n";
      return kExitError;
    }
    if (cfg.output.empty()) {
      out << system_to_json(*sys);
    } else {
      if (cfg.output.has_parent_path()) {
        std::filesystem::create_directories(cfg.output.parent_path());
      }
      save_system(*sys, cfg.output);
    }
    return kExitTrapping;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"trapdyn: trapping regions of lossless quadratic systems"};
  app.require_subcommand(1);
  const std::uint64_t seed0 = default_seed();
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto add_tol = [](CLI::App* sub, Tolerances& tol) {
    sub->add_option("--eps-neg", tol.eps_neg,
                    "strict-negativity margin, scaled by 1 + ||L_s|| "
                    "(default 1e-6)");
    sub->add_option("--solver-tol", tol.solver_tol,
                    "interior-point stopping tolerance (default 1e-9)");
  };

  CheckConfig check;
  auto* c = app.add_subcommand("check", "decide whether a trapping region exists");
  c->add_option("file", check.input, "system JSON")->required();
  add_tol(c, check.tol);

  RadiusConfig radius;
  radius.seed = seed0;
  auto* r = app.add_subcommand("radius", "conservative and tight trapping radii");
  r->add_option("file", radius.input, "system JSON")->required();
  r->add_option("--center", radius.center, "auto | zero | x1,...,xn");
  r->add_option("--out", radius.out_dir, "output directory");
  r->add_option("--samples", radius.boundary_samples,
                "boundary points written to ellipsoid_boundary.csv");
  r->add_option("--seed", radius.seed, "sampling seed");
  add_tol(r, radius.tol);

  SimulateConfig simulate;
  simulate.seed = seed0;
  simulate.jobs = hw;
  auto* s = app.add_subcommand("simulate", "integrate an ensemble and test the bound");
  s->add_option("file", simulate.input, "system JSON")->required();
  s->add_option("--center", simulate.center, "auto | zero | x1,...,xn");
  s->add_option("--radius", simulate.radius, "ball radius (default: R_tight)");
  s->add_option("--n-traj", simulate.n_traj, "ensemble size");
  s->add_option("--t-final", simulate.t_final, "integration horizon");
  s->add_option("--dt", simulate.dt, "RK4 step");
  s->add_option("--settle", simulate.settle_time, "settle time (default t_final/2)");
  s->add_option("--box", simulate.box, "initial-condition box lo:hi,lo:hi,...");
  s->add_option("--seed", simulate.seed, "initial-condition seed");
  s->add_option("--out", simulate.out_dir, "output directory");
  s->add_option("--jobs", simulate.jobs, "worker threads");
  s->add_flag("!--no-csv", simulate.write_csv, "skip per-trajectory CSV files");
  add_tol(s, simulate.tol);

  BenchConfig bench;
  bench.seed = seed0;
  std::string k_list = "1,2,4,8,16";
  auto* b = app.add_subcommand("bench", "scaling benchmark on stacked Lorenz systems");
  b->add_option("--k", k_list, "comma-separated K values");
  b->add_option("--trials", bench.trials, "trials per K");
  b->add_option("--seed", bench.seed, "base seed");
  b->add_option("--out", bench.output, "CSV path");
  add_tol(b, bench.tol);

  GenConfig gen;
  gen.seed = seed0;
  auto* g = app.add_subcommand("gen", "write an example system as JSON");
  g->add_option("name", gen.name, "two-state | lorenz | stacked | zero")->required();
  g->add_option("--n", gen.n, "dimension for zero");
  g->add_option("--k", gen.K, "number of Lorenz copies for stacked");
  g->add_option("--seed", gen.seed, "rotation seed for stacked (0 = identity)");
  g->add_option("--sigma", gen.sigma);
  g->add_option("--rho", gen.rho);
  g->add_option("--alpha", gen.alpha);
  g->add_option("-o,--out", gen.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  if (*c) return cmd_check(check, out, err);
  if (*r) return cmd_radius(radius, out, err);
  if (*s) return cmd_simulate(simulate, out, err);
  if (*b) {
    try {
      bench.K.clear();
      for (double k : k_list.empty() ? std::vector<double>{}
                                     : split_numbers(k_list, ',')) {
        if (k < 1 || k != std::floor(k)) throw Error("K values must be positive integers");
        bench.K.push_back(static_cast<int>(k));
      }
    } catch (const std::exception& e) {
      err << "usage error: " << e.what() << "\n";
      return kExitError;
    }
    return cmd_bench(bench, out, err);
  }
  if (*g) return cmd_gen(gen, out, err);
  return kExitError;
}

}  // namespace trapdyn::cli
