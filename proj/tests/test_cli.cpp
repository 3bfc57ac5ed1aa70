#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "trapdyn/error.hpp"
#include "trapdyn/system_io.hpp"
#include "trapdyn/systems.hpp"

using namespace trapdyn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "trapdyn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("trapdyn_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenAndCheck) {
  ASSERT_EQ(run({"gen", "lorenz", "-o", path("lorenz.json")}).code, 0);
  const auto r = run({"check", path("lorenz.json")});
  EXPECT_EQ(r.code, cli::kExitTrapping);
  EXPECT_NE(r.out.find("a_star: -1"), std::string::npos);
  EXPECT_NE(r.out.find("TrappingExists"), std::string::npos);

  ASSERT_EQ(run({"gen", "zero", "--n", "5", "-o", path("zero5.json")}).code, 0);
  const auto z = run({"check", path("zero5.json")});
  EXPECT_EQ(z.code, cli::kExitNoTrapping);
  EXPECT_NE(z.out.find("certificate (valid)"), std::string::npos);
}

TEST_F(CliTest, TruncatedJsonIsAnError) {
  const std::string text = system_to_json(systems::lorenz());
  std::ofstream(path("bad.json")) << text.substr(0, text.size() / 2);
  const auto r = run({"check", path("bad.json")});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_NE(r.err.find("line"), std::string::npos);
  EXPECT_EQ(run({"check", path("missing.json")}).code, cli::kExitError);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitError);
  EXPECT_EQ(run({"check"}).code, cli::kExitError);
  EXPECT_EQ(run({"gen", "nonsense"}).code, cli::kExitError);
  EXPECT_EQ(run({"bench", "--k", ""}).code, cli::kExitError);
  EXPECT_EQ(run({"bench", "--k", "1,x"}).code, cli::kExitError);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, GenIsDeterministicAndRoundTrips) {
  ASSERT_EQ(run({"gen", "stacked", "--k", "3", "--seed", "7", "-o", path("a.json")}).code, 0);
  ASSERT_EQ(run({"gen", "stacked", "--k", "3", "--seed", "7", "-o", path("b.json")}).code, 0);
  const std::string a = slurp(path("a.json"));
  EXPECT_EQ(a, slurp(path("b.json")));
  EXPECT_EQ(system_to_json(parse_system_json(a)), a);
  const auto out = run({"gen", "two-state"});
  EXPECT_EQ(out.out, system_to_json(systems::two_state()));
}

TEST_F(CliTest, RadiusTwoStateAtZero) {
  ASSERT_EQ(run({"gen", "two-state", "-o", path("ts.json")}).code, 0);
  const auto r = run({"radius", path("ts.json"), "--center", "zero", "--out",
                      path("out"), "--samples", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(slurp(path("out/report.json")));
  EXPECT_NEAR(rep["trapping_region"]["R_conservative"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(rep["trapping_region"]["R_tight"].get<double>(), 0.28868, 5e-4);
  EXPECT_EQ(rep["existence"]["solver"]["backend"], "hkm-predictor-corrector");
  EXPECT_TRUE(rep["existence"]["solver"].contains("wall_time_s"));
  EXPECT_EQ(rep["critical_sphere"]["points"].size(), 2u);
  std::ifstream csv(path("out/ellipsoid_boundary.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x1,x2");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 50);
}

TEST_F(CliTest, RadiusLorenzUserCenter) {
  ASSERT_EQ(run({"gen", "lorenz", "-o", path("lz.json")}).code, 0);
  const auto r = run({"radius", path("lz.json"), "--center", "0,0,38", "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = nlohmann::json::parse(slurp(path("o/report.json")));
  EXPECT_NEAR(rep["trapping_region"]["R_conservative"].get<double>(), 101.333, 1e-2);
  EXPECT_NEAR(rep["trapping_region"]["R_tight"].get<double>(), 39.25, 5e-2);
  EXPECT_EQ(run({"radius", path("lz.json"), "--center", "0,0", "--out", path("o")}).code,
            cli::kExitError);
}

TEST_F(CliTest, RadiusRefusesZeroSystem) {
  ASSERT_EQ(run({"gen", "zero", "-o", path("z.json")}).code, 0);
  const auto r = run({"radius", path("z.json"), "--out", path("o")});
  EXPECT_EQ(r.code, cli::kExitNoTrapping);
  EXPECT_NE(r.err.find("NoTrappingRegion"), std::string::npos);
}

TEST_F(CliTest, SimulateTwoState) {
  ASSERT_EQ(run({"gen", "two-state", "-o", path("ts.json")}).code, 0);
  const auto r = run({"simulate", path("ts.json"), "--center", "zero", "--radius", "0.289",
                      "--n-traj", "20", "--t-final", "20", "--out", path("sim"),
                      "--jobs", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("trapped: 20/20"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("sim/traj_019.csv")));
  std::ifstream csv(path("sim/traj_000.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,x1,x2,dist_to_center");
}

TEST_F(CliTest, SimulateLorenzSmallRadiusFails) {
  ASSERT_EQ(run({"gen", "lorenz", "-o", path("lz.json")}).code, 0);
  const auto r = run({"simulate", path("lz.json"), "--center", "0,0,38", "--radius", "10",
                      "--n-traj", "3", "--t-final", "10", "--box=-20:20,-20:20,0:50",
                      "--no-csv"});
  EXPECT_EQ(r.code, cli::kExitNoTrapping);
  EXPECT_NE(r.out.find("NOT trapped"), std::string::npos);
}

TEST_F(CliTest, BenchWritesCsv) {
  const auto r = run({"bench", "--k", "1,2", "--trials", "2", "--out", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream csv(path("b.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "K,n,trial,seed,t_sdp1,t_sdp2,a_star,R_tight,status");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_NE(line.find("TrappingExists"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_NE(r.out.find("slope"), std::string::npos);
}

TEST(CliSeed, EnvironmentOverride) {
  ::unsetenv("TRAPDYN_SEED");
  EXPECT_EQ(cli::default_seed(), 42u);
  ::setenv("TRAPDYN_SEED", "1234", 1);
  EXPECT_EQ(cli::default_seed(), 1234u);
  ::setenv("TRAPDYN_SEED", "junk", 1);
  EXPECT_EQ(cli::default_seed(), 42u);
  ::unsetenv("TRAPDYN_SEED");
}

TEST(CliSlope, LogLog) {
  EXPECT_NEAR(cli::loglog_slope({1, 2, 4, 8}, {3, 24, 192, 1536}), 3.0, 1e-12);
  EXPECT_THROW(cli::loglog_slope({1}, {1}), Error);
}
