#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using odorsim::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "odorsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path fresh(const std::string& name) {
  const fs::path dir = fs::path(ODORSIM_TEST_TMP) / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Cli, RunWritesArtifacts) {
  const auto dir = fresh("run");
  const auto r = invoke({"run", "--config", "paper_consensus", "--seed", "42", "--out", dir.string(),
                         "--set", "time.t_end=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
  const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
  EXPECT_TRUE(metrics.contains("time_to_consensus"));
  EXPECT_TRUE(metrics["gains"].contains("mu_margin_empirical"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "run_manifest.json"));
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["schema_version"], 1);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, RunIsByteIdenticalAcrossInvocations) {
  const auto a = fresh("det_a");
  const auto b = fresh("det_b");
  for (const auto& d : {a, b}) {
    ASSERT_EQ(invoke({"run", "--config", "paper_formation", "--seed", "3", "--out", d.string(),
                      "--set", "time.t_end=2"}).code, 0);
  }
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
}

TEST(Cli, ManifestReproducesRun) {
  const auto a = fresh("manifest_a");
  const auto b = fresh("manifest_b");
  ASSERT_EQ(invoke({"run", "--config", "paper_consensus", "--seed", "8", "--out", a.string(),
                    "--set", "time.t_end=1"}).code, 0);
  ASSERT_EQ(invoke({"run", "--config", (a / "run_manifest.json").string(), "--out", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
}

TEST(Cli, NonPositiveThetaIsInvalidConfig) {
  const auto r = invoke({"run", "--config", "paper_consensus", "--set", "theta=0", "--out",
                         fresh("theta").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("theta"), std::string::npos);
}

TEST(Cli, NumericalAbortExitCode) {
  const auto r = invoke({"run", "--config", "paper_consensus", "--out", fresh("nan").string(),
                         "--set", "agents.initial_states=[[1.7e308],[0],[0],[0]]",
                         "--set", "time.t_end=0.01"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"run"}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, PlotAllAndUnknownSelector) {
  const auto dir = fresh("plot");
  ASSERT_EQ(invoke({"run", "--config", "paper_consensus", "--out", dir.string(), "--set",
                    "time.t_end=1"}).code, 0);
  const auto r = invoke({"plot", "--trace", (dir / "trace.csv").string(), "--fig", "all"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto f : {"fig_states.svg", "fig_error_norm.svg", "fig_controls.svg", "fig_manifolds.svg"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(invoke({"plot", "--trace", (dir / "trace.csv").string(), "--fig", "bogus"}).code, 2);
}

TEST(Cli, CheckExampleTopology) {
  const auto r = invoke({"check", "--config", "paper_consensus", "--set", "time.t_end=1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("spanning tree rooted at virtual leader: yes"), std::string::npos);
  EXPECT_NE(r.out.find("rank 4/4"), std::string::npos);
  EXPECT_NE(r.out.find("nonsingular"), std::string::npos);
}

TEST(Cli, CheckLeaderlessEdgelessExits4) {
  const auto r = invoke({"check", "--config", "paper_consensus", "--set", "topology.edges=[]",
                         "--set", "topology.leaders=[]"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("spanning tree"), std::string::npos);
}

TEST(Cli, CheckReportsWeakW) {
  const auto r = invoke({"check", "--config", "paper_consensus", "--set", "smc.w=0.1", "--set",
                         "time.t_end=1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("w condition  w > sigma_max: FAIL"), std::string::npos);
}

TEST(Cli, BatchRunsEachSeed) {
  const auto dir = fresh("batch");
  const auto r = invoke({"batch", "--config", "no_disturbance", "--seeds", "1,2,3", "--out",
                         dir.string(), "--set", "time.t_end=0.5"});
  ASSERT_EQ(r.code, 0) << r.out;
  for (int s = 1; s <= 3; ++s) {
    EXPECT_TRUE(fs::exists(dir / ("seed_" + std::to_string(s)) / "trace.csv"));
  }
}

TEST(Cli, ScenariosListing) {
  const auto r = invoke({"scenarios"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("paper_formation"), std::string::npos);
  EXPECT_EQ(invoke({"scenarios", "missing"}).code, 2);
}
