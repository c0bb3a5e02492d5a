#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("liese_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result run(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(LIESE_NAV_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

const char* kShortCircle = R"({
  "trajectory": {"kind": "circle", "duration_s": 10.0},
  "filter": {"variant": "NED_LeftEst"},
  "seed": 11
})";

}  // namespace

TEST(Cli, StationaryZeroNoiseRun) {
  const fs::path d = scratch("stationary");
  const fs::path cfg = write_config(d, R"({
    "trajectory": {"kind": "stationary", "duration_s": 60.0},
    "imu_noise": {"sigma_g_rad_s_sqrt_hz": 0, "sigma_a_m_s2_sqrt_hz": 0,
                  "sigma_bg_rad_s_sqrt_s": 0, "sigma_ba_m_s2_sqrt_s": 0},
    "gnss": {"sigma_m": [1e-6, 1e-6, 1e-6]},
    "initial": {"error": "zero"}
  })");
  const Result r = run("run --config " + cfg.string() + " --out " + (d / "out").string(), d / "log");
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* f : {"truth.csv", "imu.csv", "gnss.csv", "filtered.csv", "smoothed.csv",
                        "metrics.json"}) {
    EXPECT_TRUE(fs::exists(d / "out" / f)) << f;
  }
  const auto m = nlohmann::json::parse(slurp(d / "out" / "metrics.json"));
  EXPECT_LE(m["filtered"]["position_rmse_3d_m"].get<double>(), 1e-3) << m.dump();
  EXPECT_EQ(m["nis"].size(), 60u);
}

TEST(Cli, SameSeedGivesIdenticalFiles) {
  const fs::path d = scratch("determinism");
  const fs::path cfg = write_config(d, kShortCircle);
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (d / "a").string(), d / "la").code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (d / "b").string(), d / "lb").code, 0);
  for (const auto& e : fs::directory_iterator(d / "a")) {
    const std::string name = e.path().filename().string();
    if (name == "config.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(d / "b" / name)) << name;
  }
}

TEST(Cli, UnsupportedVariantExitsTwo) {
  const fs::path d = scratch("variant");
  const fs::path cfg = write_config(d, kShortCircle);
  const Result ok = run("run --config " + cfg.string() + " --variant NED_RightTrue --out " +
                            (d / "ok").string(),
                        d / "l1");
  EXPECT_EQ(ok.code, 0) << ok.output;
  const Result bad = run("run --config " + cfg.string() + " --variant NED_Aux_RightEst --out " +
                             (d / "bad").string(),
                         d / "l2");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.output.find("NED_Aux_RightEst"), std::string::npos) << bad.output;
}

TEST(Cli, ConfigAndUsageErrorsExitTwo) {
  const fs::path d = scratch("config");
  const fs::path cfg = write_config(d, R"({"trajectory": {"kind": "circle", "radius": 5}})");
  EXPECT_EQ(run("run --config " + cfg.string(), d / "l1").code, 2);
  EXPECT_EQ(run("run", d / "l2").code, 2);
  EXPECT_EQ(run("frobnicate", d / "l3").code, 2);
  const fs::path good = write_config(d, kShortCircle);
  EXPECT_EQ(run("run --config " + good.string() + " --variant NED_RightTrue --mode invariant",
                d / "l4").code,
            2);
}

TEST(Cli, MissingInputExitsThree) {
  const fs::path d = scratch("io");
  EXPECT_EQ(run("run --config " + (d / "absent.json").string(), d / "l1").code, 3);
  EXPECT_EQ(run("compare " + (d / "x").string() + " " + (d / "y").string(), d / "l2").code, 3);
}

TEST(Cli, CompareSelfPassesAndDifferentSeedsFail) {
  const fs::path d = scratch("compare");
  const fs::path cfg = write_config(d, kShortCircle);
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (d / "a").string(), d / "la").code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --seed 12 --out " + (d / "b").string(), d / "lb").code, 0);
  const Result self = run("compare " + (d / "a").string() + " " + (d / "a").string(), d / "l1");
  EXPECT_EQ(self.code, 0);
  EXPECT_NE(self.output.find("PASS"), std::string::npos);
  const Result diff = run("compare " + (d / "a").string() + " " + (d / "b").string(), d / "l2");
  EXPECT_EQ(diff.code, 1);
  EXPECT_NE(diff.output.find("FAIL"), std::string::npos);
}

TEST(Cli, InvariantAndSE23RunsCompareEqual) {
  const fs::path d = scratch("modes");
  const fs::path cfg = write_config(d, kShortCircle);
  ASSERT_EQ(run("run --config " + cfg.string() + " --mode invariant --out " + (d / "i").string(),
                d / "li").code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --mode se23 --out " + (d / "s").string(),
                d / "ls").code, 0);
  const Result r = run("compare " + (d / "i").string() + " " + (d / "s").string() +
                           " --pos-tol 1e-9 --cov-tol 1e-10",
                       d / "lc");
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST(Cli, SimulateThenIngest) {
  const fs::path d = scratch("ingest");
  const fs::path cfg = write_config(d, kShortCircle);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (d / "sim").string(), d / "l1").code, 0);
  for (const char* f : {"truth.csv", "truth_bias.csv", "imu.csv", "gnss.csv"}) {
    EXPECT_TRUE(fs::exists(d / "sim" / f)) << f;
  }
  const fs::path ingest = d / "ingest.json";
  std::ofstream(ingest) << R"({
    "trajectory": {"kind": "circle", "duration_s": 10.0},
    "filter": {"variant": "NED_LeftEst"},
    "seed": 11,
    "input_dir": ")" << (d / "sim").string() << R"("})";
  ASSERT_EQ(run("run --config " + ingest.string() + " --out " + (d / "a").string(), d / "l2").code, 0);
  ASSERT_EQ(run("run --config " + cfg.string() + " --out " + (d / "b").string(), d / "l3").code, 0);
  EXPECT_EQ(slurp(d / "a" / "imu.csv"), slurp(d / "b" / "imu.csv"));
  const Result r = run("compare " + (d / "a").string() + " " + (d / "b").string() +
                           " --pos-tol 1e-9 --cov-tol 1e-8",
                       d / "l4");
  EXPECT_EQ(r.code, 0) << r.output;
}

TEST(Cli, MonteCarloSummary) {
  const fs::path d = scratch("mc");
  const fs::path cfg = write_config(d, R"({"trajectory": {"kind": "circle", "duration_s": 3.0}})");
  ASSERT_EQ(run("run --config " + cfg.string() + " --monte-carlo 4 --out " + (d / "o").string(),
                d / "l").code, 0);
  const auto m = nlohmann::json::parse(slurp(d / "o" / "metrics.json"));
  EXPECT_EQ(m["monte_carlo"]["per_run"].size(), 4u);
  EXPECT_EQ(m["monte_carlo"]["mean_nees"].size(), 4u);
}
