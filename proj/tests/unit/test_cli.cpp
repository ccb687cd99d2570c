#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "loclim/cli.hpp"
#include "loclim/records.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "loclim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = loclim::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "loclim_cli";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p.string();
}

const std::string kLpConfig = std::string(LOCLIM_CONFIG_DIR) + "/lp_rate.ini";

std::vector<std::string> tiny_rates(const std::string& records) {
  return {"rates", "--config", kLpConfig, "--set", "experiment.replicates=4", "--set", "experiment.eps_count=3",
          "--set", "experiment.eps0=0.25", "--set", "estimator.steps=2048", "--set", "experiment.eps_ref=0.01",
          "--set", "experiment.bootstrap=10", "--records", records};
}

}  // namespace

TEST(Cli, ClassifyPrintsRegimeAndScaling) {
  const auto r = run({"classify", "--H", "1/3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "CLT, ℓ(ε)=ε^-0.5")) << r.out;
  EXPECT_TRUE(contains(run({"classify", "--H", "1/5"}).out, "BOUNDARY_LOG"));
}

TEST(Cli, ConstantsPrintValueAndResidual) {
  const auto r = run({"constants", "--name", "Dtilde1", "--H", "1/5", "--d", "1", "--sigma", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "2.99206710301")) << r.out;
  EXPECT_TRUE(contains(r.out, "quadrature residual"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"constants", "--name", "Dtilde2", "--H", "1/5"}).code, loclim::cli::kConfigError);
  EXPECT_EQ(run({"classify", "--bogus"}).code, loclim::cli::kConfigError);
  EXPECT_EQ(run({"rates"}).code, loclim::cli::kConfigError);
  EXPECT_EQ(run({"simulate", "--H", "1.4"}).code, loclim::cli::kConfigError);
  EXPECT_EQ(run({"--help"}).code, loclim::cli::kOk);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto a = run({"simulate", "--H", "0.3", "--n", "64", "--seed", "5"});
  const auto b = run({"simulate", "--H", "0.3", "--n", "64", "--seed", "5"});
  const auto c = run({"simulate", "--H", "0.3", "--n", "64", "--seed", "6"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_TRUE(contains(a.out, "t,x1\n0,0\n"));
}

TEST(Cli, MomentsOddIsZero) {
  const auto r = run({"moments", "--intervals", "0:1/2,1/2:1", "--m", "1,2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "FORMULA_MC: 0 +- 0")) << r.out;
}

TEST(Cli, VerifyConditionsFbm) {
  const auto r = run({"verify-conditions", "--H", "0.3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(contains(r.out, "LND: pass"));
}

TEST(Cli, RatesRecordsAndReport) {
  const auto path = temp_path("records.jsonl");
  auto args = tiny_rates(path);
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = run({"report", "--records", path, "--verify"});
  EXPECT_EQ(rep.code, 0);
  EXPECT_TRUE(contains(rep.out, "hash check: ok"));
}

TEST(Cli, RatesIdenticalAcrossWorkerCounts) {
  const auto p1 = temp_path("w1.jsonl");
  const auto p3 = temp_path("w3.jsonl");
  auto a1 = tiny_rates(p1);
  a1.insert(a1.end(), {"--workers", "1"});
  auto a3 = tiny_rates(p3);
  a3.insert(a3.end(), {"--workers", "3"});
  ASSERT_EQ(run(a1).code, 0);
  ASSERT_EQ(run(a3).code, 0);
  const auto r1 = loclim::RecordStore(p1).read_all();
  const auto r3 = loclim::RecordStore(p3).read_all();
  ASSERT_EQ(r1.size(), 1u);
  ASSERT_EQ(r3.size(), 1u);
  EXPECT_EQ(r1[0].payload_hash, r3[0].payload_hash);
}
