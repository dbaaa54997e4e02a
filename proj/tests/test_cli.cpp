#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vaa/cli.hpp"

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = vaa::cli::run(std::move(args), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vaa_cli_test_" + name);
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, EvalFourNodeChain) {
  const auto r = run({"eval", "--problem", std::string(VAA_TEST_DATA_DIR) + "/four_node_chain.json", "--assignment",
                      "1101"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "-24\n");
}

TEST(Cli, GenSpectrumAmplifyPipeline) {
  const auto file = temp_path("gen.json");
  ASSERT_EQ(run({"gen", "--kind", "linear_qubo", "--n", "18", "--seed", "7", "--format", "json", "--out",
                 file.string()})
                .code,
            0);
  EXPECT_TRUE(std::filesystem::exists(file.string() + ".config.json"));
  const auto spec = run({"spectrum", "--problem", file.string(), "--what", "stats", "--format", "json"});
  ASSERT_EQ(spec.code, 0) << spec.err;
  const auto stats = nlohmann::json::parse(spec.out);
  EXPECT_EQ(stats["D"], 1u << 18);
  const auto amp = run({"amplify", "--problem", file.string(), "--ps", "exact", "--k", "kG", "--format", "json"});
  ASSERT_EQ(amp.code, 0) << amp.err;
  const auto j = nlohmann::json::parse(amp.out);
  const double boosted = j["p_min"].get<double>() + j["p_max"].get<double>();
  const double uniform = j["uniform_min"].get<double>() + j["uniform_max"].get<double>();
  EXPECT_GE(boosted, 100.0 * uniform);
  EXPECT_EQ(j["config"]["resolved"]["k"], 402);
  std::filesystem::remove(file);
  std::filesystem::remove(file.string() + ".config.json");
}

TEST(Cli, Table1Rows) {
  const auto r = run({"estimate-ps", "--table1", "--n", "18", "--m", "100,500,1000,2000", "--qubos", "2",
                      "--trials", "3", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(r.out), 5u);
  EXPECT_EQ(r.out.rfind("m,mean_error,std_error,trials\n", 0), 0u);
}

TEST(Cli, EstimateSingleProblem) {
  const auto r = run({"estimate-ps", "--n", "12", "--m", "50,200", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["estimates"].size(), 2u);
  EXPECT_GT(j["estimates"][1]["ps_t"].get<double>(), 0.0);
  EXPECT_TRUE(j["estimates"][1].contains("error"));
}

TEST(Cli, SweepPeaksExperimentCircuit) {
  auto r = run({"sweep", "--n", "10", "--grid", "0.01:0.05:5", "--k", "3", "--track", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(r.out), 1u + 5u * 2u);
  r = run({"peaks", "--n", "10", "--r", "4", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["peaks"].size(), 4u);
  r = run({"experiment", "--n", "10", "--grid", "0.01:0.05:3", "--k", "5", "--budget", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(r.out), 1u + 3u * 10u);
  r = run({"circuit", "--kind", "maxcut", "--n", "6", "--edges", "7", "--format", "qasm"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("OPENQASM 2.0;", 0), 0u);
  r = run({"circuit", "--n", "8", "--verify", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["match"].get<bool>());
}

TEST(Cli, HybridJson) {
  const auto r = run({"hybrid", "--n", "12", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("verdict"));
  EXPECT_FALSE(j["trace"]["events"].empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"eval", "--n", "4"}).code, 2);
  EXPECT_EQ(run({"amplify", "--n", "4", "--ps", "abc"}).code, 2);
  EXPECT_EQ(run({"sweep", "--n", "4", "--grid", "1:0:5"}).code, 2);
  EXPECT_EQ(run({"amplify", "--n", "4", "--format", "qasm"}).code, 2);
}

TEST(Cli, DomainErrorsExitOneWithJson) {
  const auto r = run({"eval", "--n", "4", "--assignment", "10"});
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"], "invalid_assignment");
  const auto c = run({"circuit", "--kind", "coloring", "--n", "3", "--edges", "2"});
  EXPECT_EQ(c.code, 1);
  EXPECT_EQ(nlohmann::json::parse(c.err)["error"], "unsupported_kind");
  const auto m = run({"eval", "--problem", "/nonexistent/problem.json", "--assignment", "1"});
  EXPECT_EQ(m.code, 1);
}

TEST(Cli, SameSeedSameBytes) {
  const std::vector<std::string> args{"experiment", "--n", "12", "--grid", "0.01:0.03:4", "--k", "4", "--seed", "9"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = run({"experiment", "--n", "12", "--grid", "0.01:0.03:4", "--k", "4", "--seed", "10"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SidecarRecordsArgv) {
  const auto file = temp_path("sweep.csv");
  const std::vector<std::string> args{"sweep", "--n", "8", "--out", file.string(), "--seed", "4"};
  ASSERT_EQ(run(args).code, 0);
  std::ifstream side(file.string() + ".config.json");
  const auto j = nlohmann::json::parse(side);
  EXPECT_EQ(j["argv"].get<std::vector<std::string>>(), args);
  EXPECT_EQ(j["seed"], 4);
  EXPECT_TRUE(j.contains("resolved"));
  std::filesystem::remove(file);
  std::filesystem::remove(file.string() + ".config.json");
}
