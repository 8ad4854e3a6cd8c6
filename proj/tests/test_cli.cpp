#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("escrate_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const json& config) {
    const auto p = dir_ / name;
    std::ofstream(p) << config.dump(2);
    return p;
  }

  struct Result {
    int code;
    json summary;
    std::string err;
  };

  Result run(const std::string& command, const fs::path& config, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"escrate", command, "--config", config.string(), "--out", (dir_ / "out").string()};
    args.insert(args.end(), extra.begin(), extra.end());
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = escrate::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    Result r{code, json(), err.str()};
    if (code == 0) r.summary = json::parse(out.str());
    return r;
  }

  std::string read(const std::string& name) {
    std::ifstream f(dir_ / "out" / name);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

json cantor_config() {
  return {{"system", {{"map", {{"preset", "cantor"}}}}},
          {"potential", {{"constant", -std::log(2.0)}}},
          {"hole", {{"center", {{"periodic", "02"}}}, {"family", "cylinder"}, {"n_range", {2, 10}}}},
          {"run", json::array({{{"command", "oracle"}, {"n", 3}, {"k_max", 12}, {"samples", 20000}}})}};
}

}  // namespace

TEST_F(Cli, PressureOfCantor) {
  auto r = run("pressure", write("c.json", cantor_config()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary["pressure"].get<double>(), 0.0, 1e-12);
  EXPECT_TRUE(r.summary.contains("config_hash"));
  EXPECT_TRUE(r.summary.contains("tolerances"));
  EXPECT_EQ(r.summary["version"], "0.1.0");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "pressure_summary.json"));
}

TEST_F(Cli, PressureOfGoldenMean) {
  json c = {{"system", {{"subshift", {{"preset", "golden_mean"}}}}}, {"potential", {{"constant", 0.0}}}};
  auto r = run("pressure", write("g.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary["pressure"].get<double>(), std::log((1.0 + std::sqrt(5.0)) / 2.0), 1e-12);
}

TEST_F(Cli, MalformedTransitionIsConfigError) {
  json c = {{"system", {{"subshift", {{"transition", {{1, 0}, {1, 0}}}}}}}, {"potential", {{"constant", 0.0}}}};
  auto r = run("pressure", write("bad.json", c));
  EXPECT_EQ(r.code, 2);
  const auto e = json::parse(r.err);
  EXPECT_EQ(e["error"], "InvalidInput");
}

TEST_F(Cli, UnparseableConfigIsConfigError) {
  const auto p = dir_ / "broken.json";
  std::ofstream(p) << "{ not json";
  EXPECT_EQ(run("escape", p).code, 2);
  EXPECT_EQ(run("escape", dir_ / "missing.json").code, 2);
}

TEST_F(Cli, EscapeCantor) {
  auto r = run("escape", write("c.json", cantor_config()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(r.summary["predicted"].get<double>(), 0.75);
  const auto csv = read("escape.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "n,len_n,mu_hole,lambda_n,escape_rate,ratio,gap_ratio,predicted,deviation,mixing_flag");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST_F(Cli, EscapeNonPeriodic) {
  json c = {{"system", {{"subshift", {{"preset", "full"}, {"alphabet_size", 2}}}}},
            {"potential", {{"constant", -std::log(2.0)}}},
            {"hole", {{"center", {{"champernowne", 64}}}, {"n_range", {2, 8}}}}};
  auto r = run("escape", write("np.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(r.summary["predicted"].get<double>(), 1.0);
}

TEST_F(Cli, EmptyRangeIsConfigError) {
  auto c = cantor_config();
  c["hole"]["n_range"] = {5, 3};
  EXPECT_EQ(run("escape", write("e.json", c)).code, 2);
}

TEST_F(Cli, EscapeBallFamilyEmitsBothSweeps) {
  auto c = cantor_config();
  c["hole"] = {{"center", {{"x", 0.25}}}, {"family", "ball"}, {"epsilons", {0.05, 0.01}}, {"eta", 0.2}};
  auto r = run("escape", write("b.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "escape_inner.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "escape_outer.csv"));
  EXPECT_EQ(r.summary["bracket"].size(), 2u);
}

TEST_F(Cli, DimensionCantor) {
  auto r = run("dimension", write("c.json", cantor_config()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary["predicted"].get<double>(), 3.0 / (4.0 * std::log(3.0)), 1e-10);
  const auto csv = read("dimension.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,mu_hole,s,s_n,ratio,predicted,deviation,lyapunov,oscillation_diagnostic");
}

TEST_F(Cli, DimensionDoublingWithoutHole) {
  json c = {{"system", {{"map", {{"preset", "doubling"}}}}}, {"potential", {{"bowen", true}}}};
  auto r = run("dimension", write("d.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary["s"].get<double>(), 1.0, 1e-10);
}

TEST_F(Cli, DimensionOnNonExpandingMapIsNumericError) {
  const json c = json::parse(R"({
    "system": {"map": {"branches": [
      {"interval": [0, 0.5], "kind": "linear", "slope": 1, "offset": 0},
      {"interval": [0.5, 1], "kind": "linear", "slope": 1, "offset": 0}]}},
    "potential": {"bowen": true}})");
  auto r = run("dimension", write("flat.json", c));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"], "NoRoot");
}

TEST_F(Cli, OracleFullShift) {
  json c = {{"system", {{"subshift", {{"preset", "full"}, {"alphabet_size", 2}}}}},
            {"potential", {{"constant", -std::log(2.0)}}},
            {"hole", {{"center", {{"periodic", "0"}}}, {"n_range", {1, 1}}}},
            {"run", json::array({{{"command", "oracle"}, {"k_max", 14}, {"samples", 10000}}})}};
  auto r = run("oracle", write("o.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.summary["fitted_rate"].get<double>(), std::log(2.0), 1e-6);
  EXPECT_EQ(r.summary["kac"]["gap"].get<double>(), 0.0);
  EXPECT_LE(r.summary["matrix_vs_exhaustive"].get<double>(), 1e-12);
}

TEST_F(Cli, OracleSeedIsReproducible) {
  const auto p = write("c.json", cantor_config());
  ASSERT_EQ(run("oracle", p, {"--seed", "11"}).code, 0);
  const auto first = read("oracle.csv");
  ASSERT_EQ(run("oracle", p, {"--seed", "11"}).code, 0);
  EXPECT_EQ(read("oracle.csv"), first);
  ASSERT_EQ(run("oracle", p, {"--seed", "12"}).code, 0);
  EXPECT_NE(read("oracle.csv"), first);
}

TEST_F(Cli, OracleFallsBackToMonteCarlo) {
  auto c = cantor_config();
  c["run"][0]["k_max"] = 30;
  auto r = run("oracle", write("big.json", c));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.summary["fit_method"], "monte_carlo");
  EXPECT_FALSE(r.summary["flags"].empty());
}

TEST_F(Cli, JsonFormat) {
  auto r = run("escape", write("c.json", cantor_config()), {"--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto rows = json::parse(read("escape.json"));
  EXPECT_EQ(rows.size(), 9u);
}

TEST_F(Cli, BadArgumentsAreConfigErrors) {
  std::vector<std::string> args = {"escrate", "frobnicate", "--config", "x"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  EXPECT_EQ(escrate::cli::main(static_cast<int>(argv.size()), argv.data(), out, err), 2);
}

TEST_F(Cli, ToolBinaryExitCodes) {
  const auto p = write("c.json", cantor_config());
  const std::string tool = ESCRATE_TOOL;
  const auto quiet = " > /dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system((tool + " pressure --config " + p.string() + " --out " + (dir_ / "o").string() + quiet).c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((tool + " pressure --config " + (dir_ / "nope.json").string() + quiet).c_str())), 2);
}
