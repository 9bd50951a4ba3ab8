#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "randomx/csv.hpp"

namespace fs = std::filesystem;
using randomx::cli::kExitConfig;
using randomx::cli::kExitNumeric;
using randomx::cli::kExitOk;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = randomx::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(RANDOMX_CONFIG_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const fs::path p = fs::path(RANDOMX_TEST_TMP) / name;
  std::ofstream(p, std::ios::binary) << contents;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// y = 1 + x1 − x2 + a deterministic wobble, 12 rows.
std::string regression_csv() {
  std::string s = "x1,x2,y\n";
  for (int i = 0; i < 12; ++i) {
    const double x1 = i * 0.5, x2 = (i * 7 % 5) - 2.0;
    const double y = 1.0 + x1 - x2 + ((i % 3) - 1) * 0.3;
    s += randomx::format_double(x1) + "," + randomx::format_double(x2) + "," + randomx::format_double(y) + "\n";
  }
  return s;
}

}  // namespace

TEST(Cli, DecomposeSmokeConfig) {
  const Result r = invoke({"decompose", "--config", config("smoke.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = randomx::parse_csv(r.out);
  EXPECT_EQ(t.header.front(), "scenario");
  EXPECT_EQ(t.header.size(), 16u);
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.rows[0][0], "normal_unbiased");
  for (const auto& row : t.rows) EXPECT_GT(std::stod(row[7]), 0.0) << "se_B";
}

TEST(Cli, CriteriaLowDimWithFewReplicates) {
  const Result r = invoke({"criteria", "--config", config("low_dim.json"), "--reps", "3", "--threads", "2"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = randomx::parse_csv(r.out);
  ASSERT_EQ(t.rows.size(), 30u);
  for (const auto& row : t.rows)
    if (row[1] == "OCV") EXPECT_EQ(row[5], "1");
}

TEST(Cli, RidgeRatioSmallRun) {
  const Result r = invoke({"ridge-ratio", "--n", "40", "--p", "10", "--reps", "5", "--lambda-points", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = randomx::parse_csv(r.out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"lambda", "ratio", "ci_low", "ci_high", "theory_limit"}));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows.back()[0], "1000000");
}

TEST(Cli, RidgeRatioValidation) {
  EXPECT_EQ(invoke({"ridge-ratio", "--p", "0"}).code, kExitConfig);
  EXPECT_EQ(invoke({"ridge-ratio", "--n", "20", "--p", "5", "--reps", "1"}).code, kExitConfig);
  EXPECT_EQ(invoke({"ridge-ratio", "--n", "20", "--p", "20"}).code, kExitConfig);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kExitConfig);
  EXPECT_EQ(invoke({"decompose"}).code, kExitConfig);
  EXPECT_EQ(invoke({"decompose", "--config", "/nonexistent/x.json"}).code, kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(invoke({"eval", "--data", temp_file("u.csv", regression_csv()), "--smoother", "lasso"}).code,
            kExitConfig);
  const Result v = invoke({"--version"});
  EXPECT_EQ(v.code, kExitOk);
  EXPECT_FALSE(v.out.empty());
}

TEST(Cli, MalformedJsonReportsPosition) {
  const std::string path = temp_file("bad.json", "{\n  \"seed\": 1,\n  \"n\": ,\n}\n");
  const Result r = invoke({"decompose", "--config", path});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column"), std::string::npos) << r.err;
}

TEST(Cli, FieldErrorsNameTheirPath) {
  const std::string path = temp_file("field.json", R"({
  "n": 50, "p": 5, "sigma": 1, "reps": 3, "test_m": 10,
  "scenarios": [
    {"name": "a", "covariates": {"kind": "isotropic_normal"}, "mean": {"kind": "null"}},
    {"name": "b", "covariates": {"kind": "normal_block", "blocks": 5, "rho": 1.5}, "mean": {"kind": "null"}}
  ]
})");
  const Result r = invoke({"decompose", "--config", path});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("scenarios[1].covariates"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("rho"), std::string::npos) << r.err;

  const std::string unknown = temp_file("unknown.json", R"({"n": 50, "p": 5, "bogus": 1, "scenarios": []})");
  const Result u = invoke({"decompose", "--config", unknown});
  EXPECT_EQ(u.code, kExitConfig);
  EXPECT_NE(u.err.find("bogus"), std::string::npos) << u.err;
}

TEST(Cli, EvalTwoPointFixture) {
  const Result r = invoke({"eval", "--data", temp_file("two.csv", "x,y\n1,1\n2,3\n")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = randomx::parse_csv(r.out);
  bool found = false;
  for (const auto& row : t.rows)
    if (row[0] == "ocv") {
      found = true;
      EXPECT_NEAR(std::stod(row[1]), 0.625, 1e-14);
    }
  EXPECT_TRUE(found) << r.out;
  EXPECT_NE(r.err.find("rcp_hat omitted: DimensionError"), std::string::npos) << r.err;
}

TEST(Cli, EvalWithoutSigmaSkipsSigmaCriteria) {
  const Result r = invoke({"eval", "--data", temp_file("reg.csv", regression_csv())});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.find("\ncp,"), std::string::npos);
  EXPECT_EQ(r.out.find("\nrcp_plus,"), std::string::npos);
  EXPECT_NE(r.out.find("\nrcp_hat,"), std::string::npos);
  EXPECT_NE(r.out.find("\ngcv,"), std::string::npos);

  const Result s = invoke({"eval", "--data", temp_file("reg.csv", regression_csv()), "--sigma2", "0.1"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const auto t = randomx::parse_csv(s.out);
  std::vector<std::string> keys;
  for (const auto& row : t.rows) keys.push_back(row[0]);
  EXPECT_EQ(keys, (std::vector<std::string>{"rss", "sigma2_hat", "cp", "rcp", "rcp_hat", "gcv", "ocv", "bplus_hat",
                                            "rcp_plus"}));
}

TEST(Cli, EvalOtherSmoothers) {
  const std::string path = temp_file("reg.csv", regression_csv());
  for (const std::vector<std::string>& extra :
       {std::vector<std::string>{"--smoother", "ridge", "--lambda", "2"},
        std::vector<std::string>{"--smoother", "knn", "--k", "3"},
        std::vector<std::string>{"--smoother", "kernel_ridge", "--lambda", "0.5", "--bandwidth", "1"}}) {
    std::vector<std::string> args{"eval", "--data", path, "--sigma2", "0.1"};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = invoke(args);
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("\nocv,"), std::string::npos);
  }
}

TEST(Cli, EvalBadInputs) {
  const Result nan = invoke({"eval", "--data", temp_file("nan.csv", "x,y\n1,2\n3,oops\n")});
  EXPECT_EQ(nan.code, kExitConfig);
  EXPECT_NE(nan.err.find("data row 2"), std::string::npos) << nan.err;
  const Result collinear = invoke({"eval", "--data", temp_file("col.csv", "a,b,y\n1,2,1\n2,4,2\n3,6,2\n4,8,5\n")});
  EXPECT_EQ(collinear.code, kExitNumeric);
  EXPECT_NE(collinear.err.find("RankDeficient"), std::string::npos) << collinear.err;
  EXPECT_EQ(invoke({"eval", "--data", "/nonexistent.csv"}).code, kExitConfig);
}

TEST(Cli, WritesOutputAndManifest) {
  const std::string out = (fs::path(RANDOMX_TEST_TMP) / "smoke_out.csv").string();
  fs::remove(out + ".manifest.json");
  const Result r = invoke({"decompose", "--config", config("smoke.json"), "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string csv = slurp(out);
  EXPECT_EQ(randomx::to_csv(randomx::parse_csv(csv)), csv);

  const auto doc = nlohmann::json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(doc.at("command"), "decompose");
  EXPECT_EQ(doc.at("seed"), 20161101u);
  EXPECT_EQ(doc.at("config_digest").get<std::string>().size(), 16u);
  for (const char* key : {"version", "started", "finished"}) EXPECT_TRUE(doc.contains(key)) << key;

  const std::string custom = (fs::path(RANDOMX_TEST_TMP) / "custom_manifest.json").string();
  const Result c = invoke({"ridge-ratio", "--n", "20", "--p", "4", "--reps", "3", "--lambda-points", "2",
                           "--seed", "77", "--manifest", custom});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(custom)).at("seed"), 77u);
}

TEST(Cli, SeedOverrideChangesResults) {
  const Result a = invoke({"decompose", "--config", config("smoke.json")});
  const Result b = invoke({"decompose", "--config", config("smoke.json"), "--seed", "5"});
  const Result c = invoke({"decompose", "--config", config("smoke.json"), "--seed", "5"});
  EXPECT_NE(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
}

TEST(Cli, OutputIndependentOfThreadCount) {
  const std::vector<std::vector<std::string>> commands{
      {"decompose", "--config", config("smoke.json"), "--reps", "8"},
      {"ridge-ratio", "--n", "30", "--p", "8", "--reps", "12", "--lambda-points", "5"},
  };
  for (const auto& base : commands) {
    std::string reference;
    for (const char* threads : {"1", "2", "8"}) {
      auto args = base;
      args.insert(args.end(), {"--threads", threads});
      const Result r = invoke(args);
      ASSERT_EQ(r.code, kExitOk) << r.err;
      if (reference.empty())
        reference = r.out;
      else
        EXPECT_EQ(r.out, reference) << base[0] << " threads " << threads;
    }
  }
}
