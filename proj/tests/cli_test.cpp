#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ortest_cli/cli.hpp"
#include "ortest_cli/input.hpp"
#include "ortest_cli/report.hpp"

namespace fs = std::filesystem;
using namespace ortest::cli;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "ortest");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
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
           ("ortest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, BuiltinCasesSucceed) {
  const Invocation r = run({"case", "silvapulle"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("A likely Type III error. Revisit assumptions."), std::string::npos);
  const Invocation t5 = run({"case", "cs-table5"});
  EXPECT_EQ(t5.code, kExitOk);
  EXPECT_NE(t5.out.find("Do not reject the Null."), std::string::npos);
}

TEST_F(CliTest, ReportContents) {
  const fs::path out = dir_ / "r.json";
  ASSERT_EQ(run({"safe-test", "--case", "cs-table6", "--out", out.string()}).code, kExitOk);
  const Json doc = parse_document(slurp(out), out.string());
  EXPECT_EQ(doc["command"], "safe-test");
  EXPECT_EQ(doc["results"]["conclusion_code"], "LikelyTypeIII");
  EXPECT_EQ(doc["results"]["d1"], 0);
  EXPECT_EQ(doc["results"]["d2"], 1);
  EXPECT_TRUE(doc.contains("stochastic_order"));
  EXPECT_EQ(doc["settings"]["alpha"], 0.05);
  EXPECT_FALSE(fs::exists(dir_ / "r.json.partial"));
}

TEST_F(CliTest, ReportRoundTripIsStable) {
  const fs::path out = dir_ / "r.json";
  ASSERT_EQ(run({"case", "silvapulle", "--out", out.string()}).code, kExitOk);
  const std::string text = slurp(out);
  EXPECT_EQ(dump_report(parse_document(text, "r.json")), text);
}

TEST_F(CliTest, DeterministicOutput) {
  const fs::path a = dir_ / "a.json", b = dir_ / "b.json";
  const fs::path in = write("p.json", R"({"s_n": [0.2, -0.1, 0.3], "sigma_n": [[1,0.2,0],[0.2,1,0.1],[0,0.1,1]],
    "n": 30, "order": "simple", "mc": {"N": 20000, "seed": 4}})");
  ASSERT_EQ(run({"safe-test", "--input", in.string(), "--out", a.string(), "--threads", "1"}).code, kExitOk);
  ASSERT_EQ(run({"safe-test", "--input", in.string(), "--out", b.string(), "--threads", "3"}).code, kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, MalformedJsonReportsPosition) {
  const fs::path in = write("bad.json", "{\n  \"s_n\": [1, 2,\n  ]\n}\n");
  const Invocation r = run({"safe-test", "--input", in.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("bad.json:3:"), std::string::npos) << r.err;
}

TEST_F(CliTest, WrongLengthIsInputErrorWithoutOutput) {
  const fs::path in = write("p.json", R"({"s_n": [1, 2, 3], "sigma_n": [[1,0],[0,1]], "n": 5, "order": "orthant"})");
  const fs::path out = dir_ / "o.json";
  const Invocation r = run({"safe-test", "--input", in.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, NonSpdCovarianceIsNumericError) {
  const fs::path in = write("p.json", R"({"s_n": [1, 2], "sigma_n": [[1,2],[2,1]], "n": 5, "order": "orthant"})");
  EXPECT_EQ(run({"safe-test", "--input", in.string()}).code, kExitNumeric);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"nonsense"}).code, kExitInput);
  EXPECT_EQ(run({"case", "nope"}).code, kExitInput);
  EXPECT_EQ(run({"case", "silvapulle", "--format", "csv"}).code, kExitInput);
  EXPECT_EQ(run({"case", "silvapulle", "--out", (dir_ / "missing" / "x.json").string()}).code, kExitInput);
}

TEST_F(CliTest, DistanceTestCommand) {
  const Invocation r = run({"dt", "--case", "silvapulle", "--problem", "a"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("12.8"), std::string::npos) << r.out;
}

TEST_F(CliTest, WeightsCsv) {
  const fs::path out = dir_ / "w.csv";
  ASSERT_EQ(run({"weights", "--rho", "0.5", "--mc-n", "20000", "--format", "csv", "--out", out.string()}).code,
            kExitOk);
  const std::string text = slurp(out);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4) << text;
}

TEST_F(CliTest, PowerSingleCellCsv) {
  const fs::path out = dir_ / "p.csv";
  const Invocation r = run({"power", "--reps", "2000", "--means", "3", "--gammas", "0.05", "--sizes", "20", "--format",
                     "csv", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string text = slurp(out);
  EXPECT_EQ(text.rfind("mean_label,gamma,n,power_dt,power_safe,se,replications,seed\n", 0), 0u) << text;
  EXPECT_NE(text.find("theta3,0.05,20,"), std::string::npos) << text;
}

TEST(CliBinary, ExitCodesFromProcess) {
  const std::string tool = ORTEST_TOOL_PATH;
  EXPECT_EQ(std::system((tool + " case silvapulle > /dev/null").c_str()), 0);
  const int bad = std::system((tool + " case nope > /dev/null 2>&1").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), kExitInput);
}
