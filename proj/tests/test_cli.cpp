#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "kaczmarz/problems.hpp"

namespace fs = std::filesystem;
using kaczmarz::cli::kExitOk;
using kaczmarz::cli::kExitUsage;
using kaczmarz::cli::kExitViolated;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kaczmarz::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kaczmarz_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string make_problem(const std::string& name, const std::string& m, const std::string& n,
                           const std::string& rank, const std::string& noise) {
    const Result r = run({"generate", "--m", m, "--n", n, "--rank", rank, "--noise", noise,
                          "--seed", "3", "--out", path(name)});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, GenerateIsByteIdenticalForTheSameSeed) {
  const std::string a = make_problem("a.kzp", "6", "4", "3", "0.2");
  const std::string b = make_problem("b.kzp", "6", "4", "3", "0.2");
  EXPECT_EQ(slurp(a), slurp(b));
  const kaczmarz::LeastSquaresProblem p = kaczmarz::load_problem(a);
  EXPECT_EQ(p.a.rows(), 6u);
  EXPECT_EQ(p.rank, 3u);
}

TEST_F(CliTest, GenerateReportsSummary) {
  const Result r = run({"generate", "--m", "5", "--n", "5", "--out", path("p.kzp")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("5x5 rank 5"), std::string::npos) << r.out;
}

TEST_F(CliTest, GenerateUsageErrors) {
  EXPECT_EQ(run({"generate", "--m", "3", "--n", "3"}).code, kExitUsage);
  EXPECT_EQ(run({"generate", "--m", "0", "--n", "3", "--out", path("x")}).code, kExitUsage);
  EXPECT_EQ(run({"generate", "--m", "3", "--n", "3", "--noise", "0.5", "--out", path("x")}).code,
            kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, kExitUsage);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(CliTest, KtTraceErrorsNeverIncrease) {
  const std::string p = make_problem("p.kzp", "5", "7", "4", "0");
  const Result r = run({"solve", "--problem", p, "--solver", "kt", "--iters", "40", "--x0",
                        "random", "--trace-out", path("t.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = csv_rows(slurp(path("t.csv")));
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "row_index", "col_index", "err", "err_sq", "y_err"}));
  for (std::size_t k = 2; k < rows.size(); ++k)
    EXPECT_LE(std::stod(rows[k][3]), std::stod(rows[k - 1][3]) * (1 + 1e-12) + 1e-14) << k;
}

TEST_F(CliTest, KaczmarzTraceHasOneBasedIndices) {
  const std::string p = make_problem("p.kzp", "3", "3", "3", "0");
  ASSERT_EQ(run({"solve", "--problem", p, "--solver", "kaczmarz", "--control", "cyclic", "--iters",
                 "4", "--trace-out", path("t.csv")})
                .code,
            kExitOk);
  const auto rows = csv_rows(slurp(path("t.csv")));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[1][1], "");
  EXPECT_EQ(rows[2][1], "1");
  EXPECT_EQ(rows[4][1], "3");
  EXPECT_EQ(rows[5][1], "1");
  EXPECT_EQ(rows[2][5], "");
}

TEST_F(CliTest, ExtendedTraceHasColumnsAndYError) {
  const std::string p = make_problem("p.kzp", "6", "3", "3", "0.5");
  ASSERT_EQ(run({"solve", "--problem", p, "--solver", "ek", "--control", "random", "--col-control",
                 "random", "--iters", "5", "--trace-out", path("t.csv")})
                .code,
            kExitOk);
  const auto rows = csv_rows(slurp(path("t.csv")));
  EXPECT_FALSE(rows[2][2].empty());
  EXPECT_GT(std::stod(rows[1][5]), 0.0);
}

TEST_F(CliTest, SolveIsDeterministic) {
  const std::string p = make_problem("p.kzp", "6", "4", "4", "0");
  for (const char* name : {"a.csv", "b.csv"})
    ASSERT_EQ(run({"solve", "--problem", p, "--solver", "kaczmarz", "--control", "random", "--seed",
                   "9", "--iters", "50", "--trace-out", path(name)})
                  .code,
              kExitOk);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, SolveFlagErrors) {
  const std::string p = make_problem("p.kzp", "4", "4", "4", "0");
  EXPECT_EQ(run({"solve", "--problem", p, "--solver", "kt", "--control", "mr"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--problem", p, "--solver", "kaczmarz", "--col-control", "mr"}).code,
            kExitUsage);
  EXPECT_EQ(run({"solve", "--problem", p, "--solver", "nope"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--problem", p, "--solver", "kaczmarz", "--control", "almost-cyclic",
                 "--gamma", "3"})
                .code,
            kExitUsage);
  EXPECT_EQ(run({"solve", "--problem", path("missing.kzp"), "--solver", "kt"}).code, kExitUsage);
  std::ofstream(path("bad.kzp")) << "kaczmarz-problem v1 2 2 2 0\nA:\n1 0\n";
  const Result bad = run({"solve", "--problem", path("bad.kzp"), "--solver", "kt"});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("line 4"), std::string::npos) << bad.err;
}

TEST_F(CliTest, VerifyEveryDeterministicBound) {
  const std::string consistent = make_problem("c.kzp", "6", "5", "4", "0");
  const std::string noisy = make_problem("n.kzp", "7", "5", "4", "0.5");
  const std::vector<std::pair<std::string, std::string>> cases{
      {"kt", consistent}, {"ack", consistent}, {"mrk", consistent},
      {"ekt", noisy},     {"mrek", noisy},     {"acek", noisy}};
  for (const auto& [bound, problem] : cases) {
    const Result r = run({"verify", "--problem", problem, "--bound", bound, "--iters", "300"});
    EXPECT_EQ(r.code, kExitOk) << bound << ": " << r.err << r.out;
    const nlohmann::json j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["bound_name"], bound);
    EXPECT_TRUE(j["satisfied"].get<bool>()) << bound;
    EXPECT_GE(j["worst_slack"].get<double>(), 0.0);
    EXPECT_TRUE(j["constants"].is_object());
    EXPECT_TRUE(j["classification"].contains("verdict"));
  }
}

TEST_F(CliTest, VerifyExpectationBoundsWithReportFile) {
  const std::string consistent = make_problem("c.kzp", "8", "4", "4", "0");
  const std::string noisy = make_problem("n.kzp", "8", "5", "3", "0.5");
  setenv("KACZMARZ_LAB_THREADS", "2", 1);
  const Result rk = run({"verify", "--problem", consistent, "--bound", "rk", "--trials", "300",
                         "--iters", "50", "--report", path("rk.json")});
  const Result rek = run({"verify", "--problem", noisy, "--bound", "rek", "--trials", "300",
                          "--iters", "50", "--report", path("rek.json")});
  unsetenv("KACZMARZ_LAB_THREADS");
  EXPECT_EQ(rk.code, kExitOk) << rk.err;
  EXPECT_EQ(rek.code, kExitOk) << rek.err;
  EXPECT_NE(rk.out.find("satisfied"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(slurp(path("rek.json")))["satisfied"].get<bool>());
}

TEST_F(CliTest, InapplicableBoundExitCodes) {
  const std::string noisy = make_problem("n.kzp", "6", "3", "3", "0.5");
  const std::vector<std::string> base{"verify", "--problem", noisy, "--bound", "rk",
                                      "--trials", "100", "--iters", "10"};
  const Result strict = run(base);
  EXPECT_EQ(strict.code, kExitViolated);
  EXPECT_FALSE(nlohmann::json::parse(strict.out)["applicable"].get<bool>());
  std::vector<std::string> lenient = base;
  lenient.push_back("--allow-inapplicable");
  EXPECT_EQ(run(lenient).code, kExitOk);
}

TEST_F(CliTest, VerifyUsageErrors) {
  const std::string p = make_problem("p.kzp", "8", "4", "4", "0");
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "ack", "--gamma", "5"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "kt", "--solver", "ekt"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "mrk", "--control", "random"}).code,
            kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "kt", "--control", "cyclic"}).code,
            kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "rk", "--trials", "50"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "rk", "--x0", "random"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "nope"}).code, kExitUsage);
  setenv("KACZMARZ_LAB_THREADS", "zero", 1);
  EXPECT_EQ(run({"verify", "--problem", p, "--bound", "rk", "--trials", "100"}).code, kExitUsage);
  unsetenv("KACZMARZ_LAB_THREADS");
}
