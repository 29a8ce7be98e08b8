#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "jarnik/cli.hpp"

using namespace jarnik;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Runs the built binary through the shell; returns exit status and stdout.
Result run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + std::string(JARNIK_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, "", ""};
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST(Format, NineSignificantDigits) {
  EXPECT_EQ(cli::fmt9(0.5), "0.5");
  EXPECT_EQ(cli::fmt9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(cli::fmt9(123456789.123), "123456789");
  EXPECT_EQ(cli::fmt9(2.0), "2");
}

TEST(Parse, IntegerLists) {
  EXPECT_EQ(cli::parse_int_list("9..12"), (std::vector<std::int64_t>{9, 10, 11, 12}));
  EXPECT_EQ(cli::parse_int_list("2,5..6,9"), (std::vector<std::int64_t>{2, 5, 6, 9}));
  EXPECT_THROW(cli::parse_int_list("3..1"), domain_error);
  EXPECT_THROW(cli::parse_int_list("x"), domain_error);
  EXPECT_EQ(cli::parse_double_list("0.5,2").size(), 2u);
}

TEST(Schema, CsvHeadersAndRowCounts) {
  const auto sp = run({"sft-sweep", "--n", "2,3,4", "--p", "1,2", "--c", "1..6", "--format", "csv"});
  ASSERT_EQ(sp.code, 0) << sp.err;
  auto l = lines(sp.out);
  EXPECT_EQ(l.front(), "n,p,word,c,reading,exact_dim_at_c,exact_dim_at_shifted,bound_V,upper_ok,lower_ok");
  EXPECT_EQ(l.size(), 1u + 348u);

  const auto ts = run({"toral-sweep"});
  ASSERT_EQ(ts.code, 0) << ts.err;
  l = lines(ts.out);
  EXPECT_EQ(l.front(), "lambda,beta,m,c,oracle_dim,lower_bound,upper_bound,boxcount");
  EXPECT_EQ(l.size(), 7u);
  EXPECT_EQ(l[1].substr(0, 31), "2,2,3,2.07944154,1.38848383,1.3");

  const auto sc = run({"spectrum", "--points", "20"});
  ASSERT_EQ(sc.code, 0) << sc.err;
  EXPECT_EQ(lines(sc.out).size(), 21u);
}

TEST(Schema, JsonReports) {
  const auto vj = run({"verify-jarnik", "--N", "9..16"});
  ASSERT_EQ(vj.code, 0) << vj.err;
  const auto j = nlohmann::json::parse(vj.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"], "verify-jarnik");
  EXPECT_TRUE(j["ok"].get<bool>());
  ASSERT_EQ(j["rows"].size(), 8u);
  for (const auto& row : j["rows"]) {
    EXPECT_TRUE(row["ok"].get<bool>());
    for (const char* k : {"N", "lower", "oracle", "upper"}) EXPECT_TRUE(row.contains(k)) << k;
  }
  const auto b = nlohmann::json::parse(run({"bounds", "--formula", "thm37", "--n", "2", "--c", "2"}).out);
  EXPECT_NEAR(b["rows"][0]["value"].get<double>(), 0.549306144, 1e-9);
}

TEST(Schema, Thm31TableLeavesUnavailableCellsEmpty) {
  const auto r = run({"bounds", "--formula", "thm31-table", "--n", "1", "--c", "1.5,3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "n,r,c,bound_lower,bound_upper,applicable_radius,boxcount_estimate,oracle_low,oracle_high");
  EXPECT_EQ(l[1].substr(0, 10), "1,1,1.5,,0");
  EXPECT_EQ(l[2].substr(0, 17), "1,1,3,0.967235498");
}

TEST(Examples, BoxcountBad1WithinBracket) {
  const auto r = run({"boxcount", "--instance", "bad1", "--c-from-N", "10", "--depth", "14"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto row = nlohmann::json::parse(r.out)["rows"][0];
  EXPECT_TRUE(row["ok"].get<bool>());
  EXPECT_NEAR(row["slope"].get<double>(), 0.927732724, 1e-8);
}

TEST(Determinism, IdenticalAcrossRunsAndThreads) {
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"sft-sweep", "--n", "2,3", "--p", "1", "--c", "1..4"},
           {"boxcount", "--instance", "toral", "--lambdas", "2,2", "--depth", "10"},
           {"boxcount", "--instance", "sft", "--depth", "12"},
           {"subcover", "--depth", "2"},
           {"dirichlet-check", "--n", "2", "--trials", "200"},
           {"spectrum", "--points", "50"}}) {
    auto a = cmd, b = cmd;
    a.insert(a.end(), {"--threads", "1"});
    b.insert(b.end(), {"--threads", "4"});
    const auto x = run(a), y = run(b), z = run(a);
    EXPECT_EQ(x.code, 0) << cmd.front() << x.err;
    EXPECT_EQ(x.out, y.out) << cmd.front();
    EXPECT_EQ(x.out, z.out) << cmd.front();
  }
}

TEST(Errors, ConfigErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"verify-jarnik", "--N", "3..5"}).code, 2);
  EXPECT_EQ(run({"bounds", "--formula", "eq37-upper", "--lambda", "2", "--beta", "1", "--c", "5"}).code, 2);
  EXPECT_EQ(run({"boxcount", "--instance", "nothing"}).code, 2);
  const auto r = run({"sft-dim", "--word", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Errors, FalsifiedCheckExitsThree) {
  // a cover estimate cut short by the budget cannot certify the bracket
  const auto r = run({"boxcount", "--instance", "bad1", "--c-from-N", "4", "--depth", "14", "--max-cells", "2000"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(nlohmann::json::parse(r.out)["ok"].get<bool>());
}

TEST(Binary, ExitCodesAndBudgetVariable) {
  EXPECT_EQ(run_binary("verify-jarnik --N 9,10").code, 0);
  EXPECT_EQ(run_binary("--bogus").code, 2);
  const auto full = run_binary("boxcount --instance bad1 --c-from-N 4 --depth 14");
  EXPECT_EQ(full.code, 0);
  const auto capped = run_binary("boxcount --instance bad1 --c-from-N 4 --depth 14", "JARNIK_BUDGET_CELLS=2000");
  EXPECT_EQ(capped.code, 3);
  EXPECT_TRUE(nlohmann::json::parse(capped.out)["truncated"].get<bool>());
}

TEST(Output, WritesToFile) {
  const auto path = std::filesystem::temp_directory_path() / "jarnik_cli_test.csv";
  const auto r = run({"toral-sweep", "--m", "3..4", "-o", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(lines(ss.str()).size(), 3u);
  std::filesystem::remove(path);
}
