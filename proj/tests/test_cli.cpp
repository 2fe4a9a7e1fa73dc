#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "abelnp/cli.hpp"

using namespace abelnp;
namespace fs = std::filesystem;

namespace {

const std::string kData = ABELNP_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("abelnp_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, VerifyStickelberger) {
  const Result r = run({"--workers", "1", "verify", kData + "/stickelberger.spec"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["command"], "verify");
  EXPECT_EQ(j["ok"], true);
  EXPECT_EQ(j["newton"]["slopes"], nlohmann::json::parse("[[1, 2, 1]]"));
  EXPECT_EQ(j["hodge"]["slopes"], nlohmann::json::parse("[[1, 2, 1]]"));
  EXPECT_EQ(j["degree"], 1);
}

TEST(Cli, CorruptedHodgeSlopesExitOne) {
  const Result r = run({"verify", kData + "/stickelberger.spec", "--hodge-slopes", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.json()["np_above_hp"], false);
}

TEST(Cli, MalformedInputExitsTwo) {
  const fs::path d = scratch("malformed");
  std::ofstream(d / "bad.spec") << "p = 4\na = 1\nn = 1\nwild = [[[0, 1]]]\n";
  EXPECT_EQ(run({"verify", (d / "bad.spec").string()}).code, 2);
  EXPECT_EQ(run({"verify", (d / "missing.spec").string()}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"verify"}).code, 2);
}

TEST(Cli, BudgetExitsThree) {
  const Result r = run({"--budget", "10", "lfunction", kData + "/artin_schreier_t4.spec"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, SeedIsRecorded) {
  const Result r = run({"--seed", "1234", "invariants", kData + "/q9_tame.spec"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["seed"], 1234);
}

TEST(Cli, OutputFileAndTsv) {
  const fs::path d = scratch("tsv");
  const Result r = run({"--output", (d / "hodge.json").string(), "--tsv-dir", (d / "tsv").string(), "hodge",
                        kData + "/stickelberger.spec"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(slurp(d / "hodge.json"));
  const std::string hash = j["spec_hash"];
  EXPECT_EQ(slurp(d / "tsv" / (hash + ".hodge.tsv")), "x_num\tx_den\ty_num\ty_den\n0\t1\t0\t1\n1\t1\t1\t2\n");
}

TEST(Cli, CoverAndDworkCommands) {
  const Result c = run({"--workers", "1", "cover", kData + "/cover_z3.spec"});
  EXPECT_EQ(c.code, 0) << c.err;
  const Result d = run({"dwork-check", kData + "/stickelberger.spec", "--T", "20", "--M", "6", "--d", "2"});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(run({"dwork-check", kData + "/q9_tame.spec"}).code, 2);
}

TEST(Cli, EmptySweepWritesHeaderOnly) {
  const fs::path d = scratch("sweep0");
  const Result r = run({"sweep", "--count", "0", "--out-dir", d.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(d / "summary.tsv"),
            "spec_hash\tp\ta\tn\ttame\tmax_swan\tdegree\tmin_margin\tendpoints_match\tresult\n");
  EXPECT_EQ(nlohmann::json::parse(slurp(d / "failures.json")), nlohmann::json::array());
  EXPECT_EQ(r.json()["count"], 0);
}

TEST(Cli, SweepIsDeterministicAndCached) {
  const fs::path a = scratch("sweepA"), b = scratch("sweepB"), cache = scratch("cache");
  const std::vector<std::string> common{"--workers", "1", "--seed", "7", "--cache-dir", cache.string()};
  auto sweep = [&](const fs::path& out) {
    std::vector<std::string> args = common;
    for (const char* s : {"sweep", "--count", "6", "--max-points", "200000", "--out-dir"}) args.emplace_back(s);
    args.push_back(out.string());
    return run(args);
  };
  const Result first = sweep(a), second = sweep(b);
  ASSERT_EQ(first.code, 0) << first.err;
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(first.json()["cache_hits"], 0);
  EXPECT_GT(second.json()["cache_hits"].get<int>(), 0);
  for (const char* f : {"summary.tsv", "failures.json", "results.jsonl"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  const Result cold = run({"--workers", "1", "--seed", "7", "sweep", "--count", "6", "--max-points", "200000", "--out-dir",
                           scratch("sweepC").string()});
  ASSERT_EQ(cold.code, 0);
  EXPECT_EQ(slurp(a / "summary.tsv"), slurp(fs::temp_directory_path() / "abelnp_cli_sweepC" / "summary.tsv"));
}
