#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "f2ac/cli.hpp"
#include "f2ac/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int status = f2ac::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("f2ac_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    f2ac::set_thread_count(1);
    fs::remove_all(dir_);
  }
  std::string file(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static json load(const std::string& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  fs::path dir_;
};

}  // namespace

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(f2ac::cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(f2ac::cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(f2ac::cli::fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST_F(CliTest, EnergyOfBasis) {
  const std::string set = file("basis3.set", "3\n100\n010\n001\n");
  const CliRun r = cli({"energy", "--set", set, "--k", "2", "--method", "all"});
  ASSERT_EQ(r.status, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["result"]["value"], 21);
  EXPECT_EQ(j["result"]["agree"], true);
  EXPECT_EQ(j["result"]["methods"].size(), 3U);
  EXPECT_EQ(j["config"]["inputs"]["set"]["fnv1a"].get<std::string>().size(), 16U);
  EXPECT_TRUE(j.contains("timing"));
}

TEST_F(CliTest, MalformedSetFile) {
  const std::string set = file("bad.set", "3\n100\n1x0\n");
  const CliRun r = cli({"energy", "--set", set, "--k", "2"});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"energy", "--set", path("missing.set"), "--k", "2"}).status, 2);
}

TEST_F(CliTest, RationalsOnly) {
  const std::string set = file("basis3.set", "3\n100\n010\n001\n");
  EXPECT_EQ(cli({"spectrum", "--set", set, "--alpha", "0.5"}).status, 2);
  const CliRun r = cli({"spectrum", "--set", set, "--alpha", "3/8", "--csv", path("s.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  // A^(r) = 3 - 2|r|: only r = 000 and r = 111 reach 3/8 * 8 in absolute value.
  EXPECT_EQ(json::parse(r.out)["result"]["large_spectrum"], json::array({"000", "111"}));
  std::ifstream csv(path("s.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "r,coefficient");
}

TEST_F(CliTest, DissociateVerdictsMapToExitCodes) {
  const std::string indep = file("i.set", "3\n100\n010\n001\n");
  const std::string dep = file("d.set", "3\n110\n011\n101\n");
  EXPECT_EQ(cli({"dissociate", "--check", indep, "--k", "3"}).status, 0);
  EXPECT_EQ(cli({"dissociate", "--check", dep, "--k", "3"}).status, 1);
  EXPECT_EQ(cli({"dissociate", "--check", dep, "--k", "2"}).status, 0);
}

TEST_F(CliTest, PermanentAndFk) {
  const std::string m = file("m.txt", "2 3\n1 1 0\n0 1 1\n");
  const CliRun p = cli({"permanent", "--matrix", m});
  ASSERT_EQ(p.status, 0) << p.err;
  EXPECT_EQ(json::parse(p.out)["result"]["permanent"], 3);
  const CliRun f = cli({"fk-test", "--matrix", m});
  ASSERT_EQ(f.status, 0) << f.err;
  EXPECT_EQ(json::parse(f.out)["result"]["zero"], false);
  const CliRun l = cli({"lemma-per0", "--exhaustive", "2", "2"});
  EXPECT_EQ(l.status, 0) << l.err;
  EXPECT_EQ(json::parse(l.out)["result"]["examined"], 81);
}

TEST_F(CliTest, BenchMajority) {
  const CliRun r = cli({"bench", "--theorem", "majority", "--n", "20", "--delta", "1/64", "--out", path("m.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["result"]["majority"]["k"], 4);
  EXPECT_EQ(j["result"]["rows"].size(), 10U);
  EXPECT_EQ(j["result"]["counts"]["violated"], 0);
  std::ifstream csv(path("m.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "instance,lhs,rhs,holds,slack");
}

TEST_F(CliTest, BenchSweepConfig) {
  const std::string cfg = file("sweep.json", R"({"seed": 3, "instances": 20, "p_values": [2]})");
  const CliRun r = cli({"bench", "--theorem", "diss", "--sweep", cfg, "--out", path("d.csv")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["config"]["seed"], 3);
  EXPECT_EQ(j["result"]["counts"]["holds"], 20);
  const std::string bad = file("bad.json", R"({"seeed": 3})");
  EXPECT_EQ(cli({"bench", "--theorem", "diss", "--sweep", bad}).status, 2);
  EXPECT_EQ(cli({"bench", "--theorem", "nope"}).status, 2);
}

TEST_F(CliTest, ReplayAcrossThreadCounts) {
  ASSERT_EQ(cli({"plant", "--h", "2", "--lsize", "4", "--lpsize", "4", "--noise", "1/10", "--seed", "5", "--out-q",
                 path("q.set"), "--out-lambda", path("l.set"), "--report", path("plant.json")})
                .status,
            0);
  f2ac::set_thread_count(1);
  const CliRun e = cli({"extract", "--q", path("q.set"), "--lambda", path("l.set"), "--d", "2", "--p", "4", "--seed",
                     "5", "--report", path("ex.json")});
  ASSERT_EQ(e.status, 0) << e.err;
  f2ac::set_thread_count(4);
  EXPECT_EQ(cli({"replay", path("ex.json")}).status, 0);
  EXPECT_EQ(cli({"replay", path("plant.json")}).status, 0);
  const json rep = load(path("ex.json"));
  EXPECT_EQ(rep["config"]["seed"], 5);
  EXPECT_GE(rep["result"]["coverage"].get<double>(), 0.9);
}

TEST_F(CliTest, ReplayDetectsTampering) {
  ASSERT_EQ(cli({"bench", "--theorem", "chang", "--seed", "9", "--instances", "10", "--report", path("b.json")}).status,
            0);
  json rep = load(path("b.json"));
  rep["result"]["rows"][3]["lhs"] = "12345";
  std::ofstream(path("t.json")) << rep.dump(2);
  const CliRun t = cli({"replay", path("t.json")});
  EXPECT_EQ(t.status, 1);
  EXPECT_NE(t.out.find("/result/rows/3/lhs"), std::string::npos) << t.out;

  rep = load(path("b.json"));
  rep["config"].erase("seed");
  std::ofstream(path("n.json")) << rep.dump(2);
  const CliRun n = cli({"replay", path("n.json")});
  EXPECT_EQ(n.status, 2);
  EXPECT_NE(n.err.find("seed"), std::string::npos);
}

TEST_F(CliTest, ReplayRejectsChangedInput) {
  const std::string set = file("a.set", "3\n100\n010\n");
  ASSERT_EQ(cli({"energy", "--set", set, "--k", "2", "--report", path("e.json")}).status, 0);
  EXPECT_EQ(cli({"replay", path("e.json")}).status, 0);
  file("a.set", "3\n100\n011\n");
  EXPECT_EQ(cli({"replay", path("e.json")}).status, 2);
}
