#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(MHFIE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mhfie_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, NodesDegreeZero) {
  ASSERT_EQ(run("nodes --alpha 1 -N 0 --out " + path("n.csv")), 0);
  const std::string text = slurp(path("n.csv"));
  EXPECT_EQ(text.substr(0, 10), "j,z,x,chi\n");
  EXPECT_NE(text.find(",0.5,"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("nodes -N -1"), 2);
  EXPECT_EQ(run("nodes --alpha 0 -N 4"), 2);
  EXPECT_EQ(run("quad-test --integrand nope --n-list 4"), 2);
  EXPECT_EQ(run("solve --problem ex1-alg --method nope -N 4"), 2);
  EXPECT_EQ(run("converge --problem ex1-alg"), 2);
}

TEST_F(Cli, UnknownProblemWritesNothing) {
  EXPECT_EQ(run("converge --problem nope --n-list 4,8 --out " + path("c.csv")), 2);
  EXPECT_FALSE(fs::exists(path("c.csv")));
}

TEST_F(Cli, ConvergeWritesTableAndMeta) {
  ASSERT_EQ(run("converge --problem ex1-alg --alpha 0.15 --n-list 4,8 --out " + path("c.csv")), 0);
  const std::string text = slurp(path("c.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "N,NI,alpha,err_inf,err_l2chi,newton_iters,runtime_ms,err_nodes");
  EXPECT_NE(text.find("\n8,9,"), std::string::npos);
  const std::string meta = slurp(path("c.csv.meta.json"));
  EXPECT_NE(meta.find("\"problem\": \"ex1-alg\""), std::string::npos);
  EXPECT_NE(meta.find("timestamp"), std::string::npos);
}

TEST_F(Cli, FailedSolveGivesNanRowAndExitOne) {
  EXPECT_EQ(run("converge --problem ex1-log --alpha 0.15 --n-list 4,5 --ni-offset 0 --out " + path("c.csv")), 1);
  const std::string text = slurp(path("c.csv"));
  EXPECT_NE(text.find("4,4,0.14999999999999999,nan"), std::string::npos);
  EXPECT_NE(text.find("\n5,5,"), std::string::npos);
}

TEST_F(Cli, ConfigFileAndOverride) {
  std::ofstream(path("cfg.json")) << R"({"problem": "ex1-alg", "alpha": 0.15, "n_list": "4,6", "out": ")"
                                  << path("c.csv") << "\"}\n";
  ASSERT_EQ(run("converge --config " + path("cfg.json")), 0);
  EXPECT_NE(slurp(path("c.csv")).find("\n6,7,0.14999999999999999,"), std::string::npos);

  ASSERT_EQ(run("converge --config " + path("cfg.json") + " --alpha 0.3 --n-list 5"), 0);
  const std::string text = slurp(path("c.csv"));
  EXPECT_NE(text.find("\n5,6,0.29999999999999999,"), std::string::npos);
  EXPECT_EQ(text.find("\n4,"), std::string::npos);

  std::ofstream(path("bad.json")) << R"({"problem": "ex1-alg", "colour": 3})";
  EXPECT_EQ(run("converge --config " + path("bad.json")), 2);
  EXPECT_EQ(run("converge --config " + path("missing.json")), 2);
}

TEST_F(Cli, SolveAndCompare) {
  EXPECT_EQ(run("solve --problem ex2-sqrt --alpha 0.3 -N 8 --dump " + path("u.csv")), 0);
  EXPECT_EQ(slurp(path("u.csv")).substr(0, 4), "x,u\n");
  EXPECT_EQ(run("compare --problem ex3-alg --alpha 0.08 --n-list 0,4 --out " + path("cmp.csv")), 0);
  EXPECT_NE(slurp(path("cmp.csv")).find("\n4,5,"), std::string::npos);
  EXPECT_EQ(run("quad-test --integrand moments --k 2 --n-list 4,8 --out " + path("q.csv")), 0);
}
