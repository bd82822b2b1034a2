// End-to-end checks of the command-line tool: spawns the real binary.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(RPW_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("rpw_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    write(path("same_a.csv"), "x_1,mass\n0,0.5\n1,0.5\n");
    write(path("same_b.csv"), "x_1,mass\n0,0.5\n1,0.5\n");
    write(path("over_a.csv"), "x_1,mass\n0,0.5\n1,0.5\n");
    write(path("over_b.csv"), "x_1,mass\n0,0.4\n1,0.6\n");
    write(path("out_a.csv"), "x_1,mass\n0,1\n");
    write(path("out_b.csv"), "x_1,mass\n0,0.99\n1,0.01\n");
  }
  void TearDown() override { fs::remove_all(dir_); }
  static void write(const std::string& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, DistIdenticalFilesIsZero) {
  auto r = run("dist --metric rpw --p 2 --k 1 " + path("same_a.csv") + " " + path("same_b.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["epsilon"].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(j["method"].get<std::string>(), "profile_intersection");
}

TEST_F(CliTest, DistOverlapFixture) {
  auto r = run("dist --metric rpw --p 1 --k 1 " + path("over_a.csv") + " " + path("over_b.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["epsilon"].get<double>(), 0.05, 1e-9);
}

TEST_F(CliTest, DistWassersteinPaperValue) {
  auto r = run("dist --metric w --p 2 " + path("out_a.csv") + " " + path("out_b.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 0.1, 1e-9);
}

TEST_F(CliTest, DistBinarySearchAndApproxAndLpAndTv) {
  auto bs = run("dist --metric rpw-bs --p 1 --k 1 --delta 0.0001 " + path("over_a.csv") + " " +
                path("over_b.csv"));
  ASSERT_EQ(bs.exit_code, 0);
  EXPECT_NEAR(nlohmann::json::parse(bs.out)["epsilon"].get<double>(), 0.05, 1e-4 + 1e-9);

  auto ap = run("dist --metric rpw-approx --p 1 --k 1 --delta 0.01 " + path("over_a.csv") +
                " " + path("over_b.csv"));
  ASSERT_EQ(ap.exit_code, 0);
  const double eps = nlohmann::json::parse(ap.out)["epsilon"].get<double>();
  EXPECT_GE(eps, 0.05 - 1e-9);
  EXPECT_LE(eps, 0.06 + 1e-9);

  auto tv = run("dist --metric tv " + path("over_a.csv") + " " + path("over_b.csv"));
  ASSERT_EQ(tv.exit_code, 0);
  EXPECT_NEAR(nlohmann::json::parse(tv.out)["value"].get<double>(), 0.1, 1e-12);

  auto lp = run("dist --metric lp " + path("over_a.csv") + " " + path("over_b.csv"));
  ASSERT_EQ(lp.exit_code, 0);
  EXPECT_NEAR(nlohmann::json::parse(lp.out)["value"].get<double>(), 0.1, 1e-9);
}

TEST_F(CliTest, DistInfiniteExponent) {
  auto r = run("dist --metric rpw --p inf --k 1 " + path("over_a.csv") + " " +
               path("over_b.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["epsilon"].get<double>(), 0.1, 1e-9);
  EXPECT_EQ(j["p"].get<std::string>(), "inf");

  auto w = run("dist --metric w --p inf " + path("out_a.csv") + " " + path("out_b.csv"));
  ASSERT_EQ(w.exit_code, 0);
  EXPECT_NEAR(nlohmann::json::parse(w.out)["value"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, ExitCodeTwoOnMissingFile) {
  auto r = run("dist --metric rpw " + path("nope.csv") + " " + path("same_b.csv"));
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, ExitCodeThreeOnBadParameters) {
  EXPECT_EQ(run("dist --metric rpw --p 0.5 " + path("same_a.csv") + " " + path("same_b.csv"))
                .exit_code,
            3);
  EXPECT_EQ(run("dist --metric rpw --k -2 " + path("same_a.csv") + " " + path("same_b.csv"))
                .exit_code,
            3);
  EXPECT_EQ(run("dist --metric nope " + path("same_a.csv") + " " + path("same_b.csv")).exit_code,
            3);
  EXPECT_EQ(run("dist").exit_code, 3);
}

TEST_F(CliTest, ProfileCommandWritesBreakpoints) {
  const std::string out = path("prof.csv");
  auto r = run("profile --p 1 --out " + out + " " + path("over_a.csv") + " " + path("over_b.csv"));
  ASSERT_EQ(r.exit_code, 0);
  const std::string content = read_file(out);
  EXPECT_NE(content.find("mass,p_power_cost,wp_value"), std::string::npos);
  EXPECT_NE(content.find("0.9,0,0"), std::string::npos);
}

TEST_F(CliTest, ConvergeDeterministicOutputs) {
  const std::string args = "converge --dist two_point --n-list 10,50 --metrics tv,w2 --seed 7 "
                           "--jobs 2 --out ";
  ASSERT_EQ(run(args + path("c1")).exit_code, 0);
  ASSERT_EQ(run(args + path("c2")).exit_code, 0);
  EXPECT_EQ(read_file(path("c1_cells.csv")), read_file(path("c2_cells.csv")));
  EXPECT_EQ(read_file(path("c1_slopes.csv")), read_file(path("c2_slopes.csv")));
  EXPECT_FALSE(read_file(path("c1_cells.csv")).empty());
}

TEST_F(CliTest, RetrieveSyntheticDeterministic) {
  const std::string args =
      "retrieve --items 12 --queries 3 --scenario noise --metrics \"tv,rpw(2,1)\" --m-max 5 "
      "--seed 3 --jobs 2 --out ";
  ASSERT_EQ(run(args + path("r1.csv")).exit_code, 0);
  ASSERT_EQ(run(args + path("r2.csv")).exit_code, 0);
  EXPECT_EQ(read_file(path("r1.csv")), read_file(path("r2.csv")));
  EXPECT_NE(read_file(path("r1.csv")).find("metric,scenario,m,accuracy"), std::string::npos);
}

TEST_F(CliTest, EnvSeedOverridesFlag) {
  const std::string base =
      "converge --dist two_point --n-list 10 --metrics tv --out " + path("env");
  const std::string cmd = "RPW_SEED=99 " + std::string(RPW_CLI_PATH) + " " + base +
                          " --seed 1 >/dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  const std::string with_env = read_file(path("env_cells.csv"));
  ASSERT_EQ(run(base + " --seed 99").exit_code, 0);
  EXPECT_EQ(read_file(path("env_cells.csv")), with_env);
}
