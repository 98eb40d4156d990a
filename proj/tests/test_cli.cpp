#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result lab(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"plate_lab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = plate::cli::run(int(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Workdir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("plate_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string c; std::getline(cells, c, ',');) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, SolveReportsPositivity) {
  const Result r = lab({"solve", "--domain", "interval", "--L", "1", "--eps", "0.1", "--h", "0.00390625", "--forcing",
                        "const:1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["positivity"]["is_nonneg"], true);
  EXPECT_GT(j["positivity"]["min"].get<double>(), 0.0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(lab({"solve", "--domain", "interval", "--h", "0.01"}).code, 2);  // no eps
  EXPECT_EQ(lab({"solve", "--eps", "0.1", "--forcing", "const:-1"}).code, 2);
  EXPECT_EQ(lab({"solve", "--eps", "0.1", "--gamma", "100"}).code, 2);
  EXPECT_EQ(lab({"solve", "--eps", "0.1", "--h", "0.3"}).code, 2);  // does not divide
  EXPECT_EQ(lab({"solve", "--eps", "0", "--h", "0.25"}).code, 2);
  EXPECT_EQ(lab({"solve", "--eps", "0.1", "--h-rule", "eps/2"}).code, 2);
  EXPECT_EQ(lab({"solve", "--domain", "sphere", "--eps", "0.1"}).code, 2);
  EXPECT_EQ(lab({}).code, 2);
  EXPECT_EQ(lab({"frobnicate"}).code, 2);
  EXPECT_EQ(lab({"threshold", "--bracket", "1,0.1"}).code, 2);
  const Result e = lab({"solve", "--eps", "0.1", "--forcing", "const:-1"});
  EXPECT_NE(e.err.find("plate_lab solve"), std::string::npos);
  EXPECT_TRUE(e.out.empty());
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(lab({"--version"}).code, 0);
  const Result h = lab({"solve", "--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("--forcing"), std::string::npos);
}

TEST(Cli, GammaMatchesEps) {
  const Result a = lab({"solve", "--gamma", "100", "--h", "1/256"});
  const Result b = lab({"solve", "--eps", "0.1", "--h", "1/256"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ExactProfile) {
  const Result r = lab({"exact", "--model", "profile", "--beta", "1", "--tmax", "5", "--dt", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 501u);
  EXPECT_EQ(rows[100][0], 1.0);
  EXPECT_NEAR(rows[100][1], 0.36787944117144233, 1e-15);
  EXPECT_EQ(r.out.substr(0, 11), "t,u,du,d2u\n");
}

TEST(Cli, ExactOneDimensionalClamped) {
  const Result r = lab({"exact", "--model", "oned", "--eps", "0.1", "--dt", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 101u);
  for (const auto& end : {rows.front(), rows.back()}) {
    EXPECT_LE(std::abs(end[1]), 1e-10);
    EXPECT_LE(std::abs(end[2]), 1e-10);
  }
  EXPECT_NEAR(rows[50][1], 0.075669285092428483, 1e-12);
}

TEST(Cli, ExactRadialClamped) {
  const Result r = lab({"exact", "--model", "radial", "--eps", "0.05", "--dt", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows.back()[0], 1.0);
  EXPECT_LE(std::abs(rows.back()[1]), 1e-8);
  EXPECT_LE(std::abs(rows.back()[2]), 1e-8);
  EXPECT_NEAR(rows[0][1], 0.22435030687428704, 1e-10);
  EXPECT_NEAR(rows[50][1], 0.16185196434595881, 1e-10);
}

TEST(Cli, ThresholdOneDimensional) {
  const Result r =
      lab({"threshold", "--domain", "interval", "--bracket", "0.05,1", "--bistol", "0.01", "--h-rule", "eps/8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "bracket not sign-changing");
  EXPECT_EQ(j["eps0"], 1.0);
}

TEST_F(Workdir, BlowupOutputs) {
  const Result r = lab({"blowup", "--domain", "interval", "--eps", "1/128", "--h-rule", "eps/8", "--out",
                        path("b.csv"), "--report", path("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(slurp(path("b.csv")));
  ASSERT_EQ(rows.size(), 41u);
  EXPECT_EQ(rows.back()[0], 5.0);
  const json j = json::parse(slurp(path("b.json")));
  const double beta = j["beta"].get<double>();
  EXPECT_GT(beta, 0.0);
  double worst = 0.0;
  for (const auto& row : rows) {
    EXPECT_NEAR(row[2], beta * (std::exp(-row[0]) - 1 + row[0]), 1e-12);
    worst = std::max(worst, std::abs(row[1] - row[2]));
  }
  EXPECT_NEAR(j["profile_residual"].get<double>(), worst, 1e-12);
  EXPECT_DOUBLE_EQ(j["relative_residual"].get<double>(), worst / beta);
  EXPECT_TRUE(fs::exists(path("b.csv.manifest.json")));
}

TEST(Cli, SweepSingleEpsMatchesSolve) {
  const Result s = lab({"sweep", "--domain", "square", "--eps-list", "1/16", "--h-rule", "eps/8"});
  const Result p = lab({"solve", "--domain", "square", "--eps", "1/16", "--h-rule", "eps/8"});
  ASSERT_EQ(s.code, 0) << s.err;
  ASSERT_EQ(p.code, 0) << p.err;
  const auto rows = csv_rows([&] {
    // is_nonneg is textual; replace it so the row parses as numbers
    std::string t = s.out;
    for (auto pos = t.find(",true,"); pos != std::string::npos; pos = t.find(",true,")) t.replace(pos, 6, ",1,");
    return t;
  }());
  ASSERT_EQ(rows.size(), 1u);
  const json j = json::parse(p.out);
  EXPECT_EQ(rows[0][0], 1.0 / 16);
  EXPECT_EQ(rows[0][1], 1.0 / 128);
  EXPECT_EQ(rows[0][2], j["positivity"]["min"].get<double>());
  EXPECT_EQ(rows[0][6], j["trace"]["m"].get<double>());
  EXPECT_EQ(rows[0][8], j["beta"].get<double>());
  EXPECT_EQ(rows[0][10], j["hopf_c0"].get<double>());
  EXPECT_EQ(rows[0][11], j["collar_mass"].get<double>());
  EXPECT_EQ(rows[0][12], j["conv"]["h1_v"].get<double>());
}

TEST(Cli, SweepRowFailureExitsNumeric) {
  const Result r = lab({"sweep", "--eps-list", "0.5,0.25", "--solver", "cg-jacobi", "--maxit", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("\n0.5,"), std::string::npos);
}

TEST(Cli, SweepRejectsIncreasingList) {
  EXPECT_EQ(lab({"sweep", "--eps-list", "0.1,0.2"}).code, 2);
}

TEST_F(Workdir, ConfigPrecedence) {
  {
    std::ofstream cfg(path("run.cfg"));
    cfg << "# plate settings\n--eps = 0.2\nh = 1/64\nforcing = \"const:2\"\n";
  }
  const Result from_file = lab({"solve", "--config", path("run.cfg")});
  const Result explicit_flags = lab({"solve", "--eps", "0.2", "--h", "1/64", "--forcing", "const:2"});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out, explicit_flags.out);

  // command line beats the file
  const Result override_eps = lab({"solve", "--config", path("run.cfg"), "--eps", "0.1"});
  const Result expected = lab({"solve", "--eps", "0.1", "--h", "1/64", "--forcing", "const:2"});
  ASSERT_EQ(override_eps.code, 0) << override_eps.err;
  EXPECT_EQ(override_eps.out, expected.out);

  // --gamma on the command line suppresses eps from the file
  const Result gamma = lab({"solve", "--config", path("run.cfg"), "--gamma", "100"});
  EXPECT_EQ(gamma.code, 0) << gamma.err;
  EXPECT_EQ(gamma.out, expected.out);

  // built-in default forcing is const:1
  {
    std::ofstream cfg(path("bare.cfg"));
    cfg << "eps=0.2\nh=1/64\n";
  }
  const Result bare = lab({"solve", "--config", path("bare.cfg")});
  const Result one = lab({"solve", "--eps", "0.2", "--h", "1/64", "--forcing", "const:1"});
  EXPECT_EQ(bare.out, one.out);
}

TEST_F(Workdir, ConfigErrors) {
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(path(name)) << body;
    return path(name);
  };
  EXPECT_EQ(lab({"solve", "--config", write("a.cfg", "eps=0.1\nbogus=1\n")}).code, 2);
  EXPECT_EQ(lab({"solve", "--config", write("b.cfg", "eps=0.1\neps=0.2\n")}).code, 2);
  EXPECT_EQ(lab({"solve", "--config", write("c.cfg", "eps 0.1\n")}).code, 2);
  EXPECT_EQ(lab({"solve", "--config", write("d.cfg", "eps=0.1\ngamma=100\n")}).code, 2);
  EXPECT_EQ(lab({"solve", "--config", write("e.cfg", "eps=abc\n")}).code, 2);
  EXPECT_EQ(lab({"solve", "--config", path("missing.cfg")}).code, 2);
}

TEST_F(Workdir, DeterministicOutputs) {
  for (const char* tag : {"1", "2"}) {
    const Result r = lab({"solve", "--domain", "square", "--eps", "1/16", "--h", "1/64", "--forcing",
                          "ball:0.3,0.4:0.1:1", "--out", path(std::string("u") + tag + ".csv"), "--report",
                          path(std::string("r") + tag + ".json")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("u1.csv")), slurp(path("u2.csv")));
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r2.json")));
  const json m = json::parse(slurp(path("r1.json.manifest.json")));
  EXPECT_EQ(m["command"], "solve");
  EXPECT_EQ(m["inputs"]["h"], 1.0 / 64);
  EXPECT_TRUE(m.contains("wall_seconds"));
  EXPECT_TRUE(m.contains("version"));
  EXPECT_EQ(m["workers"], 1);
  EXPECT_FALSE(fs::exists(path("u1.csv.tmp")));
}

TEST_F(Workdir, SweepWorkersRecordedAndIrrelevant) {
  ::setenv("PLATE_LAB_THREADS", "1", 1);
  const Result one = lab({"sweep", "--eps-list", "1/8,1/16,1/32", "--out", path("s1.csv")});
  ::setenv("PLATE_LAB_THREADS", "3", 1);
  const Result three = lab({"sweep", "--eps-list", "1/8,1/16,1/32", "--out", path("s3.csv")});
  ::setenv("PLATE_LAB_THREADS", "zero", 1);
  const Result bad = lab({"sweep", "--eps-list", "1/8"});
  ::unsetenv("PLATE_LAB_THREADS");
  ASSERT_EQ(one.code, 0) << one.err;
  ASSERT_EQ(three.code, 0) << three.err;
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(slurp(path("s1.csv")), slurp(path("s3.csv")));
  EXPECT_EQ(json::parse(slurp(path("s3.csv.manifest.json")))["workers"], 3);
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = PLATE_LAB_EXE;
  const auto status = [&](const std::string& args) {
    const int s = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("exact --model profile --tmax 1 --dt 0.5"), 0);
  EXPECT_EQ(status("solve --h 0.25"), 2);
  EXPECT_EQ(status("solve --eps 0.1 --forcing const:-1"), 2);
}
