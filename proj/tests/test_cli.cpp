#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("votedyn_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" VOTEDYN_CLI_PATH "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir_ / "stdout.txt");
    r.err = slurp(dir_ / "stderr.txt");
    return r;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

int count_lines_starting(const std::string& text, char c) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) n += (!line.empty() && line[0] == c) ? 1 : 0;
  return n;
}

TEST_F(Cli, GenerateWritesHeader) {
  const CliResult r = run("generate --n 100 --p 0.3 --q 0.1 --seed 1 -o g.txt");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path("g.txt")));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sbm 100 0.3 0.1 1");
  const Json summary = Json::parse(r.out);
  EXPECT_TRUE(summary.contains("connected"));
}

TEST_F(Cli, GenerateRejectsQAboveP) {
  const CliResult r = run("generate --n 100 --p 0.3 --q 0.5");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("q must not exceed p"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateFromConsensus) {
  const CliResult r = run("simulate --n 50 --p 0.3 --r 0.5 --init exact_counts:50,50 --seed 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines_starting(r.out, '0'), 1);
  EXPECT_NE(r.out.find("# status=consensus opinion=1 t_cons=0"), std::string::npos) << r.out;
}

TEST_F(Cli, SimulateReachesConsensus) {
  const CliResult r = run("simulate --n 500 --p 0.3 --r 0.3 --rule bo3 --init biased_global:0.2 --seed 42 -o traj.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(path("traj.csv"));
  EXPECT_EQ(csv.rfind("t,alpha1,alpha2,delta1,delta2\n", 0), 0U);
  const std::size_t pos = csv.find("t_cons=");
  ASSERT_NE(pos, std::string::npos) << csv.substr(csv.size() - 200);
  EXPECT_LT(std::stoi(csv.substr(pos + 7)), 60);
}

TEST_F(Cli, SimulateFromSavedGraph) {
  ASSERT_EQ(run("generate --n 40 --p 0.4 --q 0.1 --seed 2 -o g.txt").code, 0);
  const CliResult r = run("simulate --graph g.txt --rule bo2 --seed 5 --path probability");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run("simulate --graph g.txt --n 10").code, 2);
  EXPECT_EQ(run("simulate --graph missing.txt").code, 1);
  EXPECT_EQ(run("simulate --n 10 --p 0.3 --rule bo4").code, 2);
}

TEST_F(Cli, AnalyzeBelowBirthOfAxisPoint) {
  const CliResult r = run("analyze --model bo3 --r 0.25");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  int existing = 0;
  for (const auto& fp : j["fixed_points"]) existing += fp["exists"].get<bool>() ? 1 : 0;
  EXPECT_EQ(existing, 2);
  EXPECT_TRUE(j["fixed_points"][0]["exists"].get<bool>());
  EXPECT_TRUE(j["fixed_points"][3]["exists"].get<bool>());
}

TEST_F(Cli, AnalyzeWeakCoupling) {
  const CliResult r = run("analyze --model bo3 --u 0.8 --orbit orbit.csv --orbit-steps 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  for (const auto& fp : j["fixed_points"]) EXPECT_TRUE(fp["exists"].get<bool>());
  EXPECT_EQ(j["fixed_points"][1]["class"], "sink");
  EXPECT_EQ(count_lines_starting(slurp(path("orbit.csv")), '#'), 1);
}

TEST_F(Cli, AnalyzeRejectsBadParameters) {
  EXPECT_EQ(run("analyze --u 1.5").code, 2);
  EXPECT_EQ(run("analyze --u 0.5 --r 0.2").code, 2);
  EXPECT_EQ(run("analyze --model best-of-5 --u 0.5").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
}

TEST_F(Cli, VectorFieldMarkers) {
  CliResult r = run("vector-field --model bo3 --r 0.1111111111111111 -o weak.svg");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("sinks=2"), std::string::npos) << r.err;
  r = run("vector-field --model bo3 --r 0.16666666666666666 -o strong.svg");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("sinks=0"), std::string::npos) << r.err;
  r = run("vector-field --model bo3 --r 0.25 --step 1.0");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("arrows=4"), std::string::npos) << r.err;
  EXPECT_EQ(r.out.rfind("<?xml", 0), 0U);
  EXPECT_NE(r.out.find("</svg>"), std::string::npos);
  EXPECT_EQ(run("vector-field --r 0.25 --step 0").code, 2);
}

TEST_F(Cli, SweepWritesOneCsvWithTwoBlocks) {
  std::ofstream(path("sweep.json")) << R"({"model":"bo3","n":100,"p":0.3,"trials":2,"max_steps":100,)"
                                    << R"("r_grid":[0.05,0.25],"id":"sw"})";
  const CliResult r = run("sweep --config sweep.json --out-dir out");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(path("out/sw.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("model,n,p,q,r,", 0), 0U);
  int low = 0, high = 0;
  while (std::getline(csv, line)) {
    low += line.find(",0.05,") != std::string::npos ? 1 : 0;
    high += line.find(",0.25,") != std::string::npos ? 1 : 0;
  }
  EXPECT_EQ(low, 2);
  EXPECT_EQ(high, 2);
  const Json j = Json::parse(slurp(path("out/sw.json")));
  EXPECT_EQ(j["experiment"], "sweep");
}

TEST_F(Cli, ConfigErrors) {
  EXPECT_EQ(run("sweep --config nope.json").code, 1);
  std::ofstream(path("bad.json")) << R"({"trials":-1})";
  const CliResult r = run("sweep --config bad.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("$.trials"), std::string::npos) << r.err;
  std::ofstream(path("broken.json")) << "{";
  EXPECT_EQ(run("sweep --config broken.json").code, 2);
}

TEST_F(Cli, GoodnessSmallGraph) {
  const CliResult r = run("goodness --n 20 --p 0.5 --r 0.4 --samples 5 --id g");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(slurp(path("g.json")));
  ASSERT_EQ(j["results"].size(), 1U);
  EXPECT_EQ(j["results"][0]["n"], 20);
}

TEST_F(Cli, HarnessSubcommandsRun) {
  const std::string common = " --n 100 --p 0.3 --trials 2 --max-steps 200 --seed 9";
  EXPECT_EQ(run("sink-persist --r 0.05 --horizon 50 --id sp" + common).code, 0);
  EXPECT_EQ(run("sink-persist --r 0.3 --id sp2" + common).code, 2);
  EXPECT_EQ(run("escape --r 0.3 --init half_half --id es" + common).code, 0);
  EXPECT_EQ(run("worst-case --r 0.3 --id wc" + common).code, 0);
  EXPECT_EQ(run("deviation --r 0.3 --t-max 5 --id dv" + common).code, 0);
  EXPECT_EQ(run("scaling --r 0.3 --id sc" + common).code, 0);
  for (const char* f : {"sp.json", "es.json", "wc.json", "wc.csv", "dv.json", "sc.json"}) {
    EXPECT_TRUE(fs::exists(path(f))) << f;
  }
}

}  // namespace
