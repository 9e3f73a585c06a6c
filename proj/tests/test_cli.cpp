#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int rc;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(GMETRIC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string scenario(const char* file) { return std::string(GMETRIC_SCENARIO_DIR) + "/" + file; }

}  // namespace

TEST(Cli, ListBuiltins) {
  const auto r = cli("list-builtins");
  EXPECT_EQ(r.rc, 0);
  for (const char* n : {"affine_13", "semi_max_half", "semi_max_sine", "semi_trivial", "sine_34", "sine_56"}) {
    EXPECT_NE(r.out.find(n), std::string::npos) << n;
  }
}

TEST(Cli, SuccessExitsZero) {
  const auto r = cli("run sine_34 --budget 20000");
  EXPECT_EQ(r.rc, 0);
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* key : {"scenario", "certificates", "distance", "orbit", "convergence", "expected_check"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_TRUE(doc["expected_check"]["passed"].get<bool>());
}

TEST(Cli, ScenarioFileMatchesBuiltin) {
  const auto file = nlohmann::json::parse(cli("certify " + scenario("sine_34.scn") + " --budget 20000").out);
  const auto builtin = nlohmann::json::parse(cli("certify sine_34 --budget 20000").out);
  EXPECT_EQ(file["certificates"], builtin["certificates"]);
}

TEST(Cli, CertificationFailureExitsOne) {
  EXPECT_EQ(cli("run " + scenario("identity_fail.scn") + " --budget 20000").rc, 1);
  EXPECT_EQ(cli("certify " + scenario("identity_fail.scn") + " --budget 20000").rc, 1);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(cli("run " + scenario("malformed.scn")).rc, 2);
  EXPECT_EQ(cli("run /nonexistent.scn").rc, 2);
  EXPECT_EQ(cli("run sine_34 --tol -1").rc, 2);
  EXPECT_EQ(cli("frobnicate").rc, 2);
  EXPECT_EQ(cli("iterate affine_13").rc, 2);  // iteration disabled
}

TEST(Cli, NumericFailureExitsThree) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "gmetric_cli_test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "escape.scn";
  std::ofstream(file) << "[regions]\nA = [0, 1]\nB = [0, 2]\nC = [0, 3]\n[maps]\nT = x + 5\nS = x\nK = x\n";
  EXPECT_EQ(cli("iterate " + file.string()).rc, 3);
}

TEST(Cli, SubcommandsRun) {
  EXPECT_EQ(cli("check-axioms sine_34 --budget 20000").rc, 0);
  const auto d = cli("distance affine_13 --budget 20000");
  EXPECT_EQ(d.rc, 0);
  EXPECT_NEAR(nlohmann::json::parse(d.out)["distance"]["value"].get<double>(), 4 * 3.14159265358979323846, 1e-9);
  EXPECT_EQ(cli("iterate sine_56 --x0 0.5 --max-steps 120").rc, 0);
}

TEST(Cli, DeterministicReports) {
  EXPECT_EQ(cli("run sine_34 --seed 7 --budget 20000").out, cli("run sine_34 --seed 7 --budget 20000").out);
}

TEST(Cli, ExportTracesCsv) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "gmetric_traces_test";
  std::filesystem::remove_all(dir);
  EXPECT_EQ(cli("export-traces sine_34 --format csv --out " + dir.string()).rc, 0);
  std::ifstream f(dir / "sine_34_t_collapse.csv");
  ASSERT_TRUE(f.good());
  std::string header, first;
  std::getline(f, header);
  std::getline(f, first);
  EXPECT_EQ(header, "index,value");
  EXPECT_EQ(first.rfind("0,", 0), 0u);
  EXPECT_EQ(cli("export-traces sine_34 --format json --out " + dir.string()).rc, 0);
  std::ifstream j(dir / "sine_34_traces.json");
  ASSERT_TRUE(j.good());
  const auto traces = nlohmann::json::parse(j);
  EXPECT_TRUE(traces.contains("k_distance"));
}
