#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "gmetric/report.hpp"
#include "gmetric/scenario.hpp"

using namespace gmetric;

namespace {

const char* kMinimal = R"([regions]
A = [0, 1]
B = [0, 2]
C = [0, 3]

[maps]
T = 0.25*sin(x)
S = 0.5*sin(x)
K = x
)";

ErrorCode code_of(const std::string& text) {
  try {
    parse_scenario(text, "t");
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::invalid_argument;
}

RunOptions fast() {
  RunOptions o;
  o.budget = 20000;
  return o;
}

}  // namespace

TEST(Scenario, BuiltinsParse) {
  const auto names = builtin_names();
  EXPECT_EQ(names.size(), 6u);
  for (const auto& n : names) {
    const Scenario s = builtin_scenario(n);
    EXPECT_EQ(s.name, n);
    EXPECT_TRUE(s.expected.has_value());
  }
  EXPECT_THROW(builtin_scenario("nope"), Error);
}

TEST(Scenario, MinimalFileUsesDefaults) {
  const Scenario s = parse_scenario(kMinimal, "mini");
  EXPECT_EQ(s.g_kind, "sum");
  EXPECT_EQ(s.scale, 1.0);
  EXPECT_TRUE(s.orbit.enabled);
  EXPECT_EQ(s.orbit.max_steps, 200u);
  EXPECT_EQ(s.x0(), 1.0);
  EXPECT_FALSE(s.expected.has_value());
  EXPECT_DOUBLE_EQ(s.map(MapLabel::T)(Point(1.0), Role::A).x(), 0.25 * std::sin(1.0));
}

TEST(Scenario, RegionSyntax) {
  std::string text = kMinimal;
  text.replace(text.find("A = [0, 1]"), 10, "A = [0, 1], [2*pi, 7]");
  text.replace(text.find("B = [0, 2]"), 10, "B = {0, 1/2, pi}");
  text.replace(text.find("C = [0, 3]"), 10, "C = lattice(pi, 3*pi, 1, 4)");
  const Regions r = parse_scenario(text, "r").regions();
  EXPECT_TRUE(r.a.contains(Point(6.5)));
  EXPECT_FALSE(r.a.contains(Point(3.0)));
  EXPECT_TRUE(r.b.contains(Point(0.5)));
  EXPECT_FALSE(r.b.contains(Point(0.25)));
  EXPECT_TRUE(r.c.contains(Point(4 * std::numbers::pi)));
  EXPECT_FALSE(r.c.contains(Point(std::numbers::pi)));
}

TEST(Scenario, ValidationErrors) {
  std::string no_c = kMinimal;
  no_c.erase(no_c.find("C = [0, 3]"), 11);
  EXPECT_EQ(code_of(no_c), ErrorCode::validation_error);
  std::string no_k = kMinimal;
  no_k.erase(no_k.find("K = x"), 6);
  EXPECT_EQ(code_of(no_k), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[space]\ng = avg\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[space]\ng = max\nscale = 2\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[space]\ndimension = 2\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[orbit]\nx0 = 5\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[orbit]\nmax_steps = 2\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[expected]\nr = 0.5\n"), ErrorCode::validation_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[expected]\nkind = fast\n"), ErrorCode::validation_error);
  std::string reversed = kMinimal;
  reversed.replace(reversed.find("[0, 1]"), 6, "[1, 0]");
  EXPECT_EQ(code_of(reversed), ErrorCode::validation_error);
  std::string var_bound = kMinimal;
  var_bound.replace(var_bound.find("[0, 1]"), 6, "[0, x]");
  EXPECT_EQ(code_of(var_bound), ErrorCode::validation_error);
}

TEST(Scenario, UnknownKeyIsAValidationError) {
  EXPECT_EQ(code_of(std::string(kMinimal) + "[orbit]\nspeed = 3\n"), ErrorCode::validation_error);
}

TEST(Scenario, ParseErrors) {
  EXPECT_EQ(code_of(std::string(kMinimal) + "[extras]\n"), ErrorCode::parse_error);
  EXPECT_EQ(code_of(std::string(kMinimal) + "[maps]\n"), ErrorCode::parse_error);
  EXPECT_EQ(code_of("A = [0, 1]\n"), ErrorCode::parse_error);
  EXPECT_EQ(code_of("[regions]\nA [0, 1]\n"), ErrorCode::parse_error);
  EXPECT_EQ(code_of("[regions]\nA = [0, 1]\nA = [0, 2]\n"), ErrorCode::parse_error);
  std::string bad_map = kMinimal;
  bad_map.replace(bad_map.find("K = x"), 5, "K = 0.25*sin(");
  EXPECT_EQ(code_of(bad_map), ErrorCode::parse_error);
  EXPECT_THROW(load_scenario("/nonexistent/file.scn"), Error);
}

TEST(Scenario, TextRoundTrip) {
  for (const auto& n : builtin_names()) {
    const Scenario s = builtin_scenario(n);
    const Scenario t = parse_scenario(to_text(s), n);
    EXPECT_EQ(t.g_kind, s.g_kind);
    EXPECT_EQ(t.scale, s.scale);
    EXPECT_EQ(t.region_text, s.region_text);
    EXPECT_EQ(t.maps, s.maps);
    EXPECT_EQ(t.orbit.enabled, s.orbit.enabled);
    EXPECT_EQ(t.orbit.x0, s.orbit.x0);
    EXPECT_EQ(t.orbit.max_steps, s.orbit.max_steps);
    ASSERT_TRUE(t.expected.has_value());
    EXPECT_EQ(t.expected->kind, s.expected->kind);
    EXPECT_EQ(t.expected->r, s.expected->r);
    EXPECT_EQ(t.expected->gabc, s.expected->gabc);
    EXPECT_EQ(t.expected->p, s.expected->p);
    EXPECT_EQ(t.expected->c, s.expected->c);
    EXPECT_EQ(to_text(t), to_text(s));
  }
}

TEST(Report, DeterministicForSeed) {
  const Scenario s = builtin_scenario("sine_34");
  EXPECT_EQ(run_scenario(s, fast()).dump(), run_scenario(s, fast()).dump());
  RunOptions other = fast();
  other.seed = 1;
  EXPECT_NE(run_scenario(s, other).dump(), run_scenario(s, fast()).dump());
}

TEST(Report, JsonRoundTrip) {
  const auto rep = run_scenario(builtin_scenario("sine_56"), fast());
  const std::string text = rep.dump();
  const json back = json::parse(text);
  EXPECT_EQ(back, rep.doc);
  EXPECT_EQ(back.dump(2), text);
  for (const char* key : {"scenario", "seed", "tolerance", "budget", "certificates", "distance", "orbit",
                          "convergence", "expected_check", "certified"}) {
    EXPECT_TRUE(back.contains(key)) << key;
  }
  EXPECT_FALSE(back.contains("wall_time_ms"));
  RunOptions timed = fast();
  timed.timing = true;
  EXPECT_TRUE(run_scenario(builtin_scenario("sine_56"), timed).doc.contains("wall_time_ms"));
}

TEST(Report, ExpectedBlocks) {
  for (const char* n : {"sine_34", "sine_56", "affine_13", "semi_trivial"}) {
    const auto rep = run_scenario(builtin_scenario(n), fast());
    ASSERT_TRUE(rep.expected_passed.has_value()) << n;
    EXPECT_TRUE(*rep.expected_passed) << n << "\n" << rep.doc["expected_check"].dump(2);
    EXPECT_FALSE(rep.failure.has_value()) << n;
  }
}

// The semi-contraction constant of the max examples reaches 1, so only r fails.
TEST(Report, MaxExamplesFailOnlyOnR) {
  for (const char* n : {"semi_max_half", "semi_max_sine"}) {
    const auto rep = run_scenario(builtin_scenario(n), fast());
    ASSERT_TRUE(rep.expected_passed.has_value());
    EXPECT_FALSE(*rep.expected_passed);
    for (const auto& c : rep.doc["expected_check"]["checks"]) {
      EXPECT_EQ(c["passed"].get<bool>(), c["name"] != "r") << n << " " << c.dump();
    }
  }
}

TEST(Report, SineScenarioDetails) {
  const auto rep = run_scenario(builtin_scenario("sine_34"), fast());
  const json& d = rep.doc;
  EXPECT_TRUE(rep.certified);
  EXPECT_TRUE(d["certificates"]["g_axioms"]["passed"].get<bool>());
  EXPECT_TRUE(d["certificates"]["g_symmetric"].get<bool>());
  EXPECT_TRUE(d["certificates"]["role"]["passed"].get<bool>());
  EXPECT_TRUE(d["certificates"]["commuting"]["passed"].get<bool>());
  EXPECT_TRUE(d["certificates"]["inclusion_chain"]["passed"].get<bool>());
  EXPECT_EQ(d["distance"]["value"].get<double>(), 0.0);
  EXPECT_EQ(d["convergence"]["status"], "converged");
  EXPECT_LE(d["certificates"]["contraction"]["constant"].get<double>(), 0.75);
}

TEST(Report, StageErrorIsRecorded) {
  std::string text = kMinimal;
  text.replace(text.find("T = 0.25*sin(x)"), 15, "T = x + 5");
  const auto rep = run_scenario(parse_scenario(text, "bad"), fast());
  ASSERT_TRUE(rep.failure_code.has_value());
  EXPECT_EQ(*rep.failure_code, ErrorCode::inverse_solve_failed);
  EXPECT_EQ(rep.doc["failure"]["stage"], "orbit");
  EXPECT_FALSE(rep.doc["certificates"]["inclusion_chain"]["passed"].get<bool>());
}

TEST(Report, TraceCsv) {
  EXPECT_EQ(trace_csv({1.5, 0.25}), "index,value\n0,1.5\n1,0.25\n");
  EXPECT_EQ(trace_csv({}), "index,value\n");
}
