#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gmetric/expr.hpp"
#include "gmetric/sampling.hpp"

using namespace gmetric;

namespace {

double ev(const char* text, double x, std::optional<Role> r = std::nullopt) { return eval_expr(parse_expr(text), x, r); }

std::size_t syntax_offset(const char* text) {
  try {
    parse_expr(text);
  } catch (const SyntaxError& e) {
    return e.offset();
  }
  return std::string::npos;
}

/// Random well-formed tree with non-negative literals.
Expr random_expr(Rng& rng, int depth) {
  using K = Expr::Kind;
  if (depth == 0 || rng.unit() < 0.2) {
    const double u = rng.unit();
    if (u < 0.4) return Expr::var();
    if (u < 0.5) return Expr{K::pi, 0.0, {}, {}};
    return Expr::num(std::round(rng.uniform(0, 100) * 1000) / 1000 * (rng.unit() < 0.1 ? 1e-7 : 1.0));
  }
  static constexpr K kBinary[] = {K::add, K::sub, K::mul, K::div, K::min, K::max};
  static constexpr K kUnary[] = {K::neg, K::sin, K::cos, K::abs};
  if (rng.unit() < 0.6) return Expr::binary(kBinary[rng.below(6)], random_expr(rng, depth - 1), random_expr(rng, depth - 1));
  return Expr::unary(kUnary[rng.below(4)], random_expr(rng, depth - 1));
}

}  // namespace

TEST(Expr, Arithmetic) {
  EXPECT_DOUBLE_EQ(ev("1 + 2 * 3", 0), 7.0);
  EXPECT_DOUBLE_EQ(ev("(1 + 2) * 3", 0), 9.0);
  EXPECT_DOUBLE_EQ(ev("8 / 4 / 2", 0), 1.0);
  EXPECT_DOUBLE_EQ(ev("5 - 3 - 1", 0), 1.0);
  EXPECT_DOUBLE_EQ(ev("-x * 2", 3), -6.0);
  EXPECT_DOUBLE_EQ(ev("--x", 3), 3.0);
  EXPECT_DOUBLE_EQ(ev("2*x + pi", 1), 2 + std::numbers::pi);
  EXPECT_DOUBLE_EQ(ev("1e-3 * x", 2), 2e-3);
  EXPECT_DOUBLE_EQ(ev(".5*x", 2), 1.0);
  EXPECT_DOUBLE_EQ(ev("5/6", 0), 5.0 / 6.0);
}

TEST(Expr, Functions) {
  EXPECT_DOUBLE_EQ(ev("0.25*sin(x)", 1), 0.25 * std::sin(1.0));
  EXPECT_DOUBLE_EQ(ev("cos(x)", 0), 1.0);
  EXPECT_DOUBLE_EQ(ev("abs(x - 4)", 1), 3.0);
  EXPECT_DOUBLE_EQ(ev("min(x, 2)", 5), 2.0);
  EXPECT_DOUBLE_EQ(ev("max(x, 2*x)", -1), -1.0);
}

TEST(Expr, Piecewise) {
  const char* text = "on A,B: x; else: 0";
  EXPECT_DOUBLE_EQ(ev(text, 2, Role::A), 2.0);
  EXPECT_DOUBLE_EQ(ev(text, 2, Role::B), 2.0);
  EXPECT_DOUBLE_EQ(ev(text, 2, Role::C), 0.0);
  EXPECT_DOUBLE_EQ(ev(text, 2), 0.0);
  EXPECT_DOUBLE_EQ(ev("on C: 0.25*x; else: 0;", 2, Role::C), 0.5);
  EXPECT_DOUBLE_EQ(ev("on A: 1; on A: 2", 0, Role::A), 1.0);  // first match wins
}

TEST(Expr, UnboundRegionLabel) {
  try {
    ev("on A: x", 1, Role::B);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unbound_region_label);
  }
  EXPECT_THROW(ev("on A: x", 1), Error);
}

TEST(Expr, DivisionByZero) {
  try {
    ev("1 / (x - 1)", 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::division_by_zero);
  }
  EXPECT_DOUBLE_EQ(ev("1 / (x - 1)", 2), 1.0);
}

TEST(Expr, SyntaxErrorOffsets) {
  EXPECT_EQ(syntax_offset("0.25*sin("), 9u);
  EXPECT_EQ(syntax_offset("x +"), 3u);
  EXPECT_EQ(syntax_offset("x $ 1"), 2u);
  EXPECT_EQ(syntax_offset("y"), 0u);
  EXPECT_EQ(syntax_offset("min(x 1)"), 6u);
  EXPECT_EQ(syntax_offset("on D: x"), 3u);
  EXPECT_EQ(syntax_offset("else: 0; on A: x"), 9u);
  EXPECT_EQ(syntax_offset("   "), 3u);
  EXPECT_EQ(syntax_offset("sin(x)"), std::string::npos);
}

TEST(Expr, SyntaxErrorListsExpectedTokens) {
  try {
    parse_expr("min(x 1)");
    FAIL();
  } catch (const SyntaxError& e) {
    ASSERT_EQ(e.expected().size(), 1u);
    EXPECT_EQ(e.expected()[0], ",");
    EXPECT_EQ(e.code(), ErrorCode::syntax_error);
  }
}

TEST(Expr, PrinterExamples) {
  EXPECT_EQ(to_string(parse_expr("(1 + 2) * x")), "(1 + 2) * x");
  EXPECT_EQ(to_string(parse_expr("1 - (2 - x)")), "1 - (2 - x)");
  EXPECT_EQ(to_string(parse_expr("1 - 2 - x")), "1 - 2 - x");
  EXPECT_EQ(to_string(parse_expr("-(x + 1)")), "-(x + 1)");
  EXPECT_EQ(to_string(parse_expr("on A,B: x;else:0")), "on A,B: x; else: 0");
}

// parse(print(e)) == e for generated trees.
TEST(Expr, RoundTrip) {
  Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_expr(rng, 5);
    const std::string text = to_string(e);
    EXPECT_EQ(parse_expr(text), e) << text;
  }
}

TEST(Expr, PiecewiseRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    Expr e;
    e.kind = Expr::Kind::piecewise;
    e.branches.push_back({{Role::A, Role::C}, {random_expr(rng, 3)}});
    e.branches.push_back({{Role::B}, {random_expr(rng, 3)}});
    e.branches.push_back({{}, {random_expr(rng, 3)}});
    EXPECT_EQ(parse_expr(to_string(e)), e) << to_string(e);
  }
}

TEST(Expr, AstShapes) {
  using K = Expr::Kind;
  const Expr e = parse_expr("0.25*sin(x)");
  EXPECT_EQ(e, Expr::binary(K::mul, Expr::num(0.25), Expr::unary(K::sin, Expr::var())));
  EXPECT_EQ(eval_expr(e, 0.0), 0.0);
  const Expr p = parse_expr("on C: 0.25*x; else: 0");
  ASSERT_EQ(p.kind, K::piecewise);
  ASSERT_EQ(p.branches.size(), 2u);
  EXPECT_EQ(p.branches[0].labels, std::vector<Role>{Role::C});
  EXPECT_TRUE(p.branches[1].labels.empty());
  EXPECT_DOUBLE_EQ(eval_expr(p, 0.5, Role::C), 0.125);
  EXPECT_EQ(eval_expr(p, 0.5, Role::A), 0.0);
}
