#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gmetric/axioms.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/sampling.hpp"

using namespace gmetric;

namespace {

double perimeter_oracle(double x, double y, double z) { return std::abs(x - y) + std::abs(y - z) + std::abs(z - x); }
double max_oracle(double x, double y, double z) {
  return std::max({std::abs(x - y), std::abs(y - z), std::abs(z - x)});
}

std::vector<std::array<double, 3>> random_triples(std::size_t n, double lo, double hi, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::array<double, 3>> out(n);
  for (auto& t : out) t = {u(gen), u(gen), u(gen)};
  return out;
}

/// G(x,y,z) = |x - y|: ignores z, so it is not a G-metric.
GMetric projection_g() {
  return GMetric([](const Point& x, const Point& y, const Point&) { return std::abs(x.x() - y.x()); }, "proj");
}

/// G on {0, 1}: zero on the diagonal, G(0,0,1) = 1, G(0,1,1) = 2 and their
/// permutations.
GMetric two_point_g() {
  return GMetric(
      [](const Point& x, const Point& y, const Point& z) {
        const int ones = static_cast<int>(x.x() + y.x() + z.x() + 0.5);
        if (ones == 0 || ones == 3) return 0.0;
        return ones == 1 ? 1.0 : 2.0;
      },
      "two_point");
}

std::vector<Quad> two_point_quads() {
  std::vector<Quad> out;
  for (int m = 0; m < 16; ++m) {
    out.push_back({Point(double(m & 1)), Point(double((m >> 1) & 1)), Point(double((m >> 2) & 1)),
                   Point(double((m >> 3) & 1))});
  }
  return out;
}

}  // namespace

TEST(SumConstruction, PerimeterExamples) {
  const GMetric g = g_from_metric_sum(Metric::absolute(), 1.0);
  EXPECT_DOUBLE_EQ(g(0.0, 1.0, 2.0), 4.0);
  const GMetric g3 = g_from_metric_sum(Metric::absolute(), 1.0 / 3.0);
  EXPECT_EQ(g3(0.7, 0.7, 0.7), 0.0);
  const double pi = std::numbers::pi;
  EXPECT_NEAR(g(0.0, pi, 2 * pi), perimeter_oracle(0.0, pi, 2 * pi), 1e-15);
  EXPECT_NEAR(g(0.0, pi, 2 * pi), 4 * pi, 1e-14);
}

TEST(SumConstruction, MatchesOracleForEveryScale) {
  for (double scale : {1.0 / 3.0, 1.0, 2.5}) {
    const GMetric g = g_from_metric_sum(Metric::absolute(), scale);
    for (const auto& [x, y, z] : random_triples(2000, -10, 10, 3)) {
      EXPECT_NEAR(g(x, y, z), scale * perimeter_oracle(x, y, z), 1e-12);
    }
  }
}

TEST(SumConstruction, RejectsNonPositiveScale) {
  for (double bad : {0.0, -1.0, std::nan("")}) {
    try {
      g_from_metric_sum(Metric::absolute(), bad);
      FAIL() << "scale " << bad << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    }
  }
}

TEST(MaxConstruction, Examples) {
  const GMetric g = max_g();
  EXPECT_EQ(g(0.0, 1.0, 2.0), 2.0);
  EXPECT_EQ(g(3.0, 3.0, 3.0), 0.0);
  EXPECT_EQ(g(-1.0, 0.0, 1.0), 2.0);
  for (const auto& [x, y, z] : random_triples(2000, -10, 10, 4)) EXPECT_EQ(g(x, y, z), max_oracle(x, y, z));
}

TEST(Constructions, PermutationsAreBitwiseEqual) {
  for (const GMetric& g : {perimeter_g(), g_from_metric_sum(Metric::absolute()), max_g()}) {
    for (const auto& [x, y, z] : random_triples(5000, -10, 10, 5)) {
      const double v = g(x, y, z);
      EXPECT_EQ(v, g(x, z, y));
      EXPECT_EQ(v, g(y, x, z));
      EXPECT_EQ(v, g(y, z, x));
      EXPECT_EQ(v, g(z, x, y));
      EXPECT_EQ(v, g(z, y, x));
    }
  }
}

TEST(Constructions, RejectMixedDimensions) {
  const GMetric g = perimeter_g();
  try {
    g(Point{0.0, 1.0}, Point(0.0), Point(0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
}

TEST(Point, RejectsNonFiniteCoordinates) {
  try {
    Point p(std::numeric_limits<double>::infinity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
  }
  EXPECT_THROW(Point(std::vector<double>{}), Error);
}

TEST(AssociatedMetric, Examples) {
  const Metric dp = metric_from_g(perimeter_g());
  EXPECT_EQ(dp(0.0, 1.0), 4.0);  // G(0,1,1) = 2, G(0,0,1) = 2
  EXPECT_EQ(dp(0.3, 0.3), 0.0);
  const Metric dm = metric_from_g(max_g());
  EXPECT_EQ(dm(0.0, 1.0), 2.0);  // G(0,1,1) = 1, G(0,0,1) = 1
}

TEST(AssociatedMetric, RoundTripThirdScale) {
  const Metric d = metric_from_g(g_from_metric_sum(Metric::absolute(), 1.0 / 3.0));
  for (const auto& [x, y, z] : random_triples(3000, -10, 10, 6)) {
    EXPECT_NEAR(d(x, y), 4.0 / 3.0 * std::abs(x - y), 1e-12 * (1 + std::abs(x - y)));
    EXPECT_EQ(d(x, y), d(y, x));
  }
}

TEST(Axioms, BuiltInConstructionsPass) {
  const auto quads = sample_quads(box1(-5, 5), 1000, 11);
  for (const GMetric& g : {perimeter_g(), max_g(), g_from_metric_sum(Metric::absolute())}) {
    const AxiomReport r = check_g_axioms(g, quads);
    EXPECT_TRUE(r.passed()) << g.name();
    EXPECT_EQ(r.properties.size(), 5u);
    EXPECT_EQ(r.samples_used, 1000u);
    EXPECT_GT(r.at("axiom2_positivity").checked, 0u);
    EXPECT_GT(r.at("axiom3_degenerate_bound").checked, 0u);
  }
}

TEST(Axioms, ExactWithZeroTolerance) {
  const auto quads = sample_quads(box1(-10, 10), 5000, 12);
  for (const GMetric& g : {perimeter_g(), max_g()}) {
    const double eps = 64 * std::numeric_limits<double>::epsilon();
    EXPECT_TRUE(check_g_axioms(g, quads, eps).passed()) << g.name();
  }
}

TEST(Axioms, ProjectionBreaksSymmetryWithReplayableWitness) {
  const GMetric g = projection_g();
  EXPECT_EQ(g(0.0, 1.0, 5.0), 1.0);
  EXPECT_EQ(g(0.0, 5.0, 1.0), 5.0);
  const auto quads = sample_quads(box1(-5, 5), 1000, 13);
  const AxiomReport r = check_g_axioms(g, quads);
  const auto& sym = r.at("axiom4_symmetry");
  ASSERT_FALSE(sym.passed);
  ASSERT_FALSE(sym.witnesses.empty());
  const auto checks = g_axiom_checks();
  for (const auto& w : sym.witnesses) {
    EXPECT_GT(w.lhs - w.rhs, scaled_tol(kDefaultTol, w.lhs, w.rhs));
    EXPECT_TRUE(replay(g, checks[3], w));
  }
}

TEST(Axioms, EveryWitnessReplays) {
  const GMetric g = projection_g();
  const auto quads = sample_quads(box1(-5, 5), 2000, 14);
  const auto checks = g_axiom_checks();
  const AxiomReport r = check_g_axioms(g, quads);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    for (const auto& w : r.properties[i].witnesses) EXPECT_TRUE(replay(g, checks[i], w)) << checks[i].name;
  }
}

TEST(Axioms, EmptySampleSetIsAnError) {
  try {
    check_g_axioms(perimeter_g(), std::span<const Quad>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_sample_set);
  }
}

TEST(Axioms, MergeIsFailDominant) {
  const auto quads = sample_quads(box1(-5, 5), 500, 15);
  AxiomReport good = check_g_axioms(perimeter_g(), quads);
  const AxiomReport bad = check_g_axioms(projection_g(), quads);
  good.merge(bad);
  EXPECT_FALSE(good.passed());
}

TEST(DerivedProperties, HoldForBuiltIns) {
  const auto quads = sample_quads(box1(-10, 10), 5000, 16);
  for (const GMetric& g : {perimeter_g(), max_g(), g_from_metric_sum(Metric::absolute())}) {
    const AxiomReport r = check_derived_properties(g, quads);
    EXPECT_TRUE(r.passed()) << g.name();
    EXPECT_EQ(r.properties.size(), 6u);
  }
}

TEST(DerivedProperties, ProjectionFailsTheFirstTwo) {
  // (1) and (2) fail; (3) G(x,y,y) <= 2G(y,x,x) reads |x-y| <= 2|x-y| and holds.
  const auto quads = sample_quads(box1(-5, 5), 2000, 17);
  const GMetric g = projection_g();
  const AxiomReport r = check_derived_properties(g, quads);
  EXPECT_FALSE(r.at("derived1_zero_implies_equal").passed);
  EXPECT_FALSE(r.at("derived2").passed);
  EXPECT_TRUE(r.at("derived3").passed);
  const auto checks = derived_property_checks();
  for (std::size_t i = 0; i < 2; ++i) {
    for (const auto& w : r.properties[i].witnesses) EXPECT_TRUE(replay(g, checks[i], w));
  }
}

TEST(DerivedProperties, HoldForEveryAxiomPassingTable) {
  const GMetric g = two_point_g();
  const auto quads = two_point_quads();
  ASSERT_TRUE(check_g_axioms(g, quads).passed());
  EXPECT_TRUE(check_derived_properties(g, quads).passed());
}

TEST(Sandwich, MaxUpperBoundFailsWithoutSymmetry) {
  // d_G(0,1) = G(0,1,1) + G(0,0,1) = 3 while 2 G(0,0,1) = 2.
  const GMetric g = two_point_g();
  const AxiomReport r = check_sandwich(g, two_point_quads());
  EXPECT_TRUE(r.at("sandwich_sum_lower").passed);
  EXPECT_TRUE(r.at("sandwich_sum_upper").passed);
  EXPECT_TRUE(r.at("sandwich_max_lower").passed);
  const auto& upper = r.at("sandwich_max_upper");
  ASSERT_FALSE(upper.passed);
  EXPECT_EQ(upper.witnesses.front().lhs, 3.0);
  EXPECT_EQ(upper.witnesses.front().rhs, 2.0);
  EXPECT_TRUE(replay(g, sandwich_checks()[3], upper.witnesses.front()));
}

TEST(Symmetry, MetricConstructionsAreSymmetric) {
  const auto quads = sample_quads(box1(-5, 5), 2000, 18);
  EXPECT_TRUE(check_symmetric(perimeter_g(), quads).symmetric);
  EXPECT_TRUE(check_symmetric(max_g(), quads).symmetric);
}

TEST(Symmetry, CachesTheFlag) {
  const GMetric g = max_g();
  EXPECT_FALSE(g.symmetric_flag().has_value());
  check_symmetric(g, sample_quads(box1(-1, 1), 50, 1));
  ASSERT_TRUE(g.symmetric_flag().has_value());
  EXPECT_TRUE(*g.symmetric_flag());
}

TEST(Symmetry, WeightedSumOfDistancesIsNotAGMetric) {
  // d(x,y) + 2d(y,z) + d(z,x): G(0,1,1) = 2 but G(1,0,1) = 3, so axiom (4)
  // fails before symmetry is even meaningful.
  const GMetric g([](const Point& x, const Point& y, const Point& z) {
    return std::abs(x.x() - y.x()) + 2 * std::abs(y.x() - z.x()) + std::abs(z.x() - x.x());
  }, "weighted");
  EXPECT_EQ(g(0.0, 1.0, 1.0), 2.0);
  EXPECT_EQ(g(1.0, 0.0, 1.0), 3.0);
  EXPECT_FALSE(check_g_axioms(g, sample_quads(box1(-1, 1), 500, 19)).at("axiom4_symmetry").passed);
}

TEST(Symmetry, TwoPointTableIsAValidAsymmetricGMetric) {
  const GMetric g = two_point_g();
  const auto quads = two_point_quads();
  EXPECT_TRUE(check_g_axioms(g, quads, 0.0).passed());
  const SymmetryResult s = check_symmetric(g, quads);
  EXPECT_FALSE(s.symmetric);
  ASSERT_TRUE(s.witness.has_value());
  EXPECT_NE(g(s.witness->points[0], s.witness->points[1], s.witness->points[1]),
            g(s.witness->points[0], s.witness->points[0], s.witness->points[1]));
}

TEST(Sandwich, HandComputedTriple) {
  // G = 4, d_G pairs (4, 4, 8), G_s(d_G) = 16/3, G_m(d_G) = 8.
  const GMetric g = perimeter_g();
  const Quad q{Point(0.0), Point(1.0), Point(2.0), Point(0.0)};
  const Metric d = metric_from_g(g);
  EXPECT_EQ(d(0.0, 1.0), 4.0);
  EXPECT_EQ(d(1.0, 2.0), 4.0);
  EXPECT_EQ(d(0.0, 2.0), 8.0);
  const double gs = (4.0 + 4.0 + 8.0) / 3.0;
  EXPECT_LE(4.0, gs);
  EXPECT_LE(gs, 8.0);
  const std::array<Quad, 1> one{q};
  EXPECT_TRUE(check_sandwich(g, one).passed());
}

TEST(Sandwich, HoldsForBuiltIns) {
  const auto quads = sample_quads(box1(-10, 10), 5000, 20);
  for (const GMetric& g : {perimeter_g(), max_g(), g_from_metric_sum(Metric::absolute())}) {
    const AxiomReport r = check_sandwich(g, quads);
    EXPECT_TRUE(r.passed()) << g.name();
    EXPECT_EQ(r.properties.size(), 4u);
  }
}

TEST(Sandwich, OracleBoundsOnRandomTriples) {
  const GMetric g = perimeter_g();
  for (const auto& [x, y, z] : random_triples(2000, -10, 10, 21)) {
    const double G = perimeter_oracle(x, y, z);
    const double gs = (4 * std::abs(x - y) + 4 * std::abs(y - z) + 4 * std::abs(z - x)) / 3.0;
    EXPECT_NEAR(g(x, y, z), G, 1e-12);
    EXPECT_LE(G, gs + 1e-9);
    EXPECT_LE(gs, 2 * G + 1e-9);
  }
}

TEST(ConvergenceEquivalence, HarmonicSequenceConverges) {
  std::vector<Point> seq;
  for (int n = 1; n <= 10000; ++n) seq.emplace_back(1.0 / n);
  const auto r = check_convergence_equivalence(perimeter_g(), seq, Point(0.0), 1e-3);
  EXPECT_TRUE(r.all_within);
  EXPECT_TRUE(r.agree());
  EXPECT_NEAR(r.metric_distance, 4e-4, 1e-12);
}

TEST(ConvergenceEquivalence, ConstantSequenceIsZero) {
  const std::vector<Point> seq(10, Point(2.5));
  const auto r = check_convergence_equivalence(perimeter_g(), seq, Point(2.5), 1e-12);
  EXPECT_EQ(r.metric_distance, 0.0);
  EXPECT_EQ(r.g_nn_x, 0.0);
  EXPECT_EQ(r.g_n_xx, 0.0);
  EXPECT_EQ(r.g_mn_x, 0.0);
  EXPECT_TRUE(r.agree());
}

TEST(ConvergenceEquivalence, AlternatingSequenceAgreesOnDivergence) {
  std::vector<Point> seq;
  for (int n = 0; n < 100; ++n) seq.emplace_back(n % 2 ? -1.0 : 1.0);
  const auto r = check_convergence_equivalence(max_g(), seq, Point(0.0), 1e-3);
  EXPECT_TRUE(r.all_beyond);
  EXPECT_TRUE(r.agree());
}

TEST(ConvergenceEquivalence, ShortSequenceIsAnError) {
  const std::vector<Point> seq{Point(1.0), Point(0.5)};
  try {
    check_convergence_equivalence(perimeter_g(), seq, Point(0.0), 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::sequence_too_short);
  }
}

TEST(Sampling, QuadsAreDeterministicAndPrefixStable) {
  const auto a = sample_quads(box1(-1, 1), 100, 9);
  const auto b = sample_quads(box1(-1, 1), 200, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(sample_quads(box1(-1, 1), 100, 10), a);
}
