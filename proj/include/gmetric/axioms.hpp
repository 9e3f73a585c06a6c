#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmetric/metric.hpp"
#include "gmetric/sampling.hpp"
#include "gmetric/witness.hpp"

namespace gmetric {

/// Pass/fail status of one property over a sample set.
struct PropertyStatus {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::vector<Witness> witnesses;
};

/// Evidence container for sampled axiom checks. Reports over disjoint
/// sample partitions merge associatively: failure dominates and witnesses
/// concatenate.
struct AxiomReport {
  std::vector<PropertyStatus> properties;
  std::size_t samples_used = 0;
  double tolerance = kDefaultTol;

  bool passed() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyStatus& p) { return p.passed; });
  }

  const PropertyStatus& at(std::string_view name) const {
    for (const auto& p : properties) {
      if (p.name == name) return p;
    }
    throw Error(ErrorCode::invalid_argument, "no property named " + std::string(name));
  }

  AxiomReport& merge(const AxiomReport& other) {
    for (const auto& theirs : other.properties) {
      auto it = std::find_if(properties.begin(), properties.end(),
                             [&](const PropertyStatus& p) { return p.name == theirs.name; });
      if (it == properties.end()) {
        properties.push_back(theirs);
        continue;
      }
      it->passed = it->passed && theirs.passed;
      it->checked += theirs.checked;
      it->skipped += theirs.skipped;
      it->worst_excess = std::max(it->worst_excess, theirs.worst_excess);
      it->witnesses.insert(it->witnesses.end(), theirs.witnesses.begin(), theirs.witnesses.end());
    }
    samples_used += other.samples_used;
    tolerance = std::max(tolerance, other.tolerance);
    return *this;
  }
};

/// One checkable property of a ternary function, evaluated per sample.
struct PropertyCheck {
  std::string name;
  std::function<Probe(const GMetric&, const Quad&, double tol)> probe;
};

namespace detail {

inline Probe leq(double lhs, double rhs, double tol, std::string relation, std::vector<Point> pts) {
  const double ex = excess(lhs, rhs, tol);
  if (ex <= 0.0) return Probe::ok(ex);
  return Probe{Probe::Status::violated, ex, Witness{std::move(relation), std::move(pts), lhs, rhs}};
}

inline bool distinct(const Point& a, const Point& b, double tol) { return max_coord_gap(a, b) > tol; }

inline constexpr std::size_t kMaxWitnesses = 4;

}  // namespace detail

/// Runs `checks` over `samples`. Throws EmptySampleSet on an empty span.
inline AxiomReport run_checks(const GMetric& g, std::span<const PropertyCheck> checks,
                              std::span<const Quad> samples, double tol) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "no samples supplied");
  AxiomReport report;
  report.samples_used = samples.size();
  report.tolerance = tol;
  for (const auto& check : checks) {
    PropertyStatus status;
    status.name = check.name;
    for (const auto& q : samples) {
      Probe p = check.probe(g, q, tol);
      if (p.status == Probe::Status::skipped) {
        ++status.skipped;
        continue;
      }
      ++status.checked;
      status.worst_excess = std::max(status.worst_excess, p.excess);
      if (p.status == Probe::Status::violated) {
        status.passed = false;
        if (status.witnesses.size() < detail::kMaxWitnesses) status.witnesses.push_back(std::move(p.witness));
      }
    }
    report.properties.push_back(std::move(status));
  }
  return report;
}

/// The five defining axioms of a G-metric. Strict inequalities are only
/// probed on samples whose points are distinct beyond `tol`.
inline std::vector<PropertyCheck> g_axiom_checks() {
  using detail::leq;
  std::vector<PropertyCheck> checks;
  checks.push_back({"axiom1_identity", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, x, x), 0.0, tol, "G(x,x,x) = 0", {x, y, z, a});
                    }});
  checks.push_back({"axiom2_positivity", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      if (!detail::distinct(x, y, tol)) return Probe::skipped();
                      const double v = g(x, x, y);
                      if (v > 0.0) return Probe::ok(-v);
                      return Probe{Probe::Status::violated, -v,
                                   Witness{"0 < G(x,x,y) for x != y", {x, y, z, a}, 0.0, v}};
                    }});
  checks.push_back({"axiom3_degenerate_bound", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      if (!detail::distinct(z, y, tol)) return Probe::skipped();
                      return leq(g(x, x, y), g(x, y, z), tol, "G(x,x,y) <= G(x,y,z) for z != y",
                                 {x, y, z, a});
                    }});
  checks.push_back({"axiom4_symmetry", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const std::array<double, 6> v{g(x, y, z), g(x, z, y), g(y, x, z),
                                                    g(y, z, x), g(z, x, y), g(z, y, x)};
                      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
                      return leq(*hi, *lo, tol, "G invariant under argument permutations", {x, y, z, a});
                    }});
  checks.push_back({"axiom5_rectangle", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, z), g(x, a, a) + g(a, y, z), tol,
                                 "G(x,y,z) <= G(x,a,a) + G(a,y,z)", {x, y, z, a});
                    }});
  return checks;
}

/// The six consequences every G-metric satisfies.
inline std::vector<PropertyCheck> derived_property_checks() {
  using detail::leq;
  std::vector<PropertyCheck> checks;
  checks.push_back({"derived1_zero_implies_equal", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const double v = g(x, y, z);
                      if (v > tol) return Probe::skipped();
                      const double gap = std::max({max_coord_gap(x, y), max_coord_gap(y, z), max_coord_gap(x, z)});
                      if (gap <= tol) return Probe::ok(gap - tol);
                      return Probe{Probe::Status::violated, gap - tol,
                                   Witness{"G(x,y,z) = 0 implies x = y = z", {x, y, z, a}, gap, 0.0}};
                    }});
  checks.push_back({"derived2", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, z), g(x, x, y) + g(x, x, z), tol,
                                 "G(x,y,z) <= G(x,x,y) + G(x,x,z)", {x, y, z, a});
                    }});
  checks.push_back({"derived3", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, y), 2.0 * g(y, x, x), tol, "G(x,y,y) <= 2 G(y,x,x)", {x, y, z, a});
                    }});
  checks.push_back({"derived4", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, z), g(x, a, z) + g(a, y, z), tol,
                                 "G(x,y,z) <= G(x,a,z) + G(a,y,z)", {x, y, z, a});
                    }});
  checks.push_back({"derived5", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, z), (2.0 / 3.0) * (g(x, y, a) + g(x, a, z) + g(a, y, z)), tol,
                                 "G(x,y,z) <= 2/3 [G(x,y,a) + G(x,a,z) + G(a,y,z)]", {x, y, z, a});
                    }});
  checks.push_back({"derived6", [](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      return leq(g(x, y, z), g(x, a, a) + g(y, a, a) + g(z, a, a), tol,
                                 "G(x,y,z) <= G(x,a,a) + G(y,a,a) + G(z,a,a)", {x, y, z, a});
                    }});
  return checks;
}

/// G <= G_s(d_G) <= 2G and G/2 <= G_m(d_G) <= 2G, where G_s uses the 1/3
/// scale.
inline std::vector<PropertyCheck> sandwich_checks() {
  using detail::leq;
  auto pairwise = [](const GMetric& g, const Point& x, const Point& y, const Point& z) {
    auto dg = [&g](const Point& u, const Point& v) { return g(u, v, v) + g(u, u, v); };
    return std::array<double, 3>{dg(x, y), dg(y, z), dg(x, z)};
  };
  std::vector<PropertyCheck> checks;
  checks.push_back({"sandwich_sum_lower", [pairwise](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const auto d = pairwise(g, x, y, z);
                      return leq(g(x, y, z), (d[0] + d[1] + d[2]) / 3.0, tol, "G <= G_s(d_G)", {x, y, z, a});
                    }});
  checks.push_back({"sandwich_sum_upper", [pairwise](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const auto d = pairwise(g, x, y, z);
                      return leq((d[0] + d[1] + d[2]) / 3.0, 2.0 * g(x, y, z), tol, "G_s(d_G) <= 2G",
                                 {x, y, z, a});
                    }});
  checks.push_back({"sandwich_max_lower", [pairwise](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const auto d = pairwise(g, x, y, z);
                      return leq(0.5 * g(x, y, z), std::max({d[0], d[1], d[2]}), tol, "G/2 <= G_m(d_G)",
                                 {x, y, z, a});
                    }});
  checks.push_back({"sandwich_max_upper", [pairwise](const GMetric& g, const Quad& q, double tol) {
                      const auto& [x, y, z, a] = q;
                      const auto d = pairwise(g, x, y, z);
                      return leq(std::max({d[0], d[1], d[2]}), 2.0 * g(x, y, z), tol, "G_m(d_G) <= 2G",
                                 {x, y, z, a});
                    }});
  return checks;
}

inline AxiomReport check_g_axioms(const GMetric& g, std::span<const Quad> samples, double tol = kDefaultTol) {
  const auto checks = g_axiom_checks();
  return run_checks(g, checks, samples, tol);
}

inline AxiomReport check_derived_properties(const GMetric& g, std::span<const Quad> samples,
                                            double tol = kDefaultTol) {
  const auto checks = derived_property_checks();
  return run_checks(g, checks, samples, tol);
}

inline AxiomReport check_sandwich(const GMetric& g, std::span<const Quad> samples, double tol = kDefaultTol) {
  const auto checks = sandwich_checks();
  return run_checks(g, checks, samples, tol);
}

/// Re-evaluates a witness against the property that produced it. True when
/// the violation reproduces beyond the tolerance.
inline bool replay(const GMetric& g, const PropertyCheck& check, const Witness& w, double tol = kDefaultTol) {
  if (w.points.size() != 4) return false;
  const Quad q{w.points[0], w.points[1], w.points[2], w.points[3]};
  const Probe p = check.probe(g, q, tol);
  return p.status == Probe::Status::violated;
}

struct SymmetryResult {
  bool symmetric = true;
  std::size_t pairs_checked = 0;
  std::optional<Witness> witness;
};

/// Whether G(x,y,y) = G(x,x,y) on every sampled pair (x, y) drawn from the
/// first two slots of the samples. Records the outcome on `g`.
inline SymmetryResult check_symmetric(const GMetric& g, std::span<const Quad> samples, double tol = kDefaultTol) {
  SymmetryResult out;
  for (const auto& q : samples) {
    const Point& x = q[0];
    const Point& y = q[1];
    const double lhs = g(x, y, y);
    const double rhs = g(x, x, y);
    ++out.pairs_checked;
    if (std::abs(lhs - rhs) > scaled_tol(tol, lhs, rhs)) {
      out.symmetric = false;
      out.witness = Witness{"G(x,y,y) = G(x,x,y)", {x, y}, lhs, rhs};
      break;
    }
  }
  g.set_symmetric_flag(out.symmetric);
  return out;
}

/// Tail values of the four equivalent convergence criteria for x_n -> x.
struct ConvergenceEquivalence {
  double metric_distance = 0.0;  // d_G(x_N, x)
  double g_nn_x = 0.0;           // G(x_N, x_N, x)
  double g_n_xx = 0.0;           // G(x_N, x, x)
  double g_mn_x = 0.0;           // G(x_{N-1}, x_N, x)
  bool all_within = false;
  bool all_beyond = false;

  bool agree() const { return all_within || all_beyond; }
};

inline ConvergenceEquivalence check_convergence_equivalence(const GMetric& g, std::span<const Point> seq,
                                                            const Point& x, double tol) {
  if (seq.size() < 3) throw Error(ErrorCode::sequence_too_short, "need at least 3 terms");
  const Point& last = seq.back();
  const Point& prev = seq[seq.size() - 2];
  ConvergenceEquivalence out;
  out.metric_distance = metric_from_g(g)(last, x);
  out.g_nn_x = g(last, last, x);
  out.g_n_xx = g(last, x, x);
  out.g_mn_x = g(prev, last, x);
  const std::array<double, 4> v{out.metric_distance, out.g_nn_x, out.g_n_xx, out.g_mn_x};
  out.all_within = std::all_of(v.begin(), v.end(), [tol](double t) { return t <= tol; });
  out.all_beyond = std::all_of(v.begin(), v.end(), [tol](double t) { return t > tol; });
  return out;
}

}  // namespace gmetric
