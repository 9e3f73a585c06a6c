#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmetric/error.hpp"
#include "gmetric/mapping.hpp"
#include "gmetric/sampling.hpp"
#include "gmetric/solve.hpp"

namespace gmetric {

/// Region tag of the n-th iterate: A, C, B, A, C, B, ...
inline Role orbit_tag(std::size_t n) {
  static constexpr Role kCycle[] = {Role::A, Role::C, Role::B};
  return kCycle[n % 3];
}

/// Iterates x_0, x_1, ... of T x_n = S x_{n+1} = K x_{n+2}.
///
/// x_1 solves S(x_1) = T(x_0); every later x_{n+2} solves K(x_{n+2}) = T(x_n).
/// `residuals[n]` is the residual of the equation that produced x_n and
/// `relation_gaps[n]` is d_G(S x_{n+1}, T x_n), which is only solved for at
/// n = 0 and is reported, not enforced, afterwards.
struct Orbit {
  std::vector<Point> points;
  std::vector<Role> tags;
  std::vector<double> residuals;
  std::vector<double> relation_gaps;
  std::map<std::string, std::vector<double>> traces;

  std::size_t size() const { return points.size(); }
  std::size_t complete_triples() const { return points.size() / 3; }
};

inline double d_g(const GMetric& g, const Point& x, const Point& y) { return g(x, y, y) + g(x, x, y); }

/// Solves for (x_{n+1}, x_{n+2}) from x_n: S(x_{n+1}) = T(x_n) and
/// K(x_{n+2}) = T(x_n). Ties among several solutions go to the one nearest
/// the matching anchor (the previous iterate of the same phase).
inline std::pair<Point, Point> orbit_step(const RlnTriple& tr, const Point& xn, Role phase, const SolveConfig& cfg,
                                          const Point& anchor1, const Point& anchor2) {
  if (!tr.regions[phase].contains(xn)) {
    throw Error(ErrorCode::region_violation, std::string("iterate not in region ") + to_string(phase));
  }
  const Role r1 = image_role(MapLabel::S, phase);
  const Role r2 = image_role(MapLabel::T, phase);
  const Point target = tr.t(xn, phase);
  Point x1 = solve_nearest(tr.s, target, tr.regions[r1], r1, anchor1, tr.g, cfg);
  Point x2 = solve_nearest(tr.k, target, tr.regions[r2], r2, anchor2, tr.g, cfg);
  return {std::move(x1), std::move(x2)};
}

inline std::pair<Point, Point> orbit_step(const RlnTriple& tr, const Point& xn, Role phase, const SolveConfig& cfg) {
  return orbit_step(tr, xn, phase, cfg, xn, xn);
}

namespace detail {

inline void fill_traces(const RlnTriple& tr, Orbit& o) {
  const std::size_t n = o.size();
  std::vector<Point> tx, kx;
  tx.reserve(n);
  kx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tx.push_back(tr.t(o.points[i], o.tags[i]));
    kx.push_back(tr.k(o.points[i], o.tags[i]));
  }
  auto& t_collapse = o.traces["t_collapse"];
  auto& k_distance = o.traces["k_distance"];
  for (std::size_t i = 0; 3 * i + 2 < n; ++i) {
    t_collapse.push_back(tr.g(tx[3 * i], tx[3 * i + 1], tx[3 * i + 2]));
    k_distance.push_back(tr.g(kx[3 * i], kx[3 * i + 1], kx[3 * i + 2]));
  }
  const std::pair<const char*, std::size_t> shifted[] = {
      {"triple_collapse_A", 0}, {"triple_collapse_C", 1}, {"triple_collapse_B", 2}};
  for (const auto& [name, off] : shifted) {
    auto& trace = o.traces[name];
    for (std::size_t i = 0; 3 * i + off + 6 < n; ++i) {
      trace.push_back(tr.g(kx[3 * i + off], kx[3 * i + off + 3], kx[3 * i + off + 6]));
    }
  }
}

}  // namespace detail

/// Builds x_0 .. x_{steps} (steps defaults to cfg.max_steps) with region
/// tags, residuals and the diagnostic traces. A failing solve is rethrown
/// with the index of the iterate that could not be produced.
inline Orbit generate_orbit(const RlnTriple& tr, const Point& x0, const SolveConfig& cfg,
                            std::optional<std::size_t> steps = std::nullopt) {
  cfg.validate();
  if (!tr.regions.a.contains(x0)) throw Error(ErrorCode::region_violation, "x0 is not in A");
  const std::size_t last = steps.value_or(cfg.max_steps);
  Orbit o;
  o.points.push_back(x0);
  o.tags.push_back(Role::A);
  o.residuals.push_back(0.0);

  auto fail = [](const Error& e, std::size_t index) {
    return Error(e.code(), std::string(e.what()) + " (iterate " + std::to_string(index) + ")");
  };

  if (last >= 1) {
    const Role r1 = orbit_tag(1);
    const Point target = tr.t(x0, Role::A);
    try {
      o.points.push_back(solve_nearest(tr.s, target, tr.regions[r1], r1, x0, tr.g, cfg));
    } catch (const Error& e) {
      throw fail(e, 1);
    }
    o.tags.push_back(r1);
    o.residuals.push_back(d_g(tr.g, tr.s(o.points[1], r1), target));
  }
  for (std::size_t m = 2; m <= last; ++m) {
    const Role rm = orbit_tag(m);
    const Point target = tr.t(o.points[m - 2], o.tags[m - 2]);
    const Point& anchor = m >= 3 ? o.points[m - 3] : o.points[m - 2];
    try {
      o.points.push_back(solve_nearest(tr.k, target, tr.regions[rm], rm, anchor, tr.g, cfg));
    } catch (const Error& e) {
      throw fail(e, m);
    }
    o.tags.push_back(rm);
    o.residuals.push_back(d_g(tr.g, tr.k(o.points[m], rm), target));
  }
  for (std::size_t n = 0; n + 1 < o.size(); ++n) {
    o.relation_gaps.push_back(d_g(tr.g, tr.s(o.points[n + 1], o.tags[n + 1]), tr.t(o.points[n], o.tags[n])));
  }
  detail::fill_traces(tr, o);
  return o;
}

struct RateReport {
  bool t_ok = true;
  bool k_ok = true;
  double t_worst_excess = -std::numeric_limits<double>::infinity();  // trace - envelope, worst index
  double k_worst_excess = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> t_first_violation;
  std::optional<std::size_t> k_first_violation;

  bool ok() const { return t_ok && k_ok; }
};

/// t_collapse[n] <= r^{3n} t_collapse[0] + tol and
/// k_distance[n] <= r^{3n} k_distance[0] + (1 - r^{3n}) gabc + tol.
inline RateReport check_rate_bounds(const Orbit& o, double r, double gabc, double tol = kDefaultTol) {
  const auto& t = o.traces.at("t_collapse");
  const auto& k = o.traces.at("k_distance");
  if (t.size() < 2) throw Error(ErrorCode::orbit_too_short, "need at least two complete triples");
  if (!(r >= 0.0 && r < 1.0)) throw Error(ErrorCode::invalid_argument, "r must lie in [0, 1)");
  RateReport rep;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const double w = std::pow(r, 3.0 * static_cast<double>(n));
    const double te = t[n] - (w * t[0] + tol);
    const double ke = k[n] - (w * k[0] + (1.0 - w) * gabc + tol);
    rep.t_worst_excess = std::max(rep.t_worst_excess, te);
    rep.k_worst_excess = std::max(rep.k_worst_excess, ke);
    if (te > 0.0 && rep.t_ok) {
      rep.t_ok = false;
      rep.t_first_violation = n;
    }
    if (ke > 0.0 && rep.k_ok) {
      rep.k_ok = false;
      rep.k_first_violation = n;
    }
  }
  return rep;
}

struct GBound {
  Point x0;
  Point y0;
  double m = 0.0;
  bool corollary_ok = true;     // G(x_n, x_m, x_l) <= 3M on the checked index triples
  double corollary_max = 0.0;
  std::size_t triples_checked = 0;
};

/// M = max_n G(x_n, x0, y0) with x0 = y0 = seq[0] unless given, plus the
/// bound G(x_n, x_m, x_l) <= 3M on every index triple (short sequences) or
/// on seeded index triples.
inline GBound check_g_bounded(std::span<const Point> seq, const GMetric& g, std::optional<Point> x0 = std::nullopt,
                              std::optional<Point> y0 = std::nullopt, double tol = kDefaultTol,
                              std::size_t probe_triples = 10000, std::uint64_t seed = 0) {
  if (seq.empty()) throw Error(ErrorCode::sequence_too_short, "empty sequence");
  GBound b{x0.value_or(seq[0]), y0.value_or(seq[0]), 0.0};
  for (const auto& p : seq) b.m = std::max(b.m, g(p, b.x0, b.y0));
  const double bound = 3.0 * b.m;
  auto probe = [&](std::size_t i, std::size_t j, std::size_t k) {
    const double v = g(seq[i], seq[j], seq[k]);
    b.corollary_max = std::max(b.corollary_max, v);
    if (excess(v, bound, tol) > 0.0) b.corollary_ok = false;
    ++b.triples_checked;
  };
  const std::size_t n = seq.size();
  if (n * n * n <= probe_triples) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) probe(i, j, k);
  } else {
    Rng rng(seed);
    for (std::size_t s = 0; s < probe_triples; ++s) probe(rng.below(n), rng.below(n), rng.below(n));
  }
  return b;
}

struct CauchyReport {
  bool ok = false;
  double tail_max = 0.0;
  std::size_t window = 0;
};

/// max G(x_l, x_m, x_n) over the last `window` terms is at most tol.
inline CauchyReport check_cauchy(std::span<const Point> seq, const GMetric& g, double tol, std::size_t window) {
  if (window < 3) throw Error(ErrorCode::invalid_argument, "window must be at least 3");
  if (seq.size() <= window) throw Error(ErrorCode::sequence_too_short, "sequence not longer than the window");
  CauchyReport rep{false, 0.0, window};
  const auto tail = seq.subspan(seq.size() - window);
  for (const auto& a : tail)
    for (const auto& b : tail)
      for (const auto& c : tail) rep.tail_max = std::max(rep.tail_max, g(a, b, c));
  rep.ok = rep.tail_max <= tol;
  return rep;
}

inline constexpr double kCauchyTol = 1e-6;
inline constexpr std::size_t kCauchyWindow = 5;

enum class ConvergenceStatus { converged, stalled, max_steps };

inline const char* to_string(ConvergenceStatus s) {
  switch (s) {
    case ConvergenceStatus::converged: return "converged";
    case ConvergenceStatus::stalled: return "stalled";
    case ConvergenceStatus::max_steps: return "max_steps";
  }
  return "?";
}

/// G(Kp, Tp, Sp) with p evaluated as a point of A.
inline double coincidence_value(const RlnTriple& tr, const Point& p) {
  return tr.g(tr.k(p, Role::A), tr.t(p, Role::A), tr.s(p, Role::A));
}

struct ConvergenceReport {
  ConvergenceStatus status = ConvergenceStatus::max_steps;
  std::optional<Point> limit;
  std::optional<std::size_t> limit_index;
  double final_gap = std::numeric_limits<double>::infinity();  // G(Kp,Tp,Sp) - G(A,B,C) at the best phase-A iterate
  Point best_iterate{0.0};
  std::optional<RateReport> rate;
  std::optional<CauchyReport> cauchy;
  std::optional<GBound> bounded;
  Orbit orbit;
};

/// Runs the orbit from x0 and reports the first phase-A iterate p with
/// G(Kp,Tp,Sp) - G(A,B,C) <= stop_tol. Without one, the status is stalled
/// when k_distance stops changing (relative change below `stall_tol` over
/// three consecutive triples) and max_steps otherwise; the best iterate and
/// its gap are kept either way.
inline ConvergenceReport find_coincidence_point(const RlnTriple& tr, const Point& x0, const SolveConfig& cfg,
                                                std::optional<double> r = std::nullopt,
                                                double tol = kDefaultTol) {
  ConvergenceReport rep;
  rep.orbit = generate_orbit(tr, x0, cfg);
  const Orbit& o = rep.orbit;
  const double gabc = tr.gabc.value;

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < o.size(); n += 3) {
    const double gap = coincidence_value(tr, o.points[n]) - gabc;
    if (gap < best) {
      best = gap;
      rep.best_iterate = o.points[n];
    }
    if (gap <= cfg.stop_tol) {
      rep.status = ConvergenceStatus::converged;
      rep.limit = o.points[n];
      rep.limit_index = n;
      best = gap;
      rep.best_iterate = o.points[n];
      break;
    }
  }
  rep.final_gap = best;

  if (rep.status != ConvergenceStatus::converged) {
    const auto& k = o.traces.at("k_distance");
    std::size_t flat = 0;
    for (std::size_t i = 1; i < k.size(); ++i) {
      const double rel = std::abs(k[i] - k[i - 1]) / std::max(std::abs(k[i - 1]), std::numeric_limits<double>::min());
      flat = rel < tol ? flat + 1 : 0;
      if (flat >= 3) {
        rep.status = ConvergenceStatus::stalled;
        break;
      }
    }
  }

  std::vector<Point> k_a;
  for (std::size_t n = 0; n < o.size(); n += 3) k_a.push_back(tr.k(o.points[n], Role::A));
  if (r && o.traces.at("t_collapse").size() >= 2) rep.rate = check_rate_bounds(o, *r, gabc, tol);
  if (k_a.size() > kCauchyWindow) rep.cauchy = check_cauchy(k_a, tr.g, kCauchyTol, kCauchyWindow);
  if (!k_a.empty()) rep.bounded = check_g_bounded(k_a, tr.g);
  return rep;
}

}  // namespace gmetric
