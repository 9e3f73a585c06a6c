#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gmetric/metric.hpp"
#include "gmetric/region.hpp"

namespace gmetric {

/// Upper bound on G(A,B,C) = inf G(a,b,c) together with the triple that
/// attains it.
struct DistanceEstimate {
  double value = std::numeric_limits<double>::infinity();
  std::array<Point, 3> argmin;
  std::size_t budget_used = 0;
  bool refined = false;
};

namespace detail {

struct BudgetExhausted {};

class Evaluator {
 public:
  Evaluator(const GMetric& g, std::size_t budget) : g_(g), budget_(budget) {}

  double operator()(double a, double b, double c) {
    if (used_ >= budget_) throw BudgetExhausted{};
    ++used_;
    return g_(Point(a), Point(b), Point(c));
  }

  double operator()(const Point& a, const Point& b, const Point& c) {
    if (used_ >= budget_) throw BudgetExhausted{};
    ++used_;
    return g_(a, b, c);
  }

  std::size_t used() const { return used_; }

 private:
  const GMetric& g_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

inline const Interval& containing(const std::vector<Interval>& parts, double x) {
  const Interval* best = &parts.front();
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& iv : parts) {
    const double gap = x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0);
    if (gap < best_gap) {
      best_gap = gap;
      best = &iv;
    }
  }
  return *best;
}

/// Golden-section minimisation of f on [lo, hi]; stops once the bracket is
/// narrower than tol.
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  std::pair<double, double> best{lo, f(lo)};
  for (double t : {hi, c, d}) {
    const double v = f(t);
    if (v < best.second) best = {t, v};
  }
  return best;
}

inline constexpr std::size_t kExhaustiveDiscrete = 4096;

/// Local refinement of a 1-D triple over the interval forms of the three
/// regions: per-coordinate golden section (or exhaustive search over a
/// finite set), then joint compass moves to step off the kinks where a
/// single coordinate cannot make progress.
inline bool refine_1d(Evaluator& eval, const std::array<const std::vector<Interval>*, 3>& parts,
                      std::array<double, 3>& x, double& value, double tol) {
  auto eval_at = [&](const std::array<double, 3>& t) { return eval(t[0], t[1], t[2]); };
  double span = 0.0;
  for (const auto* p : parts) span = std::max(span, p->back().hi - p->front().lo);
  for (int round = 0; round < 50; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < 3; ++i) {
      std::array<double, 3> t = x;
      auto along = [&](double s) {
        t[i] = s;
        return eval_at(t);
      };
      const auto& region = *parts[i];
      const bool discrete = std::all_of(region.begin(), region.end(), [](const Interval& iv) { return iv.degenerate(); });
      if (discrete && region.size() > kExhaustiveDiscrete) continue;
      for (const auto& iv : region) {
        const auto [s, v] = iv.degenerate() ? std::pair{iv.lo, along(iv.lo)} : golden_min(along, iv.lo, iv.hi, tol);
        if (v < value) {
          value = v;
          x[i] = s;
          improved = true;
        }
      }
    }
    double h = span / 4.0;
    while (h >= tol && span > 0.0) {
      bool moved = false;
      for (int code = 0; code < 27 && !moved; ++code) {
        if (code == 13) continue;
        std::array<double, 3> t = x;
        int c = code;
        for (std::size_t i = 0; i < 3; ++i, c /= 3) {
          const Interval& iv = containing(*parts[i], x[i]);
          t[i] = std::clamp(x[i] + static_cast<double>(c % 3 - 1) * h, iv.lo, iv.hi);
        }
        const double v = eval_at(t);
        if (v < value) {
          value = v;
          x = t;
          moved = improved = true;
        }
      }
      if (!moved) h /= 2.0;
    }
    if (!improved) return true;
  }
  return true;
}

}  // namespace detail

/// Estimate of G(A,B,C). Finite regions whose product fits the budget are
/// searched exhaustively. Otherwise a grid of seeded samples per region is
/// scored and, when all three regions have a one-dimensional interval form,
/// the best candidates are refined until the step falls below tol.
/// `refined` is false when the budget ran out before refinement finished.
inline DistanceEstimate g_set_distance(const GMetric& g, const Region& a, const Region& b, const Region& c,
                                       std::size_t budget = 100000, double tol = kDefaultTol,
                                       std::uint64_t seed = 0) {
  if (budget < 27) throw Error(ErrorCode::invalid_argument, "distance budget must be at least 27");
  DistanceEstimate best;
  detail::Evaluator eval(g, budget);

  auto consider = [&](const Point& p, const Point& q, const Point& r) {
    const double v = eval(p, q, r);
    if (v < best.value) {
      best.value = v;
      best.argmin = {p, q, r};
    }
  };

  if (a.is_discrete() && b.is_discrete() && c.is_discrete()) {
    const auto& pa = *a.interval_form();
    const auto& pb = *b.interval_form();
    const auto& pc = *c.interval_form();
    if (pa.size() * pb.size() * pc.size() <= budget) {
      for (const auto& i : pa)
        for (const auto& j : pb)
          for (const auto& k : pc) consider(Point(i.lo), Point(j.lo), Point(k.lo));
      best.budget_used = eval.used();
      best.refined = true;
      return best;
    }
  }

  const std::size_t per_region = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(budget) / 2.0))));
  const auto sa = a.sample(per_region, mix_seed(seed, 1));
  const auto sb = b.sample(per_region, mix_seed(seed, 2));
  const auto sc = c.sample(per_region, mix_seed(seed, 3));

  struct Candidate {
    double value;
    std::array<Point, 3> pts;
  };
  std::vector<Candidate> pool;
  try {
    for (const auto& p : sa)
      for (const auto& q : sb)
        for (const auto& r : sc) {
          const double v = eval(p, q, r);
          pool.push_back({v, {p, q, r}});
          if (v < best.value) {
            best.value = v;
            best.argmin = {p, q, r};
          }
        }
  } catch (const detail::BudgetExhausted&) {
    best.budget_used = eval.used();
    return best;
  }

  const bool one_d = a.dim() == 1 && a.interval_form() && b.interval_form() && c.interval_form();
  if (!one_d) {
    best.budget_used = eval.used();
    best.refined = false;
    return best;
  }

  constexpr std::size_t kStarts = 4;
  const std::size_t starts = std::min(kStarts, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(starts), pool.end(),
                    [](const Candidate& l, const Candidate& r) { return l.value < r.value; });
  const std::array<const std::vector<Interval>*, 3> parts{&*a.interval_form(), &*b.interval_form(),
                                                          &*c.interval_form()};
  bool converged = true;
  for (std::size_t s = 0; s < starts; ++s) {
    std::array<double, 3> x{pool[s].pts[0].x(), pool[s].pts[1].x(), pool[s].pts[2].x()};
    double value = pool[s].value;
    try {
      detail::refine_1d(eval, parts, x, value, tol);
    } catch (const detail::BudgetExhausted&) {
      converged = false;
    }
    if (value < best.value) {
      best.value = value;
      best.argmin = {Point(x[0]), Point(x[1]), Point(x[2])};
    }
    if (!converged) break;
  }
  best.budget_used = eval.used();
  best.refined = converged;
  return best;
}

/// Extensional approximation of the proximal triple (A0, B0, C0).
struct ProximalTriple {
  std::vector<Point> a0, b0, c0;
  std::vector<Point> a_candidates, b_candidates, c_candidates;
  double threshold = 0.0;
};

/// Samples each region and keeps every point whose best partner triple
/// reaches within `threshold` of dist.value. A point's best partners are
/// found by a distance estimate with the point itself as a singleton region.
inline ProximalTriple proximal_triple(const GMetric& g, const Region& a, const Region& b, const Region& c,
                                      const DistanceEstimate& dist, double threshold,
                                      std::size_t budget = 100000, std::size_t per_region = 16,
                                      std::uint64_t seed = 0) {
  ProximalTriple out;
  out.threshold = threshold;
  const std::size_t sub_budget = std::max<std::size_t>(27, budget / (3 * std::max<std::size_t>(per_region, 1)));
  auto singleton = [](const Point& p, const Region& like) {
    if (p.dim() == 1) return Region::points(like.name() + "_pt", {p.x()});
    return Region::box(like.name() + "_pt", Box{p, p});
  };
  auto keep = [&](double v) { return v <= dist.value + threshold + scaled_tol(kDefaultTol, v, dist.value); };

  out.a_candidates = a.sample(per_region, mix_seed(seed, 11));
  out.b_candidates = b.sample(per_region, mix_seed(seed, 12));
  out.c_candidates = c.sample(per_region, mix_seed(seed, 13));
  for (const auto& p : out.a_candidates) {
    if (keep(g_set_distance(g, singleton(p, a), b, c, sub_budget, kDefaultTol, seed).value)) out.a0.push_back(p);
  }
  for (const auto& p : out.b_candidates) {
    if (keep(g_set_distance(g, a, singleton(p, b), c, sub_budget, kDefaultTol, seed).value)) out.b0.push_back(p);
  }
  for (const auto& p : out.c_candidates) {
    if (keep(g_set_distance(g, a, b, singleton(p, c), sub_budget, kDefaultTol, seed).value)) out.c0.push_back(p);
  }
  return out;
}

/// Sampled set equality A = A0 (and likewise for B, C): every candidate
/// drawn from a region must have a retained point within coverage_tol in
/// the metric d_G.
inline bool is_proximal(const GMetric& g, const ProximalTriple& pt, double coverage_tol) {
  const Metric dg = metric_from_g(g);
  auto covered = [&](const std::vector<Point>& candidates, const std::vector<Point>& kept) {
    return std::all_of(candidates.begin(), candidates.end(), [&](const Point& p) {
      return std::any_of(kept.begin(), kept.end(), [&](const Point& q) { return dg(p, q) <= coverage_tol; });
    });
  };
  return covered(pt.a_candidates, pt.a0) && covered(pt.b_candidates, pt.b0) && covered(pt.c_candidates, pt.c0);
}

}  // namespace gmetric
