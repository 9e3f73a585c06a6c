#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "gmetric/error.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/region.hpp"
#include "gmetric/selfmap.hpp"

namespace gmetric {

struct SolveConfig {
  std::size_t max_steps = 200;
  double residual_tol = 1e-12;
  double stop_tol = 1e-8;
  std::size_t bracket_subdivisions = 64;

  void validate() const {
    if (!(residual_tol > 0.0) || !(stop_tol > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "solver tolerances must be positive");
    }
    if (max_steps < 3) throw Error(ErrorCode::invalid_argument, "max_steps must be at least 3");
    if (bracket_subdivisions == 0) throw Error(ErrorCode::invalid_argument, "bracket_subdivisions must be positive");
  }
};

/// Residual allowed when matching a target value of magnitude |target|.
inline double residual_bound(const SolveConfig& cfg, double target) {
  return cfg.residual_tol * (1.0 + std::abs(target));
}

inline double residual_bound(const SolveConfig& cfg, const Point& target) {
  double m = 0.0;
  for (double c : target.coords()) m = std::max(m, std::abs(c));
  return residual_bound(cfg, m);
}

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

inline double golden_abs_min(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo), d = lo + kInvPhi * (hi - lo);
  double fc = std::abs(f(c)), fd = std::abs(f(d));
  for (int i = 0; i < 120 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(lo)); ++i) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = std::abs(f(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = std::abs(f(d));
    }
  }
  return fc < fd ? c : d;
}

/// Roots of f on [lo, hi]: exact grid zeros, bisected sign changes, and
/// interior minima of |f| that reach the residual bound.
inline void roots_on_interval(const std::function<double(double)>& f, const Interval& iv, std::size_t pieces,
                              double bound, std::vector<double>& out) {
  if (iv.degenerate()) {
    if (std::abs(f(iv.lo)) <= bound) out.push_back(iv.lo);
    return;
  }
  std::vector<double> xs(pieces + 1), fs(pieces + 1);
  for (std::size_t i = 0; i <= pieces; ++i) {
    xs[i] = i == pieces ? iv.hi : iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(pieces);
    fs[i] = f(xs[i]);
  }
  for (std::size_t i = 0; i <= pieces; ++i) {
    if (std::abs(fs[i]) <= bound) {
      out.push_back(xs[i]);
      continue;
    }
    if (i < pieces && std::abs(fs[i + 1]) > bound && (fs[i] < 0.0) != (fs[i + 1] < 0.0)) {
      const double r = bisect(f, xs[i], xs[i + 1], fs[i]);
      if (std::abs(f(r)) <= bound) out.push_back(r);
    }
    if (i > 0 && i < pieces) {
      const double a = std::abs(fs[i - 1]), m = std::abs(fs[i]), b = std::abs(fs[i + 1]);
      const bool same_sign = (fs[i - 1] < 0.0) == (fs[i] < 0.0) && (fs[i] < 0.0) == (fs[i + 1] < 0.0);
      if (same_sign && m <= a && m <= b) {
        const double r = golden_abs_min(f, xs[i - 1], xs[i + 1]);
        if (std::abs(f(r)) <= bound) out.push_back(r);
      }
    }
  }
}

}  // namespace detail

/// All points y of `codomain` with m(y, role) = target, using the map's own
/// inverse when it has one and otherwise bracketing on the codomain's
/// interval form. Throws InverseUnavailable when neither applies.
inline std::vector<Point> preimages(const SelfMap& m, const Point& target, const Region& codomain, Role role,
                                    const SolveConfig& cfg) {
  if (m.inverse()) {
    std::vector<Point> out;
    const double bound = residual_bound(cfg, target);
    for (auto& y : (*m.inverse())(target, codomain, role)) {
      if (codomain.contains(y) && max_coord_gap(m(y, role), target) <= bound) out.push_back(std::move(y));
    }
    return out;
  }
  if (codomain.dim() != 1 || target.dim() != 1 || !codomain.interval_form()) {
    throw Error(ErrorCode::inverse_unavailable,
                std::string("no inverse for ") + to_string(m.label()) + " on region " + codomain.name());
  }
  const double t = target.x();
  const std::function<double(double)> f = [&](double y) { return m(Point(y), role).x() - t; };
  const double bound = residual_bound(cfg, t);
  std::vector<double> roots;
  for (const auto& iv : *codomain.interval_form()) {
    detail::roots_on_interval(f, iv, cfg.bracket_subdivisions, bound, roots);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  std::vector<Point> out;
  out.reserve(roots.size());
  for (double r : roots) out.emplace_back(r);
  return out;
}

/// The solution of m(y, role) = target in `codomain` closest in d_G to
/// `anchor`; the anchor itself wins when it already solves the equation.
/// Throws InverseSolveFailed when there is no solution.
inline Point solve_nearest(const SelfMap& m, const Point& target, const Region& codomain, Role role,
                           const Point& anchor, const GMetric& g, const SolveConfig& cfg) {
  if (codomain.contains(anchor) &&
      max_coord_gap(m(anchor, role), target) <= residual_bound(cfg, target)) {
    return anchor;
  }
  const auto roots = preimages(m, target, codomain, role, cfg);
  if (roots.empty()) {
    throw Error(ErrorCode::inverse_solve_failed,
                std::string("no solution of ") + to_string(m.label()) + "(y) = target in region " + codomain.name());
  }
  const Point* best = &roots.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& r : roots) {
    const double d = g(r, anchor, anchor) + g(r, r, anchor);
    if (d < best_d) {
      best_d = d;
      best = &r;
    }
  }
  return *best;
}

}  // namespace gmetric
