#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmetric/point.hpp"
#include "gmetric/sampling.hpp"

namespace gmetric {

/// Closed interval [lo, hi] of R; lo == hi encodes an isolated point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool degenerate() const { return lo == hi; }
  bool contains(double x, double tol) const { return x >= lo - tol && x <= hi + tol; }
  bool operator==(const Interval&) const = default;
};

inline constexpr double kMemberTol = 1e-9;

/// A named subset of the universe: membership test, bounding box and a
/// deterministic seeded sampler. One-dimensional regions built from
/// intervals or isolated points also expose their interval form, which the
/// distance refinement and the inverse solver use as a fast path.
class Region {
 public:
  using Membership = std::function<bool(const Point&)>;
  using Sampler = std::function<std::vector<Point>(std::size_t n, std::uint64_t seed)>;

  Region(std::string name, Membership member, Box bounds, Sampler sampler,
         std::optional<std::vector<Interval>> intervals = std::nullopt)
      : name_(std::move(name)),
        member_(std::move(member)),
        bounds_(std::move(bounds)),
        sampler_(std::move(sampler)),
        intervals_(std::move(intervals)) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const { return bounds_.dim(); }
  const Box& bounds() const noexcept { return bounds_; }
  const std::optional<std::vector<Interval>>& interval_form() const noexcept { return intervals_; }

  bool contains(const Point& p) const { return p.dim() == dim() && member_(p); }

  /// `n` member points; the same (n, seed) always yields the same points,
  /// and a longer request extends a shorter one.
  std::vector<Point> sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) return {};
    auto pts = sampler_(n, seed);
    if (pts.empty()) throw Error(ErrorCode::empty_region, "region " + name_ + " yielded no points");
    return pts;
  }

  /// Finite point sets (all intervals degenerate) can be enumerated exactly.
  bool is_discrete() const {
    return intervals_ && std::all_of(intervals_->begin(), intervals_->end(),
                                     [](const Interval& i) { return i.degenerate(); });
  }

  Region renamed(std::string name) const {
    Region r = *this;
    r.name_ = std::move(name);
    return r;
  }

  /// Union of closed intervals on the line.
  static Region intervals(std::string name, std::vector<Interval> parts) {
    if (parts.empty()) throw Error(ErrorCode::empty_region, "region " + name + " has no intervals");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& iv : parts) {
      if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
        throw Error(ErrorCode::invalid_argument, "bad interval in region " + name);
      }
      lo = std::min(lo, iv.lo);
      hi = std::max(hi, iv.hi);
    }
    auto member = [parts](const Point& p) {
      const double x = p.x();
      const double tol = kMemberTol * (1.0 + std::abs(x));
      return std::any_of(parts.begin(), parts.end(), [&](const Interval& iv) { return iv.contains(x, tol); });
    };
    auto sampler = [parts](std::size_t n, std::uint64_t seed) {
      std::vector<Point> out;
      out.reserve(n);
      for (const auto& iv : parts) {
        if (out.size() < n) out.emplace_back(iv.lo);
        if (!iv.degenerate() && out.size() < n) out.emplace_back(iv.hi);
      }
      Rng rng(seed);
      while (out.size() < n) {
        const auto& iv = parts[rng.below(parts.size())];
        out.emplace_back(iv.degenerate() ? iv.lo : rng.uniform(iv.lo, iv.hi));
      }
      return out;
    };
    return Region(std::move(name), member, box1(lo, hi), sampler, std::move(parts));
  }

  static Region interval(std::string name, double lo, double hi) {
    return intervals(std::move(name), {Interval{lo, hi}});
  }

  /// A finite set of reals.
  static Region points(std::string name, const std::vector<double>& xs) {
    std::vector<Interval> parts;
    parts.reserve(xs.size());
    for (double x : xs) parts.push_back({x, x});
    return intervals(std::move(name), std::move(parts));
  }

  /// {offset + period * n : n >= n_min}. Membership covers the whole
  /// infinite progression; sampling, bounds and the interval form are
  /// truncated at n_max.
  static Region lattice(std::string name, double offset, double period, long n_min, long n_max) {
    if (!(period > 0.0) || n_max < n_min) throw Error(ErrorCode::invalid_argument, "bad lattice " + name);
    auto member = [=](const Point& p) {
      const double k = (p.x() - offset) / period;
      const double n = std::round(k);
      return std::abs(k - n) <= kMemberTol * (1.0 + std::abs(k)) && n >= static_cast<double>(n_min);
    };
    std::vector<Interval> parts;
    for (long n = n_min; n <= n_max; ++n) {
      const double x = offset + period * static_cast<double>(n);
      parts.push_back({x, x});
    }
    auto sampler = [parts](std::size_t n, std::uint64_t seed) {
      std::vector<Point> out;
      out.reserve(n);
      for (std::size_t i = 0; i < parts.size() && out.size() < n; ++i) out.emplace_back(parts[i].lo);
      Rng rng(seed);
      while (out.size() < n) out.emplace_back(parts[rng.below(parts.size())].lo);
      return out;
    };
    Box bounds = box1(parts.front().lo, parts.back().lo);
    return Region(std::move(name), member, std::move(bounds), sampler, std::move(parts));
  }

  /// Axis-aligned box in R^n.
  static Region box(std::string name, Box b) {
    auto member = [b](const Point& p) {
      const double tol = kMemberTol;
      for (std::size_t i = 0; i < b.dim(); ++i) {
        if (p[i] < b.lo[i] - tol * (1 + std::abs(p[i])) || p[i] > b.hi[i] + tol * (1 + std::abs(p[i]))) {
          return false;
        }
      }
      return true;
    };
    auto sampler = [b](std::size_t n, std::uint64_t seed) {
      std::vector<Point> out;
      out.reserve(n);
      const std::uint64_t corners = b.dim() < 6 ? (1ULL << b.dim()) : 64;
      for (std::uint64_t m = 0; m < corners && out.size() < n; ++m) out.push_back(b.corner(m));
      Rng rng(seed);
      while (out.size() < n) out.push_back(b.draw(rng));
      return out;
    };
    std::optional<std::vector<Interval>> parts;
    if (b.dim() == 1) parts = std::vector<Interval>{{b.lo.x(), b.hi.x()}};
    return Region(std::move(name), member, b, sampler, std::move(parts));
  }

 private:
  std::string name_;
  Membership member_;
  Box bounds_;
  Sampler sampler_;
  std::optional<std::vector<Interval>> intervals_;
};

/// The three roles a region can play.
enum class Role { A = 0, B = 1, C = 2 };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::A: return "A";
    case Role::B: return "B";
    case Role::C: return "C";
  }
  return "?";
}

/// The ordered triple of regions (A, B, C).
struct Regions {
  Region a;
  Region b;
  Region c;

  const Region& operator[](Role r) const {
    switch (r) {
      case Role::A: return a;
      case Role::B: return b;
      case Role::C: return c;
    }
    return a;
  }

  /// Bounding box of A ∪ B ∪ C.
  Box hull() const {
    std::vector<double> lo(a.dim()), hi(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
      lo[i] = std::min({a.bounds().lo[i], b.bounds().lo[i], c.bounds().lo[i]});
      hi[i] = std::max({a.bounds().hi[i], b.bounds().hi[i], c.bounds().hi[i]});
    }
    return Box{Point(std::move(lo)), Point(std::move(hi))};
  }
};

inline constexpr Role kRoles[] = {Role::A, Role::B, Role::C};

}  // namespace gmetric
