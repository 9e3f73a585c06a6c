#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "gmetric/point.hpp"

namespace gmetric {

/// An ordinary distance function d(x, y).
class Metric {
 public:
  using Fn = std::function<double(const Point&, const Point&)>;

  Metric(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

  double operator()(const Point& a, const Point& b) const {
    require_same_dim(a, b);
    return fn_(a, b);
  }

  const std::string& name() const noexcept { return name_; }

  /// |x - y| on R^1, and the l1 distance in higher dimensions.
  static Metric absolute() {
    return Metric(
        [](const Point& a, const Point& b) {
          double s = 0.0;
          for (std::size_t i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
          return s;
        },
        "abs");
  }

  static Metric euclidean() {
    return Metric(
        [](const Point& a, const Point& b) {
          double s = 0.0;
          for (std::size_t i = 0; i < a.dim(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
          return std::sqrt(s);
        },
        "euclidean");
  }

 private:
  Fn fn_;
  std::string name_;
};

/// A ternary distance G(x, y, z). Nothing about the evaluator is assumed;
/// use check_g_axioms to falsify a candidate.
class GMetric {
 public:
  using Fn = std::function<double(const Point&, const Point&, const Point&)>;

  GMetric(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

  double operator()(const Point& x, const Point& y, const Point& z) const {
    require_same_dim(x, y);
    require_same_dim(x, z);
    return fn_(x, y, z);
  }

  const std::string& name() const noexcept { return name_; }

  /// Cached outcome of check_symmetric, when one has been recorded.
  std::optional<bool> symmetric_flag() const { return *symmetric_; }
  void set_symmetric_flag(bool flag) const { *symmetric_ = flag; }

 private:
  Fn fn_;
  std::string name_;
  std::shared_ptr<std::optional<bool>> symmetric_ = std::make_shared<std::optional<bool>>();
};

/// scale * [d(x,y) + d(y,z) + d(x,z)]. The three distances are summed in
/// ascending order so that every argument permutation gives the same bits.
inline GMetric g_from_metric_sum(Metric d, double scale = 1.0 / 3.0) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::invalid_argument, "scale must be positive");
  }
  std::string name = "sum(" + d.name() + ")";
  return GMetric(
      [d = std::move(d), scale](const Point& x, const Point& y, const Point& z) {
        double a = d(x, y), b = d(y, z), c = d(x, z);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        return scale * ((a + b) + c);
      },
      std::move(name));
}

/// max{d(x,y), d(y,z), d(x,z)}.
inline GMetric g_from_metric_max(Metric d) {
  std::string name = "max(" + d.name() + ")";
  return GMetric(
      [d = std::move(d)](const Point& x, const Point& y, const Point& z) {
        return std::max({d(x, y), d(y, z), d(x, z)});
      },
      std::move(name));
}

/// The metric associated with G: d_G(x,y) = G(x,y,y) + G(x,x,y).
inline Metric metric_from_g(GMetric g) {
  std::string name = "d_G[" + g.name() + "]";
  return Metric(
      [g = std::move(g)](const Point& x, const Point& y) { return g(x, y, y) + g(x, x, y); },
      std::move(name));
}

/// The perimeter G-metric |x-y| + |y-z| + |z-x| used by most scenarios.
inline GMetric perimeter_g() { return g_from_metric_sum(Metric::absolute(), 1.0); }

/// max{|x-y|, |y-z|, |z-x|}.
inline GMetric max_g() { return g_from_metric_max(Metric::absolute()); }

}  // namespace gmetric
