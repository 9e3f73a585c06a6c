#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

#include "gmetric/error.hpp"

namespace gmetric {

/// A point of R^n with finite coordinates. Construction from a single
/// double yields a point of R^1, which is what every worked scenario uses.
class Point {
 public:
  Point() = default;
  Point(double x) : coords_{x} { validate(); }  // NOLINT(google-explicit-constructor)
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double x() const { return coords_.front(); }
  std::span<const double> coords() const noexcept { return coords_; }

  bool operator==(const Point& other) const = default;

  friend std::ostream& operator<<(std::ostream& os, const Point& p) {
    if (p.dim() == 1) return os << p.x();
    os << '(';
    for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
    return os << ')';
  }

 private:
  void validate() const {
    if (coords_.empty()) throw Error(ErrorCode::invalid_argument, "point needs dimension >= 1");
    for (double c : coords_) {
      if (!std::isfinite(c)) throw Error(ErrorCode::non_finite, "point coordinate is not finite");
    }
  }

  std::vector<double> coords_;
};

inline void require_same_dim(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "dimension " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

/// Largest coordinate gap; used to decide whether two points are distinct.
inline double max_coord_gap(const Point& a, const Point& b) {
  require_same_dim(a, b);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

/// Relative-absolute tolerance: tol * (1 + max(|lhs|, |rhs|)).
inline double scaled_tol(double tol, double lhs, double rhs) {
  return tol * (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

/// Amount by which `lhs <= rhs` is violated beyond the scaled tolerance;
/// positive means a genuine violation.
inline double excess(double lhs, double rhs, double tol) {
  return lhs - rhs - scaled_tol(tol, lhs, rhs);
}

inline constexpr double kDefaultTol = 1e-9;

}  // namespace gmetric
