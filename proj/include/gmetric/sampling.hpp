#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "gmetric/point.hpp"

namespace gmetric {

/// splitmix64 finalizer; derives independent sub-seeds from (seed, stream).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded generator whose uniform draws are defined bit-for-bit (the
/// standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

/// Axis-aligned sampling box.
struct Box {
  Point lo;
  Point hi;

  std::size_t dim() const { return lo.dim(); }

  Point corner(std::uint64_t mask) const {
    std::vector<double> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = (mask >> i) & 1U ? hi[i] : lo[i];
    return Point(std::move(c));
  }

  Point draw(Rng& rng) const {
    std::vector<double> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = rng.uniform(lo[i], hi[i]);
    return Point(std::move(c));
  }

  bool contains(const Point& p, double tol = 0.0) const {
    for (std::size_t i = 0; i < dim(); ++i) {
      if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    }
    return true;
  }
};

inline Box box1(double lo, double hi) { return Box{Point(lo), Point(hi)}; }

/// A sample tuple (x, y, z, a) for ternary checks; `a` is the auxiliary
/// point of the rectangle-type inequalities.
using Quad = std::array<Point, 4>;

/// Uniform tuples over `box`, salted with the degenerate patterns where the
/// axioms actually bite: all-equal, and each two-equal arrangement. Box
/// corners come first so small runs still see the extremes.
inline std::vector<Quad> sample_quads(const Box& box, std::size_t n, std::uint64_t seed) {
  std::vector<Quad> out;
  out.reserve(n);
  Rng rng(seed);
  const std::uint64_t corners = box.dim() < 6 ? (1ULL << box.dim()) : 64;
  for (std::uint64_t m = 0; m < corners && out.size() < n; ++m) {
    Point c = box.corner(m);
    Point o = box.corner(~m);
    out.push_back({c, o, c, o});
    if (out.size() < n) out.push_back({c, c, o, c});
  }
  while (out.size() < n) {
    Point x = box.draw(rng), y = box.draw(rng), z = box.draw(rng), a = box.draw(rng);
    switch (out.size() % 8) {
      case 5: y = x; z = x; break;
      case 6: z = y; break;
      case 7: y = x; break;
      default: break;
    }
    out.push_back({std::move(x), std::move(y), std::move(z), std::move(a)});
  }
  return out;
}

}  // namespace gmetric
