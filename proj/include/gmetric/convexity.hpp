#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmetric/axioms.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/region.hpp"
#include "gmetric/sampling.hpp"

namespace gmetric {

using Weights = std::array<double, 3>;

inline constexpr double kWeightTol = 1e-12;

inline void validate_weights(const Weights& w) {
  for (double l : w) {
    if (!(l >= 0.0)) throw Error(ErrorCode::bad_weights, "negative weight");
  }
  if (std::abs(w[0] + w[1] + w[2] - 1.0) > kWeightTol) throw Error(ErrorCode::bad_weights, "weights must sum to 1");
}

/// A three-point combiner W(x, y, z; l1, l2, l3).
class ConvexStructure {
 public:
  using Fn = std::function<Point(const Point&, const Point&, const Point&, const Weights&)>;

  ConvexStructure(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

  Point operator()(const Point& x, const Point& y, const Point& z, const Weights& w) const {
    validate_weights(w);
    require_same_dim(x, y);
    require_same_dim(x, z);
    return fn_(x, y, z, w);
  }

  /// l1 x + l2 y + l3 z, coordinatewise.
  static ConvexStructure centroid() {
    return ConvexStructure(
        [](const Point& x, const Point& y, const Point& z, const Weights& w) {
          std::vector<double> c(x.dim());
          for (std::size_t i = 0; i < x.dim(); ++i) c[i] = w[0] * x[i] + w[1] * y[i] + w[2] * z[i];
          return Point(std::move(c));
        },
        "centroid");
  }

 private:
  Fn fn_;
  std::string name_;
};

inline Point combine(const ConvexStructure& w, const Point& x, const Point& y, const Point& z,
                     const Weights& weights) {
  return w(x, y, z, weights);
}

inline constexpr Weights kEqualWeights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

/// One probe of the convexity inequality.
struct ConvexSample {
  Point x, y, z, u, v;
  Weights weights;
};

/// Uniform points over the box with weights uniform on the simplex; the
/// vertex weights and equal weights are cycled in as fixed cases.
inline std::vector<ConvexSample> sample_convex_configs(const Box& box, std::size_t n, std::uint64_t seed) {
  static constexpr std::array<Weights, 4> kFixed{Weights{1, 0, 0}, Weights{0, 1, 0}, Weights{0, 0, 1}, kEqualWeights};
  Rng rng(seed);
  std::vector<ConvexSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Weights w;
    if (i % 8 < kFixed.size()) {
      w = kFixed[i % 8];
    } else {
      double s = rng.unit(), t = rng.unit();
      if (s > t) std::swap(s, t);
      w = {s, t - s, 1.0 - t};
    }
    out.push_back({box.draw(rng), box.draw(rng), box.draw(rng), box.draw(rng), box.draw(rng), w});
  }
  return out;
}

/// G(u, v, W(x,y,z; l)) <= l1 G(u,v,x) + l2 G(u,v,y) + l3 G(u,v,z) on every
/// sample.
inline AxiomReport check_convex_structure(const GMetric& g, const ConvexStructure& w,
                                          std::span<const ConvexSample> samples, double tol = kDefaultTol) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "no convexity samples");
  AxiomReport report;
  report.samples_used = samples.size();
  report.tolerance = tol;
  PropertyStatus status;
  status.name = "convex_structure";
  for (const auto& s : samples) {
    const Point m = w(s.x, s.y, s.z, s.weights);
    const double lhs = g(s.u, s.v, m);
    const double rhs = s.weights[0] * g(s.u, s.v, s.x) + s.weights[1] * g(s.u, s.v, s.y) +
                       s.weights[2] * g(s.u, s.v, s.z);
    const double ex = excess(lhs, rhs, tol);
    ++status.checked;
    status.worst_excess = std::max(status.worst_excess, ex);
    if (ex > 0.0) {
      status.passed = false;
      if (status.witnesses.size() < detail::kMaxWitnesses) {
        status.witnesses.push_back(Witness{"G(u,v,W(x,y,z;l)) <= sum l_i G(u,v,p_i)",
                                           {s.x, s.y, s.z, s.u, s.v, m}, lhs, rhs});
      }
    }
  }
  report.properties.push_back(std::move(status));
  return report;
}

struct ConvexSetResult {
  bool convex = true;
  std::size_t combinations_checked = 0;
  std::optional<Witness> witness;  // points: x, y, z, W(x,y,z;l)
};

/// Every combination of the given member triples under the given weights
/// must land back in the region.
inline ConvexSetResult check_g_convex_set(const ConvexStructure& w, const Region& region,
                                          std::span<const std::array<Point, 3>> triples,
                                          std::span<const Weights> weights) {
  if (triples.empty()) throw Error(ErrorCode::empty_region, "no member triples for region " + region.name());
  ConvexSetResult out;
  for (const auto& t : triples) {
    for (const auto& l : weights) {
      const Point m = w(t[0], t[1], t[2], l);
      ++out.combinations_checked;
      if (!region.contains(m)) {
        out.convex = false;
        out.witness = Witness{"W(x,y,z;l) in region " + region.name(), {t[0], t[1], t[2], m}, 0.0, 0.0};
        return out;
      }
    }
  }
  return out;
}

/// Ordered triples over `n` seeded member points of the region (n^3 of
/// them), the sample set check_g_convex_set expects.
inline std::vector<std::array<Point, 3>> member_triples(const Region& region, std::size_t n, std::uint64_t seed) {
  const auto pts = region.sample(n, seed);
  std::vector<std::array<Point, 3>> out;
  out.reserve(pts.size() * pts.size() * pts.size());
  for (const auto& a : pts)
    for (const auto& b : pts)
      for (const auto& c : pts) out.push_back({a, b, c});
  return out;
}

/// Weight samples: the simplex vertices, edge midpoints, the barycentre and
/// `n` seeded interior draws.
inline std::vector<Weights> sample_weights(std::size_t n, std::uint64_t seed) {
  std::vector<Weights> out{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}, kEqualWeights};
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rng.unit(), t = rng.unit();
    if (s > t) std::swap(s, t);
    out.push_back({s, t - s, 1.0 - t});
  }
  return out;
}

struct ModulusAtRadius {
  double r = 0.0;
  double alpha = 0.0;  // inf of 1 - G(u,v,W)/r over admissible samples; may be negative
  std::size_t admissible = 0;
};

/// Sampled estimate of the uniform-convexity modulus alpha(epsilon).
struct ModulusEstimate {
  double epsilon = 0.0;
  double alpha_hat = 0.0;  // min over radii, clipped at 0
  std::size_t samples_used = 0;
  std::vector<ModulusAtRadius> per_radius;
  std::optional<Witness> violated;  // points: x, y, z, u, v, W; lhs = G(u,v,W), rhs = r
};

namespace detail {

/// Five points for one uniform-convexity probe at radius r: either uniform
/// over the box or clustered around a random centre at a random fraction of
/// r, so that the admissible set is hit for small radii too.
inline std::array<Point, 5> draw_configuration(const Box& box, double r, Rng& rng) {
  std::array<Point, 5> pts;
  if (rng.unit() < 0.25) {
    for (auto& p : pts) p = box.draw(rng);
    return pts;
  }
  const Point centre = box.draw(rng);
  const double h = r * rng.uniform(0.05, 1.0);
  for (auto& p : pts) {
    std::vector<double> c(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
      const double lo = std::max(box.lo[i], centre[i] - h);
      const double hi = std::min(box.hi[i], centre[i] + h);
      c[i] = rng.uniform(lo, hi);
    }
    p = Point(std::move(c));
  }
  return pts;
}

}  // namespace detail

/// For each radius r, draws `config_samples` configurations (x, y, z, u, v)
/// in the box and keeps those with G(u,v,p) <= r for p in {x,y,z},
/// G(x,y,z) >= r * epsilon and x, y, z pairwise distinct. The modulus at r
/// is the smallest margin 1 - G(u, v, W(x,y,z; 1/3,1/3,1/3)) / r seen.
/// Throws NoAdmissibleConfigurations when some radius admits nothing.
inline ModulusEstimate estimate_uniform_convexity(const GMetric& g, const ConvexStructure& w, const Box& box,
                                                  double epsilon, std::span<const double> radii,
                                                  std::size_t config_samples, std::uint64_t seed = 0,
                                                  double tol = kDefaultTol) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  if (radii.empty()) throw Error(ErrorCode::invalid_argument, "no radii given");
  double scale = 0.0;
  for (std::size_t i = 0; i < box.dim(); ++i) scale = std::max(scale, box.hi[i] - box.lo[i]);
  const double separation = tol * (1.0 + scale);

  ModulusEstimate out;
  out.epsilon = epsilon;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double r = radii[k];
    if (!(r > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
    Rng rng(mix_seed(seed, k));
    ModulusAtRadius at{r, std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < config_samples; ++i) {
      const auto [x, y, z, u, v] = detail::draw_configuration(box, r, rng);
      if (max_coord_gap(x, y) <= separation || max_coord_gap(y, z) <= separation ||
          max_coord_gap(x, z) <= separation) {
        continue;
      }
      if (g(u, v, x) > r || g(u, v, y) > r || g(u, v, z) > r || g(x, y, z) < r * epsilon) continue;
      ++at.admissible;
      const Point m = w(x, y, z, kEqualWeights);
      const double lhs = g(u, v, m);
      const double margin = 1.0 - lhs / r;
      if (margin < at.alpha) at.alpha = margin;
      if (margin < -tol && !out.violated) {
        out.violated = Witness{"G(u,v,W(x,y,z;1/3,1/3,1/3)) <= r", {x, y, z, u, v, m}, lhs, r};
      }
    }
    if (at.admissible == 0) {
      throw Error(ErrorCode::no_admissible_configurations,
                  "no admissible configuration at r = " + std::to_string(r) +
                      ", epsilon = " + std::to_string(epsilon));
    }
    out.samples_used += at.admissible;
    worst = std::min(worst, at.alpha);
    out.per_radius.push_back(at);
  }
  out.alpha_hat = std::max(0.0, worst);
  return out;
}

}  // namespace gmetric
