#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gmetric/distance.hpp"
#include "gmetric/error.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/region.hpp"
#include "gmetric/sampling.hpp"
#include "gmetric/selfmap.hpp"
#include "gmetric/solve.hpp"
#include "gmetric/witness.hpp"

namespace gmetric {

/// The maps (T; S; K) on the regions (A, B, C) with the G-metric and the
/// distance G(A,B,C).
struct RlnTriple {
  SelfMap t;
  SelfMap s;
  SelfMap k;
  Regions regions;
  GMetric g;
  DistanceEstimate gabc;

  const SelfMap& map(MapLabel l) const { return l == MapLabel::T ? t : l == MapLabel::S ? s : k; }
};

enum class MapRole { right_cyclic, left_cyclic, noncyclic };

inline const char* to_string(MapRole r) {
  switch (r) {
    case MapRole::right_cyclic: return "right_cyclic";
    case MapRole::left_cyclic: return "left_cyclic";
    case MapRole::noncyclic: return "noncyclic";
  }
  return "?";
}

inline constexpr MapRole kMapRoles[] = {MapRole::right_cyclic, MapRole::left_cyclic, MapRole::noncyclic};

inline Role target_region(MapRole r, Role from) {
  switch (r) {
    case MapRole::right_cyclic: return image_role(MapLabel::T, from);
    case MapRole::left_cyclic: return image_role(MapLabel::S, from);
    case MapRole::noncyclic: return from;
  }
  return from;
}

inline MapRole intended_role(MapLabel l) {
  return l == MapLabel::T ? MapRole::right_cyclic : l == MapLabel::S ? MapRole::left_cyclic : MapRole::noncyclic;
}

enum class CertificateKind {
  contraction,
  semi_contraction,
  left_cyclic_contraction,
  anti_lipschitz,
  commuting,
  inclusion_chain,
  role
};

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::contraction: return "contraction";
    case CertificateKind::semi_contraction: return "semi_contraction";
    case CertificateKind::left_cyclic_contraction: return "left_cyclic_contraction";
    case CertificateKind::anti_lipschitz: return "anti_lipschitz";
    case CertificateKind::commuting: return "commuting";
    case CertificateKind::inclusion_chain: return "inclusion_chain";
    case CertificateKind::role: return "role";
  }
  return "?";
}

/// Outcome of a sampled verification.
///
/// For the contraction kinds `constant` is r̂, the largest per-sample
/// minimal feasible r, and `margin` is 1 - r̂. For anti_lipschitz it is ĉ
/// (absent when unbounded). For the pass/fail kinds `margin` is minus the
/// worst residual seen.
struct Certificate {
  CertificateKind kind = CertificateKind::role;
  bool passed = true;
  std::optional<double> constant;
  double margin = 0.0;
  std::vector<Witness> witnesses;
  std::size_t samples_used = 0;
  std::size_t samples_skipped = 0;
  double max_lhs = 0.0;  // largest left-hand side seen, for the fixed-r check
};

using Triple = std::array<Point, 3>;

/// Seeded samples of A × B × C: combinations of each region's first few
/// points (interval endpoints) first, then random pairings.
inline std::vector<Triple> sample_triples(const Regions& regions, std::size_t n, std::uint64_t seed) {
  const auto pa = regions.a.sample(n, mix_seed(seed, 1));
  const auto pb = regions.b.sample(n, mix_seed(seed, 2));
  const auto pc = regions.c.sample(n, mix_seed(seed, 3));
  std::vector<Triple> out;
  out.reserve(n);
  const std::size_t ea = std::min<std::size_t>(4, pa.size()), eb = std::min<std::size_t>(4, pb.size()),
                    ec = std::min<std::size_t>(4, pc.size());
  for (std::size_t i = 0; i < ea && out.size() < n; ++i)
    for (std::size_t j = 0; j < eb && out.size() < n; ++j)
      for (std::size_t k = 0; k < ec && out.size() < n; ++k) out.push_back({pa[i], pb[j], pc[k]});
  Rng rng(mix_seed(seed, 4));
  while (out.size() < n) {
    out.push_back({pa[rng.below(pa.size())], pb[rng.below(pb.size())], pc[rng.below(pc.size())]});
  }
  return out;
}

/// Seeded member points of the given regions, tagged with their role.
inline std::vector<std::pair<Point, Role>> sample_tagged(const Regions& regions, std::span<const Role> roles,
                                                         std::size_t per_region, std::uint64_t seed) {
  std::vector<std::pair<Point, Role>> out;
  for (Role r : roles) {
    for (auto& p : regions[r].sample(per_region, mix_seed(seed, 10 + static_cast<std::uint64_t>(r)))) {
      out.emplace_back(std::move(p), r);
    }
  }
  return out;
}

struct RoleClassification {
  std::vector<MapRole> consistent;
  std::vector<std::pair<MapRole, Witness>> rejected;  // points: x, m(x)

  bool has(MapRole r) const { return std::find(consistent.begin(), consistent.end(), r) != consistent.end(); }
  /// The unique consistent role, if exactly one.
  std::optional<MapRole> unique() const {
    return consistent.size() == 1 ? std::optional<MapRole>(consistent.front()) : std::nullopt;
  }
};

/// Tests each sampled image against the region each role requires.
inline RoleClassification classify_role(const SelfMap& m, const Regions& regions, std::size_t per_region,
                                        std::uint64_t seed = 0) {
  std::array<std::optional<Witness>, 3> bad;
  for (Role from : kRoles) {
    for (const auto& x : regions[from].sample(per_region, mix_seed(seed, static_cast<std::uint64_t>(from)))) {
      const Point y = m(x, from);
      for (MapRole mr : kMapRoles) {
        auto& slot = bad[static_cast<std::size_t>(mr)];
        if (slot) continue;
        const Role to = target_region(mr, from);
        if (!regions[to].contains(y)) {
          slot = Witness{std::string(to_string(m.label())) + "(" + to_string(from) + ") in " + to_string(to), {x, y},
                         0.0, 0.0};
        }
      }
    }
  }
  RoleClassification out;
  for (MapRole mr : kMapRoles) {
    const auto& slot = bad[static_cast<std::size_t>(mr)];
    if (slot) {
      out.rejected.emplace_back(mr, *slot);
    } else {
      out.consistent.push_back(mr);
    }
  }
  return out;
}

/// T right cyclic, S left cyclic and K noncyclic on the sampled points.
inline Certificate certify_rln(const RlnTriple& tr, std::size_t per_region, std::uint64_t seed = 0) {
  Certificate c;
  c.kind = CertificateKind::role;
  c.samples_used = 3 * per_region;
  for (const SelfMap* m : {&tr.t, &tr.s, &tr.k}) {
    const auto cls = classify_role(*m, tr.regions, per_region, seed);
    const MapRole want = intended_role(m->label());
    if (cls.has(want)) continue;
    c.passed = false;
    c.margin = -1.0;
    for (const auto& [mr, w] : cls.rejected) {
      if (mr == want) c.witnesses.push_back(w);
    }
  }
  return c;
}

namespace detail {

/// One ratio constraint r >= num / den from a sample.
struct RatioTerm {
  const char* relation;
  double lhs;   // value compared against r * den + (1 - r) * offset
  double den;   // multiplier of r
  double offset;
};

/// The two ratio constraints of the contraction (semi = false) or
/// semi-contraction (semi = true) inequalities at (x, y, z) in A × B × C.
inline std::array<RatioTerm, 2> contraction_terms(const RlnTriple& tr, const Triple& p, bool semi) {
  const auto& [x, y, z] = p;
  const GMetric& g = tr.g;
  const double gabc = tr.gabc.value;
  const Point sx = tr.s(x, Role::A), sy = tr.s(y, Role::B), sz = tr.s(z, Role::C);
  const Point kx = tr.k(x, Role::A), ky = tr.k(y, Role::B), kz = tr.k(z, Role::C);
  const double gs = g(sx, sy, sz), gk = g(kx, ky, kz);
  if (!semi) {
    const double gt = g(tr.t(x, Role::A), tr.t(y, Role::B), tr.t(z, Role::C));
    return {RatioTerm{"G(Sx,Sy,Sz) <= r G(Kx,Ky,Kz) + (1-r) G(A,B,C)", gs, gk, gabc},
            RatioTerm{"G(Tx,Ty,Tz) <= r G(Sx,Sy,Sz)", gt, gs, 0.0}};
  }
  const double mixed = g(tr.t(x, Role::A), sy, kz);
  return {RatioTerm{"G(Tx,Sy,Kz) <= r G(Kx,Ky,Kz) + (1-r) G(A,B,C)", mixed, gk, gabc},
          RatioTerm{"G(Sx,Sy,Sz) <= r G(Tx,Sy,Kz)", gs, mixed, 0.0}};
}

inline void record(Certificate& c, Witness w) {
  c.passed = false;
  if (c.witnesses.size() < 8) c.witnesses.push_back(std::move(w));
}

/// Max-merges per-sample ratio constraints into r̂.
inline Certificate ratio_certificate(CertificateKind kind, std::span<const Triple> samples, double tol,
                                     const std::function<std::array<RatioTerm, 2>(const Triple&)>& terms) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "no samples");
  Certificate c;
  c.kind = kind;
  double r_hat = 0.0;
  bool forced = false;
  for (const auto& p : samples) {
    bool used = false;
    for (const auto& t : terms(p)) {
      const double num = t.lhs - t.offset, den = t.den - t.offset;
      const double eps = tol * (1.0 + std::max(std::abs(t.lhs), std::abs(t.den)));
      c.max_lhs = std::max(c.max_lhs, t.lhs);
      if (std::abs(num) <= eps && std::abs(den) <= eps) continue;
      used = true;
      if (den <= eps) {
        if (num > eps) {
          forced = true;
          record(c, Witness{t.relation, {p[0], p[1], p[2]}, t.lhs, t.den});
        }
        continue;
      }
      const double ratio = num / den;
      r_hat = std::max(r_hat, ratio);
      if (ratio >= 1.0) {
        forced = true;
        record(c, Witness{t.relation, {p[0], p[1], p[2]}, t.lhs, t.den});
      }
    }
    if (used) {
      ++c.samples_used;
    } else {
      ++c.samples_skipped;
    }
  }
  if (forced) r_hat = std::max(r_hat, 1.0);
  c.constant = r_hat;
  c.margin = 1.0 - r_hat;
  c.passed = !forced && r_hat < 1.0;
  return c;
}

}  // namespace detail

/// r̂ for G(Sx,Sy,Sz) <= r G(Kx,Ky,Kz) + (1-r) G(A,B,C) and
/// G(Tx,Ty,Tz) <= r G(Sx,Sy,Sz) over the samples.
inline Certificate certify_tripartite_contraction(const RlnTriple& tr, std::span<const Triple> samples,
                                                  double tol = kDefaultTol) {
  return detail::ratio_certificate(CertificateKind::contraction, samples, tol,
                                   [&](const Triple& p) { return detail::contraction_terms(tr, p, false); });
}

/// r̂ for G(Tx,Sy,Kz) <= r G(Kx,Ky,Kz) + (1-r) G(A,B,C) and
/// G(Sx,Sy,Sz) <= r G(Tx,Sy,Kz) over the samples.
inline Certificate certify_semi_contraction(const RlnTriple& tr, std::span<const Triple> samples,
                                            double tol = kDefaultTol) {
  return detail::ratio_certificate(CertificateKind::semi_contraction, samples, tol,
                                   [&](const Triple& p) { return detail::contraction_terms(tr, p, true); });
}

/// Both inequalities of the given kind at a fixed r.
inline Certificate check_contraction_at(const RlnTriple& tr, CertificateKind kind, double r,
                                        std::span<const Triple> samples, double tol = kDefaultTol) {
  if (kind != CertificateKind::contraction && kind != CertificateKind::semi_contraction) {
    throw Error(ErrorCode::invalid_argument, "fixed-r check needs a contraction kind");
  }
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::invalid_argument, "r must lie in (0, 1)");
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "no samples");
  Certificate c;
  c.kind = kind;
  c.constant = r;
  c.margin = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    for (const auto& t : detail::contraction_terms(tr, p, kind == CertificateKind::semi_contraction)) {
      const double rhs = r * t.den + (1.0 - r) * t.offset;
      c.max_lhs = std::max(c.max_lhs, t.lhs);
      c.margin = std::min(c.margin, rhs - t.lhs);
      if (excess(t.lhs, rhs, tol) > 0.0) detail::record(c, Witness{t.relation, {p[0], p[1], p[2]}, t.lhs, rhs});
    }
    ++c.samples_used;
  }
  return c;
}

/// ĉ = max G(Sx,Sy,Sz) / G(x,y,z) over samples with G(x,y,z) > tol.
inline Certificate certify_left_cyclic_contraction(const SelfMap& s, const GMetric& g,
                                                   std::span<const Triple> samples, double tol = kDefaultTol) {
  Certificate c;
  c.kind = CertificateKind::left_cyclic_contraction;
  double r_hat = 0.0;
  for (const auto& p : samples) {
    const double den = g(p[0], p[1], p[2]);
    if (den <= tol) {
      ++c.samples_skipped;
      continue;
    }
    const double num = g(s(p[0], Role::A), s(p[1], Role::B), s(p[2], Role::C));
    c.max_lhs = std::max(c.max_lhs, num);
    const double ratio = num / den;
    r_hat = std::max(r_hat, ratio);
    if (ratio >= 1.0) detail::record(c, Witness{"G(Sx,Sy,Sz) <= r G(x,y,z)", {p[0], p[1], p[2]}, num, den});
    ++c.samples_used;
  }
  if (c.samples_used == 0) throw Error(ErrorCode::all_samples_degenerate, "every sample has G(x,y,z) <= tol");
  c.constant = r_hat;
  c.margin = 1.0 - r_hat;
  c.passed = r_hat < 1.0;
  return c;
}

/// ĉ = max G(x,y,z) / G(Kx,Ky,Kz); a sample with vanishing denominator and
/// positive numerator makes the constant unbounded.
inline Certificate certify_anti_lipschitz(const SelfMap& k, const GMetric& g, std::span<const Triple> samples,
                                          double tol = kDefaultTol) {
  if (samples.empty()) throw Error(ErrorCode::empty_sample_set, "no samples");
  Certificate c;
  c.kind = CertificateKind::anti_lipschitz;
  double c_hat = 0.0;
  for (const auto& p : samples) {
    const double num = g(p[0], p[1], p[2]);
    const double den = g(k(p[0], Role::A), k(p[1], Role::B), k(p[2], Role::C));
    c.max_lhs = std::max(c.max_lhs, num);
    if (den <= tol) {
      if (num > tol) {
        detail::record(c, Witness{"G(x,y,z) <= c G(Kx,Ky,Kz)", {p[0], p[1], p[2]}, num, den});
      } else {
        ++c.samples_skipped;
      }
      continue;
    }
    c_hat = std::max(c_hat, num / den);
    ++c.samples_used;
  }
  if (c.passed) {
    c.constant = c_hat;
    c.margin = 0.0;
  } else {
    c.margin = -std::numeric_limits<double>::infinity();
  }
  return c;
}

/// d_G(K(Sx), S(Kx)) <= tol on the tagged samples; the outer map is
/// evaluated on the region the inner map sends x to.
inline Certificate check_commuting(const SelfMap& s, const SelfMap& k, const GMetric& g,
                                   std::span<const std::pair<Point, Role>> samples, double tol = kDefaultTol) {
  Certificate c;
  c.kind = CertificateKind::commuting;
  double worst = 0.0;
  for (const auto& [x, from] : samples) {
    const Point ks = k(s(x, from), image_role(s.label(), from));
    const Point sk = s(k(x, from), image_role(k.label(), from));
    const double d = g(ks, sk, sk) + g(ks, ks, sk);
    worst = std::max(worst, d);
    if (d > tol) detail::record(c, Witness{"K(Sx) = S(Kx)", {x, ks, sk}, d, tol});
    ++c.samples_used;
  }
  c.margin = 0.0 - worst;
  return c;
}

/// One inclusion F(P) ⊆ H(Q): for each sampled x in P some q in Q has
/// H(q) = F(x).
struct Inclusion {
  MapLabel outer;
  Role from;
  MapLabel inner;
  Role to;
};

inline constexpr Inclusion kInclusionChain[] = {
    {MapLabel::T, Role::A, MapLabel::S, Role::C}, {MapLabel::S, Role::C, MapLabel::K, Role::B},
    {MapLabel::T, Role::B, MapLabel::S, Role::A}, {MapLabel::S, Role::A, MapLabel::K, Role::C},
    {MapLabel::T, Role::C, MapLabel::S, Role::B}, {MapLabel::S, Role::B, MapLabel::K, Role::A},
};

inline std::string describe(const Inclusion& inc) {
  return std::string(to_string(inc.outer)) + "(" + to_string(inc.from) + ") in " + to_string(inc.inner) + "(" +
         to_string(inc.to) + ")";
}

/// T(A) ⊆ S(C) ⊆ K(B), T(B) ⊆ S(A) ⊆ K(C), T(C) ⊆ S(B) ⊆ K(A), each checked
/// by solving for a preimage of every sampled image.
inline Certificate check_inclusion_chain(const RlnTriple& tr, std::size_t per_region, std::uint64_t seed = 0,
                                         const SolveConfig& cfg = {}) {
  Certificate c;
  c.kind = CertificateKind::inclusion_chain;
  double worst = 0.0;
  for (const auto& inc : kInclusionChain) {
    const SelfMap& f = tr.map(inc.outer);
    const SelfMap& h = tr.map(inc.inner);
    for (const auto& x : tr.regions[inc.from].sample(per_region, mix_seed(seed, static_cast<std::uint64_t>(inc.from)))) {
      const Point y = f(x, inc.from);
      const auto sols = preimages(h, y, tr.regions[inc.to], inc.to, cfg);
      ++c.samples_used;
      if (sols.empty()) {
        worst = std::numeric_limits<double>::infinity();
        detail::record(c, Witness{describe(inc), {x, y}, 0.0, 0.0});
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : sols) best = std::min(best, max_coord_gap(h(q, inc.to), y));
      worst = std::max(worst, best);
    }
  }
  c.margin = 0.0 - worst;
  return c;
}

/// Re-evaluates a contraction or semi-contraction witness: true when the
/// sample still forces r >= 1 (beyond tol).
inline bool replay_contraction_witness(const RlnTriple& tr, CertificateKind kind, const Witness& w,
                                       double tol = kDefaultTol) {
  if (w.points.size() != 3) return false;
  const Triple p{w.points[0], w.points[1], w.points[2]};
  for (const auto& t : detail::contraction_terms(tr, p, kind == CertificateKind::semi_contraction)) {
    if (t.relation != w.relation) continue;
    const double num = t.lhs - t.offset, den = t.den - t.offset;
    const double eps = tol * (1.0 + std::max(std::abs(t.lhs), std::abs(t.den)));
    return num > eps && num >= den - eps;
  }
  return false;
}

}  // namespace gmetric
