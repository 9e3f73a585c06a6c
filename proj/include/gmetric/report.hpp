#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmetric/axioms.hpp"
#include "gmetric/distance.hpp"
#include "gmetric/error.hpp"
#include "gmetric/mapping.hpp"
#include "gmetric/orbit.hpp"
#include "gmetric/sampling.hpp"
#include "gmetric/scenario.hpp"

namespace gmetric {

using json = nlohmann::json;

struct RunOptions {
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  std::size_t budget = 100000;  // G evaluations for the distance; samples are budget / 10
  bool axioms = true;
  bool distance = true;
  bool certify = true;
  bool orbit = true;
  std::optional<double> x0;
  std::optional<std::size_t> max_steps;
  bool timing = false;  // adds wall_time_ms, which makes reports non-reproducible
};

/// Outcome of run_scenario: the JSON document plus the verdicts the CLI
/// maps to exit codes.
struct RunReport {
  json doc;
  bool certified = false;                // RLN and a passing contraction kind
  std::optional<bool> expected_passed;   // absent without an expected block
  std::optional<std::string> failure;    // stage error, if any
  std::optional<ErrorCode> failure_code;

  std::string dump() const { return doc.dump(2); }
};

inline json to_json(const Point& p) {
  if (p.dim() == 1) return p.x();
  json a = json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

/// Finite numbers as numbers, infinities and NaN as null.
inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Witness& w) {
  json pts = json::array();
  for (const auto& p : w.points) pts.push_back(to_json(p));
  return {{"relation", w.relation}, {"points", pts}, {"lhs", num(w.lhs)}, {"rhs", num(w.rhs)}};
}

inline json to_json(const AxiomReport& r) {
  json props = json::array();
  for (const auto& p : r.properties) {
    json ws = json::array();
    for (const auto& w : p.witnesses) ws.push_back(to_json(w));
    props.push_back({{"name", p.name},
                     {"passed", p.passed},
                     {"checked", p.checked},
                     {"skipped", p.skipped},
                     {"worst_excess", num(p.worst_excess)},
                     {"witnesses", ws}});
  }
  return {{"passed", r.passed()}, {"samples_used", r.samples_used}, {"tolerance", r.tolerance}, {"properties", props}};
}

inline json to_json(const Certificate& c) {
  json ws = json::array();
  for (const auto& w : c.witnesses) ws.push_back(to_json(w));
  return {{"kind", to_string(c.kind)},
          {"passed", c.passed},
          {"constant", c.constant ? num(*c.constant) : json(nullptr)},
          {"margin", num(c.margin)},
          {"samples_used", c.samples_used},
          {"samples_skipped", c.samples_skipped},
          {"max_lhs", num(c.max_lhs)},
          {"witnesses", ws}};
}

inline json to_json(const DistanceEstimate& d) {
  json arg = json::array();
  for (const auto& p : d.argmin) arg.push_back(p.dim() ? to_json(p) : json(nullptr));
  return {{"value", num(d.value)}, {"argmin", arg}, {"budget_used", d.budget_used}, {"refined", d.refined}};
}

inline json to_json(const Orbit& o) {
  json pts = json::array(), tags = json::array();
  for (std::size_t i = 0; i < o.size(); ++i) {
    pts.push_back(to_json(o.points[i]));
    tags.push_back(to_string(o.tags[i]));
  }
  json traces = json::object();
  for (const auto& [name, values] : o.traces) {
    json a = json::array();
    for (double v : values) a.push_back(num(v));
    traces[name] = a;
  }
  return {{"points", pts},
          {"tags", tags},
          {"residuals", o.residuals},
          {"relation_gaps", o.relation_gaps},
          {"traces", traces}};
}

inline json to_json(const ConvergenceReport& c) {
  json out{{"status", to_string(c.status)},
           {"limit", c.limit ? to_json(*c.limit) : json(nullptr)},
           {"limit_index", c.limit_index ? json(*c.limit_index) : json(nullptr)},
           {"final_gap", num(c.final_gap)},
           {"best_iterate", to_json(c.best_iterate)}};
  if (c.rate) {
    out["rate"] = {{"t_ok", c.rate->t_ok},
                   {"k_ok", c.rate->k_ok},
                   {"t_worst_excess", num(c.rate->t_worst_excess)},
                   {"k_worst_excess", num(c.rate->k_worst_excess)}};
  } else {
    out["rate"] = nullptr;
  }
  out["cauchy"] = c.cauchy ? json{{"ok", c.cauchy->ok}, {"tail_max", num(c.cauchy->tail_max)},
                                  {"window", c.cauchy->window}}
                           : json(nullptr);
  out["bounded"] = c.bounded ? json{{"m", num(c.bounded->m)},
                                    {"corollary_ok", c.bounded->corollary_ok},
                                    {"corollary_max", num(c.bounded->corollary_max)},
                                    {"triples_checked", c.bounded->triples_checked}}
                             : json(nullptr);
  return out;
}

namespace detail {

inline constexpr double kLimitTol = 1e-6;

inline json scenario_json(const Scenario& s) {
  json maps{{"T", s.map_text[0]}, {"S", s.map_text[1]}, {"K", s.map_text[2]}};
  json regions{{"A", s.region_text[0]}, {"B", s.region_text[1]}, {"C", s.region_text[2]}};
  return {{"name", s.name}, {"g", s.g_kind}, {"scale", s.scale}, {"regions", regions}, {"maps", maps}};
}

}  // namespace detail

/// Runs the enabled stages in order (axioms, distance, certificates,
/// orbit) and compares against the expected block. A stage error stops
/// the run; the report keeps what was computed and records the failure.
inline RunReport run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  const auto started = std::chrono::steady_clock::now();
  RunReport rep;
  json& doc = rep.doc;
  doc["scenario"] = detail::scenario_json(s);
  doc["seed"] = opt.seed;
  doc["tolerance"] = opt.tol;
  doc["budget"] = opt.budget;
  doc["certificates"] = json::object();
  doc["distance"] = nullptr;
  doc["orbit"] = nullptr;
  doc["convergence"] = nullptr;
  doc["expected_check"] = nullptr;

  const std::size_t samples = std::max<std::size_t>(opt.budget / 10, 1);
  const std::size_t per_region = std::max<std::size_t>(opt.budget / 500, 8);
  std::string stage = "setup";
  std::optional<Certificate> contraction, semi, anti;
  std::optional<DistanceEstimate> gabc;
  std::optional<ConvergenceReport> conv;
  try {
    const Regions regions = s.regions();
    const GMetric g = s.g();
    if (opt.axioms) {
      stage = "axioms";
      const auto quads = sample_quads(regions.hull(), samples, mix_seed(opt.seed, 100));
      AxiomReport r = check_g_axioms(g, quads, opt.tol);
      r.merge(check_derived_properties(g, quads, opt.tol));
      r.merge(check_sandwich(g, quads, opt.tol));
      doc["certificates"]["g_axioms"] = to_json(r);
      doc["certificates"]["g_symmetric"] = check_symmetric(g, quads, opt.tol).symmetric;
    }
    if (opt.distance || opt.certify || opt.orbit) {
      stage = "distance";
      gabc = g_set_distance(g, regions.a, regions.b, regions.c, opt.budget, opt.tol, mix_seed(opt.seed, 200));
      if (opt.distance) doc["distance"] = to_json(*gabc);
    }
    const RlnTriple tr = s.triple(*gabc);
    if (opt.certify) {
      stage = "certify";
      auto& certs = doc["certificates"];
      const Certificate rln = certify_rln(tr, per_region, mix_seed(opt.seed, 300));
      certs["role"] = to_json(rln);
      json roles = json::object();
      for (const SelfMap* m : {&tr.t, &tr.s, &tr.k}) {
        json consistent = json::array();
        for (MapRole r : classify_role(*m, regions, per_region, mix_seed(opt.seed, 300)).consistent) {
          consistent.push_back(to_string(r));
        }
        roles[to_string(m->label())] = consistent;
      }
      certs["roles"] = roles;
      const auto triples = sample_triples(regions, samples, mix_seed(opt.seed, 400));
      contraction = certify_tripartite_contraction(tr, triples, opt.tol);
      semi = certify_semi_contraction(tr, triples, opt.tol);
      anti = certify_anti_lipschitz(tr.k, g, triples, opt.tol);
      certs["contraction"] = to_json(*contraction);
      certs["semi_contraction"] = to_json(*semi);
      certs["anti_lipschitz"] = to_json(*anti);
      const Role ac[] = {Role::A, Role::C};
      const auto tagged = sample_tagged(regions, ac, per_region, mix_seed(opt.seed, 500));
      certs["commuting"] = to_json(check_commuting(tr.s, tr.k, g, tagged, opt.tol));
      stage = "inclusion_chain";
      certs["inclusion_chain"] = to_json(check_inclusion_chain(tr, per_region, mix_seed(opt.seed, 600)));
      rep.certified = rln.passed && (contraction->passed || semi->passed);
    }
    if (opt.orbit && s.orbit.enabled) {
      stage = "orbit";
      SolveConfig cfg;
      cfg.max_steps = opt.max_steps.value_or(s.orbit.max_steps);
      std::optional<double> r;
      const bool prefer_semi = s.expected && s.expected->kind == CertificateKind::semi_contraction;
      const auto& first = prefer_semi ? semi : contraction;
      const auto& second = prefer_semi ? contraction : semi;
      if (first && first->passed) {
        r = first->constant;
      } else if (!s.expected && second && second->passed) {
        r = second->constant;
      } else if (s.expected && s.expected->r && *s.expected->r < 1.0) {
        r = s.expected->r;
      }
      conv = find_coincidence_point(tr, Point(opt.x0.value_or(s.x0())), cfg, r, opt.tol);
      doc["orbit"] = to_json(conv->orbit);
      doc["convergence"] = to_json(*conv);
      doc["convergence"]["rate_r"] = r ? json(*r) : json(nullptr);
    }
  } catch (const Error& e) {
    rep.failure = e.what();
    rep.failure_code = e.code();
    doc["failure"] = {{"stage", stage}, {"code", to_string(e.code())}, {"message", e.what()}};
  }

  if (s.expected && opt.certify) {
    const Expected& e = *s.expected;
    json checks = json::array();
    bool all = true;
    auto add = [&](const char* name, double expected, std::optional<double> actual, bool ok) {
      checks.push_back({{"name", name},
                        {"expected", num(expected)},
                        {"actual", actual ? num(*actual) : json(nullptr)},
                        {"passed", ok}});
      all = all && ok;
    };
    if (e.r) {
      const auto& cert = *e.kind == CertificateKind::contraction ? contraction : semi;
      const std::optional<double> got = cert ? cert->constant : std::nullopt;
      add("r", *e.r, got, got && *got <= *e.r + opt.tol);
    }
    if (e.gabc) {
      const std::optional<double> got = gabc ? std::optional<double>(gabc->value) : std::nullopt;
      add("gabc", *e.gabc, got, got && std::abs(*got - *e.gabc) <= opt.tol * (1.0 + std::abs(*e.gabc)));
    }
    if (e.c) {
      const std::optional<double> got = anti ? anti->constant : std::nullopt;
      add("c", *e.c, got, got && *got <= *e.c + opt.tol);
    }
    if (e.p && s.orbit.enabled && opt.orbit) {
      const std::optional<double> got = conv && conv->limit ? std::optional<double>(conv->limit->x()) : std::nullopt;
      add("p", *e.p, got, got && std::abs(*got - *e.p) <= detail::kLimitTol);
    }
    doc["expected_check"] = {{"passed", all}, {"checks", checks}};
    rep.expected_passed = all;
  }
  doc["certified"] = rep.certified;
  if (opt.timing) {
    doc["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  }
  return rep;
}

/// One named trace as CSV with an index,value header.
inline std::string trace_csv(const std::vector<double>& values) {
  std::ostringstream out;
  out << "index,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
  return out.str();
}

}  // namespace gmetric
