#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gmetric/error.hpp"
#include "gmetric/expr.hpp"
#include "gmetric/mapping.hpp"
#include "gmetric/metric.hpp"
#include "gmetric/region.hpp"
#include "gmetric/selfmap.hpp"

namespace gmetric {

/// Regression values a scenario is expected to reproduce.
struct Expected {
  std::optional<CertificateKind> kind;
  std::optional<double> r;
  std::optional<double> gabc;
  std::optional<double> p;
  std::optional<double> c;
};

struct OrbitSettings {
  bool enabled = true;
  std::optional<double> x0;  // defaults to the right end of A
  std::size_t max_steps = 200;
};

/// A parsed and validated scenario file.
///
///   [space]     dimension = 1, metric = abs, g = sum | max, scale = <real>
///   [regions]   A, B, C = interval list "[0, 1], [2, 3]", point set
///               "{0, 1, 2}" or "lattice(offset, period, n_min, n_max)"
///   [maps]      T, S, K = expressions in x
///   [orbit]     enabled, x0, max_steps
///   [expected]  kind, r, gabc, p, c
///
/// Numbers may be constant expressions such as "3*pi" or "5/6".
struct Scenario {
  std::string name;
  std::size_t dimension = 1;
  std::string metric = "abs";
  std::string g_kind = "sum";
  double scale = 1.0;
  std::array<std::string, 3> region_text;
  std::array<std::string, 3> map_text;
  std::array<Expr, 3> maps;
  OrbitSettings orbit;
  std::optional<Expected> expected;

  GMetric g() const {
    return g_kind == "max" ? g_from_metric_max(Metric::absolute()) : g_from_metric_sum(Metric::absolute(), scale);
  }

  Regions regions() const;
  SelfMap map(MapLabel l) const;
  /// The triple with G(A,B,C) left unset; see run_scenario.
  RlnTriple triple(DistanceEstimate gabc = {}) const {
    return RlnTriple{map(MapLabel::T), map(MapLabel::S), map(MapLabel::K), regions(), g(), std::move(gabc)};
  }
  double x0() const { return orbit.x0.value_or(regions().a.bounds().hi.x()); }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] inline void invalid(const std::string& what) { throw Error(ErrorCode::validation_error, what); }

inline bool mentions_x(const Expr& e) {
  if (e.kind == Expr::Kind::var) return true;
  for (const auto& a : e.args)
    if (mentions_x(a)) return true;
  for (const auto& b : e.branches)
    if (mentions_x(b.body[0])) return true;
  return false;
}

/// Value of a constant expression such as "3*pi".
inline double constant(const std::string& text, const std::string& where) {
  Expr e;
  try {
    e = parse_expr(text);
  } catch (const SyntaxError& err) {
    throw Error(ErrorCode::parse_error, where + ": " + err.what());
  }
  if (e.kind == Expr::Kind::piecewise || mentions_x(e)) invalid(where + ": expected a constant, got '" + text + "'");
  const double v = eval_expr(e, 0.0);
  if (!std::isfinite(v)) invalid(where + ": value is not finite");
  return v;
}

/// Splits on commas outside parentheses.
inline std::vector<std::string> split_top(std::string_view s) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

inline Region parse_region(const std::string& label, const std::string& text) {
  const std::string where = "region " + label;
  if (text.empty()) invalid(where + " is empty");
  if (text.front() == '{') {
    if (text.back() != '}') invalid(where + ": unterminated point set");
    std::vector<double> xs;
    for (const auto& item : split_top(std::string_view(text).substr(1, text.size() - 2))) {
      xs.push_back(constant(item, where));
    }
    return Region::points(label, xs);
  }
  if (text.rfind("lattice", 0) == 0) {
    const auto open = text.find('('), close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      invalid(where + ": expected lattice(offset, period, n_min, n_max)");
    }
    const auto args = split_top(std::string_view(text).substr(open + 1, close - open - 1));
    if (args.size() != 4) invalid(where + ": lattice takes four arguments");
    const double n_min = constant(args[2], where), n_max = constant(args[3], where);
    if (n_min != std::floor(n_min) || n_max != std::floor(n_max) || n_max < n_min) {
      invalid(where + ": lattice bounds must be integers with n_min <= n_max");
    }
    const double period = constant(args[1], where);
    if (!(period > 0.0)) invalid(where + ": lattice period must be positive");
    return Region::lattice(label, constant(args[0], where), period, static_cast<long>(n_min),
                           static_cast<long>(n_max));
  }
  std::vector<Interval> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ' || text[i] == ',' || text[i] == '\t') {
      ++i;
      continue;
    }
    if (text[i] != '[') invalid(where + ": expected '[' at '" + text.substr(i) + "'");
    const auto close = text.find(']', i);
    if (close == std::string::npos) invalid(where + ": unterminated interval");
    const auto ends = split_top(std::string_view(text).substr(i + 1, close - i - 1));
    if (ends.size() != 2) invalid(where + ": an interval needs two endpoints");
    const double lo = constant(ends[0], where), hi = constant(ends[1], where);
    if (lo > hi) invalid(where + ": interval endpoints out of order");
    parts.push_back({lo, hi});
    i = close + 1;
  }
  if (parts.empty()) invalid(where + " is empty");
  return Region::intervals(label, parts);
}

inline std::optional<CertificateKind> parse_kind(const std::string& v) {
  if (v == "contraction") return CertificateKind::contraction;
  if (v == "semi_contraction") return CertificateKind::semi_contraction;
  return std::nullopt;
}

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  invalid(where + ": expected true or false");
}

}  // namespace detail

inline Regions Scenario::regions() const {
  return Regions{detail::parse_region("A", region_text[0]), detail::parse_region("B", region_text[1]),
                 detail::parse_region("C", region_text[2])};
}

inline SelfMap Scenario::map(MapLabel l) const {
  const auto i = static_cast<std::size_t>(l);
  return SelfMap::by_role(
      l, [e = maps[i]](double x, Role r) { return eval_expr(e, x, r); }, map_text[i]);
}

/// Parses scenario text; `name` labels the result.
inline Scenario parse_scenario(std::string_view text, std::string name) {
  static const std::map<std::string, std::set<std::string>> kKeys{
      {"space", {"dimension", "metric", "g", "scale"}},
      {"regions", {"A", "B", "C"}},
      {"maps", {"T", "S", "K"}},
      {"orbit", {"enabled", "x0", "max_steps"}},
      {"expected", {"kind", "r", "gabc", "p", "c"}},
  };
  std::map<std::string, std::map<std::string, std::string>> values;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      if (!kKeys.count(section)) detail::parse_fail(line_no, "unknown section [" + section + "]");
      if (values.count(section)) detail::parse_fail(line_no, "duplicate section [" + section + "]");
      values[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) detail::parse_fail(line_no, "expected 'key = value'");
    if (section.empty()) detail::parse_fail(line_no, "key outside of a section");
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (!kKeys.at(section).count(key)) detail::invalid("unknown key '" + key + "' in [" + section + "]");
    if (values[section].count(key)) detail::parse_fail(line_no, "duplicate key '" + key + "'");
    if (value.empty()) detail::parse_fail(line_no, "empty value for '" + key + "'");
    values[section][key] = value;
  }

  Scenario s;
  s.name = std::move(name);
  auto get = [&](const std::string& sec, const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(sec);
    if (it == values.end()) return std::nullopt;
    const auto jt = it->second.find(key);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  };

  if (auto v = get("space", "dimension")) {
    const double d = detail::constant(*v, "dimension");
    if (d != 1.0) detail::invalid("only dimension 1 is supported by scenario files");
  }
  if (auto v = get("space", "metric")) {
    if (*v != "abs") detail::invalid("unknown metric '" + *v + "' (expected abs)");
    s.metric = *v;
  }
  if (auto v = get("space", "g")) {
    if (*v != "sum" && *v != "max") detail::invalid("g must be sum or max");
    s.g_kind = *v;
  }
  if (auto v = get("space", "scale")) {
    if (s.g_kind != "sum") detail::invalid("scale applies only to g = sum");
    s.scale = detail::constant(*v, "scale");
    if (!(s.scale > 0.0)) detail::invalid("scale must be positive");
  }

  static constexpr const char* kRegionKeys[] = {"A", "B", "C"};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = get("regions", kRegionKeys[i]);
    if (!v) detail::invalid(std::string("region ") + kRegionKeys[i] + " is not defined");
    s.region_text[i] = *v;
  }
  static constexpr const char* kMapKeys[] = {"T", "S", "K"};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = get("maps", kMapKeys[i]);
    if (!v) detail::invalid(std::string("map ") + kMapKeys[i] + " is not defined");
    s.map_text[i] = *v;
    try {
      s.maps[i] = parse_expr(*v);
    } catch (const SyntaxError& e) {
      throw Error(ErrorCode::parse_error, std::string("map ") + kMapKeys[i] + ": " + e.what());
    }
  }
  const Regions regions = s.regions();

  if (auto v = get("orbit", "enabled")) s.orbit.enabled = detail::parse_bool(*v, "orbit.enabled");
  if (auto v = get("orbit", "x0")) {
    s.orbit.x0 = detail::constant(*v, "orbit.x0");
    if (!regions.a.contains(Point(*s.orbit.x0))) detail::invalid("orbit.x0 is not in A");
  }
  if (auto v = get("orbit", "max_steps")) {
    const double m = detail::constant(*v, "orbit.max_steps");
    if (m < 3 || m != std::floor(m)) detail::invalid("orbit.max_steps must be an integer >= 3");
    s.orbit.max_steps = static_cast<std::size_t>(m);
  }

  if (values.count("expected")) {
    Expected e;
    if (auto v = get("expected", "kind")) {
      e.kind = detail::parse_kind(*v);
      if (!e.kind) detail::invalid("expected.kind must be contraction or semi_contraction");
    }
    if (auto v = get("expected", "r")) e.r = detail::constant(*v, "expected.r");
    if (auto v = get("expected", "gabc")) e.gabc = detail::constant(*v, "expected.gabc");
    if (auto v = get("expected", "p")) e.p = detail::constant(*v, "expected.p");
    if (auto v = get("expected", "c")) e.c = detail::constant(*v, "expected.c");
    if (e.r && !e.kind) detail::invalid("expected.r needs expected.kind");
    s.expected = e;
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::parse_error, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return parse_scenario(ss.str(), name);
}

/// Scenario file text equivalent to `s`.
inline std::string to_text(const Scenario& s) {
  std::ostringstream out;
  out << "[space]\ndimension = 1\nmetric = " << s.metric << "\ng = " << s.g_kind << "\n";
  if (s.g_kind == "sum") out << "scale = " << to_string(Expr::num(s.scale)) << "\n";
  out << "\n[regions]\nA = " << s.region_text[0] << "\nB = " << s.region_text[1] << "\nC = " << s.region_text[2]
      << "\n\n[maps]\nT = " << s.map_text[0] << "\nS = " << s.map_text[1] << "\nK = " << s.map_text[2] << "\n";
  out << "\n[orbit]\nenabled = " << (s.orbit.enabled ? "true" : "false") << "\n";
  if (s.orbit.x0) out << "x0 = " << to_string(Expr::num(*s.orbit.x0)) << "\n";
  out << "max_steps = " << s.orbit.max_steps << "\n";
  if (s.expected) {
    const auto& e = *s.expected;
    out << "\n[expected]\n";
    if (e.kind) out << "kind = " << to_string(*e.kind) << "\n";
    const std::pair<const char*, const std::optional<double>*> fields[] = {
        {"r", &e.r}, {"gabc", &e.gabc}, {"p", &e.p}, {"c", &e.c}};
    for (const auto& [key, val] : fields) {
      if (*val) out << key << " = " << to_string(Expr::num(**val)) << "\n";
    }
  }
  return out.str();
}

/// Scenario texts compiled into the library.
inline const std::map<std::string, std::string>& builtin_scenario_texts() {
  static const std::map<std::string, std::string> kTexts{
      {"sine_34", R"(# T = sin(x)/4, S = sin(x)/2, K = identity under the perimeter G
[space]
g = sum
scale = 1

[regions]
A = [0, 1]
B = [0, 2]
C = [0, 3]

[maps]
T = 0.25*sin(x)
S = 0.5*sin(x)
K = x

[orbit]
x0 = 1

[expected]
kind = contraction
r = 0.75
gabc = 0
p = 0
c = 2
)"},
      {"sine_56", R"(# T = sin(x)/3, S = x/2, K = identity under the perimeter G
[space]
g = sum
scale = 1

[regions]
A = [0, 1]
B = [0, 2]
C = [0, 3]

[maps]
T = sin(x)/3
S = 0.5*x
K = x

[orbit]
x0 = 1

[expected]
kind = contraction
r = 5/6
gabc = 0
p = 0
c = 2
)"},
      {"affine_13", R"(# Affine maps on the lattices 3n pi, 3n pi + pi, 3n pi + 2 pi (n = 1..10)
[space]
g = sum
scale = 1

[regions]
A = lattice(0, 3*pi, 1, 10)
B = lattice(pi, 3*pi, 1, 10)
C = lattice(2*pi, 3*pi, 1, 10)

[maps]
T = x + pi
S = 4*x + 2*pi
K = 12*x + 3*pi

[orbit]
enabled = false

[expected]
kind = contraction
r = 1/3
gabc = 4*pi
)"},
      {"semi_trivial", R"(# T = S = 0, K = identity on A and B and 0 on C
[space]
g = sum
scale = 1

[regions]
A = [0, 1]
B = [0, 2]
C = [0, 3]

[maps]
T = 0
S = 0
K = on A,B: x; else: 0

[orbit]
x0 = 1

[expected]
kind = semi_contraction
r = 0.5
gabc = 0
p = 0
)"},
      {"semi_max_half", R"(# Max G; S = x/4 on C and 0 elsewhere, K = x/2
[space]
g = max

[regions]
A = [0, 1]
B = [-1, 0]
C = [0, 1]

[maps]
T = 0
S = on C: 0.25*x; else: 0
K = 0.5*x

[orbit]
x0 = 1

[expected]
kind = semi_contraction
r = 0.5
gabc = 0
p = 0
c = 3
)"},
      {"semi_max_sine", R"(# Max G; S = sin(x)/2 on C and 0 elsewhere, K = identity
[space]
g = max

[regions]
A = [0, 1]
B = [-1, 0]
C = [0, 1]

[maps]
T = 0
S = on C: 0.5*sin(x); else: 0
K = x

[orbit]
x0 = 1

[expected]
kind = semi_contraction
r = 0.5
gabc = 0
p = 0
c = 3
)"},
  };
  return kTexts;
}

inline std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : builtin_scenario_texts()) out.push_back(name);
  return out;
}

inline Scenario builtin_scenario(const std::string& name) {
  const auto& texts = builtin_scenario_texts();
  const auto it = texts.find(name);
  if (it == texts.end()) throw Error(ErrorCode::invalid_argument, "no built-in scenario named " + name);
  return parse_scenario(it->second, name);
}

}  // namespace gmetric
