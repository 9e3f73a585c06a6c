#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "gmetric/error.hpp"
#include "gmetric/region.hpp"

namespace gmetric {

/// Expression tree for scalar maps of one variable x.
///
///   program   := piecewise | expr
///   piecewise := branch (';' branch)* [';']
///   branch    := 'on' label (',' label)* ':' expr | 'else' ':' expr
///   expr      := term (('+' | '-') term)*
///   term      := unary (('*' | '/') unary)*
///   unary     := '-' unary | primary
///   primary   := number | 'x' | 'pi' | '(' expr ')'
///              | ('sin' | 'cos' | 'abs') '(' expr ')'
///              | ('min' | 'max') '(' expr ',' expr ')'
struct Expr {
  enum class Kind { num, var, pi, neg, add, sub, mul, div, sin, cos, abs, min, max, piecewise };

  struct Branch {
    std::vector<Role> labels;  // empty for the else branch
    std::vector<Expr> body;    // exactly one element
    bool operator==(const Branch&) const = default;
  };

  Kind kind = Kind::num;
  double value = 0.0;
  std::vector<Expr> args;
  std::vector<Branch> branches;

  bool operator==(const Expr&) const = default;

  static Expr num(double v) { return Expr{Kind::num, v, {}, {}}; }
  static Expr var() { return Expr{Kind::var, 0.0, {}, {}}; }
  static Expr unary(Kind k, Expr a) { return Expr{k, 0.0, {std::move(a)}, {}}; }
  static Expr binary(Kind k, Expr a, Expr b) { return Expr{k, 0.0, {std::move(a), std::move(b)}, {}}; }
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr program() {
    skip();
    if (peek_word() == "on" || peek_word() == "else") return piecewise();
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail({"+", "-", "*", "/", "end of input"}, "unexpected input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    throw SyntaxError(pos_, std::move(expected), what);
  }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail({std::string(1, c)}, std::string("expected '") + c + "'");
  }

  std::string_view peek_word() {
    skip();
    std::size_t e = pos_;
    while (e < s_.size() && std::isalpha(static_cast<unsigned char>(s_[e]))) ++e;
    return s_.substr(pos_, e - pos_);
  }

  Expr piecewise() {
    Expr out;
    out.kind = Expr::Kind::piecewise;
    bool seen_else = false;
    while (true) {
      skip();
      if (pos_ == s_.size()) break;
      if (seen_else) fail({"end of input"}, "branch after else");
      Expr::Branch br;
      const auto word = peek_word();
      if (word == "on") {
        pos_ += 2;
        do {
          skip();
          if (pos_ < s_.size() && (s_[pos_] == 'A' || s_[pos_] == 'B' || s_[pos_] == 'C') &&
              (pos_ + 1 == s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
            br.labels.push_back(s_[pos_] == 'A' ? Role::A : s_[pos_] == 'B' ? Role::B : Role::C);
            ++pos_;
          } else {
            fail({"A", "B", "C"}, "expected region label");
          }
        } while (eat(','));
      } else if (word == "else") {
        pos_ += 4;
        seen_else = true;
      } else {
        fail({"on", "else"}, "expected branch");
      }
      expect(':');
      br.body.push_back(expr());
      out.branches.push_back(std::move(br));
      skip();
      if (pos_ == s_.size()) break;
      if (!eat(';')) fail({";", "+", "-", "*", "/", "end of input"}, "expected ';'");
    }
    return out;
  }

  Expr expr() {
    Expr lhs = term();
    while (true) {
      if (eat('+')) {
        lhs = Expr::binary(Expr::Kind::add, std::move(lhs), term());
      } else if (eat('-')) {
        lhs = Expr::binary(Expr::Kind::sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    while (true) {
      if (eat('*')) {
        lhs = Expr::binary(Expr::Kind::mul, std::move(lhs), unary());
      } else if (eat('/')) {
        lhs = Expr::binary(Expr::Kind::div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (eat('-')) return Expr::unary(Expr::Kind::neg, unary());
    return primary();
  }

  Expr primary() {
    static const std::vector<std::string> kStart{"number", "x", "pi", "(", "-", "sin", "cos", "abs", "min", "max"};
    skip();
    if (pos_ == s_.size()) fail(kStart, "unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    const auto word = peek_word();
    const std::size_t at = pos_;
    if (word == "x") {
      pos_ += 1;
      return Expr::var();
    }
    if (word == "pi") {
      pos_ += 2;
      return Expr{Expr::Kind::pi, 0.0, {}, {}};
    }
    const std::pair<std::string_view, Expr::Kind> unary_fns[] = {
        {"sin", Expr::Kind::sin}, {"cos", Expr::Kind::cos}, {"abs", Expr::Kind::abs}};
    for (const auto& [name, kind] : unary_fns) {
      if (word == name) {
        pos_ += name.size();
        expect('(');
        Expr a = expr();
        expect(')');
        return Expr::unary(kind, std::move(a));
      }
    }
    if (word == "min" || word == "max") {
      pos_ += 3;
      expect('(');
      Expr a = expr();
      expect(',');
      Expr b = expr();
      expect(')');
      return Expr::binary(word == "min" ? Expr::Kind::min : Expr::Kind::max, std::move(a), std::move(b));
    }
    pos_ = at;
    fail(kStart, "unexpected token");
  }

  Expr number() {
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
    if (ec != std::errc() || !std::isfinite(v)) fail({"number"}, "malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return Expr::num(v);
  }
};

inline int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    case Expr::Kind::neg: return 3;
    default: return 4;
  }
}

inline void print_to(const Expr& e, std::string& out);

inline void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print_to(e, out);
    out += ')';
  } else {
    print_to(e, out);
  }
}

inline void print_to(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::num: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, e.value);
      out.append(buf, res.ptr);
      return;
    }
    case K::var: out += 'x'; return;
    case K::pi: out += "pi"; return;
    case K::neg:
      out += '-';
      print_child(e.args[0], 3, out);
      return;
    case K::add:
    case K::sub:
    case K::mul:
    case K::div: {
      const int p = precedence(e);
      const char* op = e.kind == K::add ? " + " : e.kind == K::sub ? " - " : e.kind == K::mul ? " * " : " / ";
      print_child(e.args[0], p, out);
      out += op;
      print_child(e.args[1], p + 1, out);
      return;
    }
    case K::sin:
    case K::cos:
    case K::abs:
      out += e.kind == K::sin ? "sin(" : e.kind == K::cos ? "cos(" : "abs(";
      print_to(e.args[0], out);
      out += ')';
      return;
    case K::min:
    case K::max:
      out += e.kind == K::min ? "min(" : "max(";
      print_to(e.args[0], out);
      out += ", ";
      print_to(e.args[1], out);
      out += ')';
      return;
    case K::piecewise:
      for (std::size_t i = 0; i < e.branches.size(); ++i) {
        const auto& br = e.branches[i];
        if (i) out += "; ";
        if (br.labels.empty()) {
          out += "else";
        } else {
          out += "on ";
          for (std::size_t j = 0; j < br.labels.size(); ++j) {
            if (j) out += ',';
            out += to_string(br.labels[j]);
          }
        }
        out += ": ";
        print_to(br.body[0], out);
      }
      return;
  }
}

}  // namespace detail

inline Expr parse_expr(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw SyntaxError(text.size(), {"expression"}, "empty expression");
  }
  return detail::Parser(text).program();
}

inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_to(e, out);
  return out;
}

inline constexpr double kMinDenominator = 1e-300;

/// Value at x; `region` selects the branch of a piecewise expression.
inline double eval_expr(const Expr& e, double x, std::optional<Role> region = std::nullopt) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::num: return e.value;
    case K::var: return x;
    case K::pi: return std::numbers::pi;
    case K::neg: return -eval_expr(e.args[0], x, region);
    case K::add: return eval_expr(e.args[0], x, region) + eval_expr(e.args[1], x, region);
    case K::sub: return eval_expr(e.args[0], x, region) - eval_expr(e.args[1], x, region);
    case K::mul: return eval_expr(e.args[0], x, region) * eval_expr(e.args[1], x, region);
    case K::div: {
      const double num = eval_expr(e.args[0], x, region);
      const double den = eval_expr(e.args[1], x, region);
      if (std::abs(den) < kMinDenominator) throw Error(ErrorCode::division_by_zero, "division by zero");
      return num / den;
    }
    case K::sin: return std::sin(eval_expr(e.args[0], x, region));
    case K::cos: return std::cos(eval_expr(e.args[0], x, region));
    case K::abs: return std::abs(eval_expr(e.args[0], x, region));
    case K::min: return std::min(eval_expr(e.args[0], x, region), eval_expr(e.args[1], x, region));
    case K::max: return std::max(eval_expr(e.args[0], x, region), eval_expr(e.args[1], x, region));
    case K::piecewise:
      for (const auto& br : e.branches) {
        if (br.labels.empty() ||
            (region && std::find(br.labels.begin(), br.labels.end(), *region) != br.labels.end())) {
          return eval_expr(br.body[0], x, region);
        }
      }
      throw Error(ErrorCode::unbound_region_label,
                  std::string("no branch for region ") + (region ? to_string(*region) : "(none)"));
  }
  return 0.0;
}

}  // namespace gmetric
