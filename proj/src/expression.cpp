#include "twistcal/expression.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "twistcal/errors.hpp"

namespace twistcal {
namespace detail {

enum class Op { literal, variable, add, sub, mul, div, pow, neg, exp, log, sin, cos, sinh, cosh, sqrt, atan };

struct Node {
  Op op = Op::literal;
  double literal = 0.0;
  std::size_t variable = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

}  // namespace detail

namespace {

using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 8> kFunctions{{{"exp", Op::exp},
                                                  {"log", Op::log},
                                                  {"sin", Op::sin},
                                                  {"cos", Op::cos},
                                                  {"sinh", Op::sinh},
                                                  {"cosh", Op::cosh},
                                                  {"sqrt", Op::sqrt},
                                                  {"atan", Op::atan}}};

std::string_view op_name(Op op) {
  switch (op) {
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
    case Op::pow: return "pow";
    case Op::neg: return "neg";
    default: break;
  }
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "?";
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shortbuf[32];
    std::snprintf(shortbuf, sizeof shortbuf, "%.*g", prec, v);
    if (std::strtod(shortbuf, nullptr) == v) return shortbuf;
  }
  return buf;
}

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::literal;
  n->literal = v;
  return n;
}

NodePtr make_node(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars,
         const std::map<std::string, double>& constants)
      : text_(text), vars_(vars), constants_(constants) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input", {"+", "-", "*", "/", "^", "end of input"});
    return root;
  }

 private:
  std::string_view text_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& constants_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": " + what;
    if (!expected.empty()) {
      msg += "; expected one of:";
      for (const auto& e : expected) msg += " '" + e + "'";
    }
    throw ParseError(ParseError::Kind::syntax, pos_, msg, std::move(expected));
  }

  static std::vector<std::string> operand_tokens() { return {"number", "identifier", "(", "-"}; }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make_node(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(Op::neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_node(Op::pow, base, unary());
    return base;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input", operand_tokens());
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("missing closing parenthesis", {")"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (ident_start(c)) return identifier();
    fail(std::string("unexpected character '") + c + "'", operand_tokens());
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number", {"number"});
    }
    return make_literal(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      for (const auto& f : kFunctions) {
        if (f.name == name) {
          ++pos_;
          NodePtr arg = expr();
          if (!accept(')')) fail("missing closing parenthesis", {")"});
          return make_node(f.op, arg);
        }
      }
      std::vector<std::string> names;
      for (const auto& f : kFunctions) names.emplace_back(f.name);
      throw ParseError(ParseError::Kind::unknown_identifier, start,
                       "unknown function '" + name + "' at offset " + std::to_string(start), std::move(names));
    }
    for (const auto& f : kFunctions) {
      if (f.name == name) fail("function '" + name + "' needs a parenthesized argument", {"("});
    }

    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<Node>();
        n->op = Op::variable;
        n->variable = i;
        return n;
      }
    }
    if (auto it = constants_.find(name); it != constants_.end()) return make_literal(it->second);

    std::vector<std::string> declared = vars_;
    for (const auto& [k, v] : constants_) declared.push_back(k);
    std::string msg = "unknown identifier '" + name + "' at offset " + std::to_string(start) + "; declared:";
    for (const auto& d : declared) msg += " " + d;
    throw ParseError(ParseError::Kind::unknown_identifier, start, msg, std::move(declared));
  }
};

int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
  }
}

void print(const Node& n, const std::vector<std::string>& vars, std::string& out) {
  auto child = [&](const Node& c, bool wrap) {
    if (wrap) out += '(';
    print(c, vars, out);
    if (wrap) out += ')';
  };
  switch (n.op) {
    case Op::literal:
      if (n.literal < 0.0 || std::signbit(n.literal)) {
        out += "(" + format_number(n.literal) + ")";
      } else {
        out += format_number(n.literal);
      }
      return;
    case Op::variable: out += vars[n.variable]; return;
    case Op::neg:
      out += '-';
      child(*n.lhs, precedence(n.lhs->op) < precedence(Op::neg) || n.lhs->op == Op::neg);
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      const int p = precedence(n.op);
      child(*n.lhs, precedence(n.lhs->op) < p);
      out += n.op == Op::add ? " + " : n.op == Op::sub ? " - " : n.op == Op::mul ? " * " : " / ";
      // Left associative: an equal-precedence right operand needs parentheses.
      child(*n.rhs, precedence(n.rhs->op) <= p);
      return;
    }
    case Op::pow:
      child(*n.lhs, precedence(n.lhs->op) <= precedence(Op::pow));
      out += '^';
      child(*n.rhs, precedence(n.rhs->op) < precedence(Op::pow) && n.rhs->op != Op::neg);
      return;
    default:
      out += op_name(n.op);
      out += '(';
      print(*n.lhs, vars, out);
      out += ')';
      return;
  }
}

void describe(const Node& n, const std::vector<std::string>& vars, std::string& out) {
  switch (n.op) {
    case Op::literal: out += format_number(n.literal); return;
    case Op::variable: out += vars[n.variable]; return;
    default: break;
  }
  out += op_name(n.op);
  out += '(';
  describe(*n.lhs, vars, out);
  if (n.rhs) {
    out += ", ";
    describe(*n.rhs, vars, out);
  }
  out += ')';
}

std::string subexpr_text(const Node& n, const std::vector<std::string>& vars) {
  std::string s;
  print(n, vars, s);
  return s;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

double eval_value(const Node& n, std::span<const double> x, const std::vector<std::string>& vars) {
  auto domain = [&](const char* what) -> double { throw DomainError(what, subexpr_text(n, vars)); };
  switch (n.op) {
    case Op::literal: return n.literal;
    case Op::variable: return x[n.variable];
    case Op::neg: return -eval_value(*n.lhs, x, vars);
    case Op::add: return eval_value(*n.lhs, x, vars) + eval_value(*n.rhs, x, vars);
    case Op::sub: return eval_value(*n.lhs, x, vars) - eval_value(*n.rhs, x, vars);
    case Op::mul: return eval_value(*n.lhs, x, vars) * eval_value(*n.rhs, x, vars);
    case Op::div: {
      const double den = eval_value(*n.rhs, x, vars);
      if (den == 0.0) return domain("division by zero");
      return eval_value(*n.lhs, x, vars) / den;
    }
    case Op::pow: {
      const double b = eval_value(*n.lhs, x, vars);
      const double e = eval_value(*n.rhs, x, vars);
      if (b < 0.0 && !is_integer(e)) return domain("negative base with non-integer exponent");
      if (b == 0.0 && e < 0.0) return domain("division by zero");
      return std::pow(b, e);
    }
    case Op::exp: return std::exp(eval_value(*n.lhs, x, vars));
    case Op::log: {
      const double a = eval_value(*n.lhs, x, vars);
      if (a <= 0.0) return domain("log of nonpositive argument");
      return std::log(a);
    }
    case Op::sin: return std::sin(eval_value(*n.lhs, x, vars));
    case Op::cos: return std::cos(eval_value(*n.lhs, x, vars));
    case Op::sinh: return std::sinh(eval_value(*n.lhs, x, vars));
    case Op::cosh: return std::cosh(eval_value(*n.lhs, x, vars));
    case Op::sqrt: {
      const double a = eval_value(*n.lhs, x, vars);
      if (a < 0.0) return domain("sqrt of negative argument");
      return std::sqrt(a);
    }
    case Op::atan: return std::atan(eval_value(*n.lhs, x, vars));
  }
  return 0.0;
}

// Chain rule for a scalar function f applied to jet a: f(a), f'(a) da, f'(a) Ha + f''(a) da da^T.
Jet2 compose(const Jet2& a, double f, double df, double d2f) {
  Jet2 out;
  out.value = f;
  out.gradient = df * a.gradient;
  out.hessian = df * a.hessian + d2f * (a.gradient * a.gradient.transpose());
  return out;
}

bool is_constant(const Jet2& j) {
  return j.gradient.isZero(0.0) && j.hessian.isZero(0.0);
}

Jet2 eval_jet(const Node& n, std::span<const double> x, const std::vector<std::string>& vars) {
  const Eigen::Index dim = static_cast<Eigen::Index>(x.size());
  auto domain = [&](const char* what) -> Jet2 { throw DomainError(what, subexpr_text(n, vars)); };
  switch (n.op) {
    case Op::literal: return {n.literal, Vec::Zero(dim), Mat::Zero(dim, dim)};
    case Op::variable: {
      Jet2 j{x[n.variable], Vec::Zero(dim), Mat::Zero(dim, dim)};
      j.gradient(static_cast<Eigen::Index>(n.variable)) = 1.0;
      return j;
    }
    case Op::neg: {
      Jet2 a = eval_jet(*n.lhs, x, vars);
      a.value = -a.value;
      a.gradient = -a.gradient;
      a.hessian = -a.hessian;
      return a;
    }
    case Op::add:
    case Op::sub: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const Jet2 b = eval_jet(*n.rhs, x, vars);
      const double s = n.op == Op::add ? 1.0 : -1.0;
      return {a.value + s * b.value, a.gradient + s * b.gradient, a.hessian + s * b.hessian};
    }
    case Op::mul: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const Jet2 b = eval_jet(*n.rhs, x, vars);
      const Mat cross = a.gradient * b.gradient.transpose();
      return {a.value * b.value, a.value * b.gradient + b.value * a.gradient,
              a.value * b.hessian + b.value * a.hessian + cross + cross.transpose()};
    }
    case Op::div: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const Jet2 b = eval_jet(*n.rhs, x, vars);
      if (b.value == 0.0) return domain("division by zero");
      const double r = 1.0 / b.value;
      const Jet2 inv = compose(b, r, -r * r, 2.0 * r * r * r);
      const Mat cross = a.gradient * inv.gradient.transpose();
      return {a.value * inv.value, a.value * inv.gradient + inv.value * a.gradient,
              a.value * inv.hessian + inv.value * a.hessian + cross + cross.transpose()};
    }
    case Op::pow: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const Jet2 e = eval_jet(*n.rhs, x, vars);
      if (is_constant(e)) {
        const double c = e.value;
        if (a.value < 0.0 && !is_integer(c)) return domain("negative base with non-integer exponent");
        if (a.value == 0.0 && c < 0.0) return domain("division by zero");
        if (a.value == 0.0 && !is_integer(c) && c < 2.0 && !is_constant(a)) {
          return domain("non-integer power at zero has no second derivative");
        }
        const double f = std::pow(a.value, c);
        const double df = c == 0.0 ? 0.0 : c * std::pow(a.value, c - 1.0);
        const double d2f = (c == 0.0 || c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(a.value, c - 2.0);
        return compose(a, f, df, d2f);
      }
      // a^e = exp(e log a) for a variable exponent.
      if (a.value <= 0.0) return domain("variable exponent requires a positive base");
      const double la = std::log(a.value);
      const Jet2 log_a = compose(a, la, 1.0 / a.value, -1.0 / (a.value * a.value));
      const Mat cross = e.gradient * log_a.gradient.transpose();
      const Jet2 prod{e.value * la, e.value * log_a.gradient + la * e.gradient,
                      e.value * log_a.hessian + la * e.hessian + cross + cross.transpose()};
      const double f = std::exp(prod.value);
      return compose(prod, f, f, f);
    }
    case Op::exp: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double f = std::exp(a.value);
      return compose(a, f, f, f);
    }
    case Op::log: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      if (a.value <= 0.0) return domain("log of nonpositive argument");
      return compose(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
    }
    case Op::sin: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double s = std::sin(a.value);
      return compose(a, s, std::cos(a.value), -s);
    }
    case Op::cos: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double c = std::cos(a.value);
      return compose(a, c, -std::sin(a.value), -c);
    }
    case Op::sinh: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double s = std::sinh(a.value);
      return compose(a, s, std::cosh(a.value), s);
    }
    case Op::cosh: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double c = std::cosh(a.value);
      return compose(a, c, std::sinh(a.value), c);
    }
    case Op::sqrt: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      if (a.value < 0.0) return domain("sqrt of negative argument");
      if (a.value == 0.0) {
        if (is_constant(a)) return {0.0, Vec::Zero(dim), Mat::Zero(dim, dim)};
        return domain("sqrt is not differentiable at zero");
      }
      const double r = std::sqrt(a.value);
      return compose(a, r, 0.5 / r, -0.25 / (r * a.value));
    }
    case Op::atan: {
      const Jet2 a = eval_jet(*n.lhs, x, vars);
      const double q = 1.0 / (1.0 + a.value * a.value);
      return compose(a, std::atan(a.value), q, -2.0 * a.value * q * q);
    }
  }
  return {};
}

void check_arity(std::span<const double> point, const std::vector<std::string>& vars) {
  if (point.size() != vars.size()) {
    throw std::invalid_argument("expression evaluated with " + std::to_string(point.size()) +
                                " values for " + std::to_string(vars.size()) + " variables");
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, std::vector<std::string> variables,
                 const std::map<std::string, double>& constants) {
  Parser parser(text, variables, constants);
  NodePtr root = parser.parse();
  return Expr(std::move(root), std::make_shared<const std::vector<std::string>>(std::move(variables)));
}

Expr Expr::constant(double value, std::vector<std::string> variables) {
  return Expr(make_literal(value), std::make_shared<const std::vector<std::string>>(std::move(variables)));
}

std::string Expr::to_string() const {
  std::string s;
  print(*root_, *variables_, s);
  return s;
}

std::string Expr::describe() const {
  std::string s;
  twistcal::describe(*root_, *variables_, s);
  return s;
}

double Expr::value(std::span<const double> point) const {
  check_arity(point, *variables_);
  return eval_value(*root_, point, *variables_);
}

Jet2 Expr::jet(std::span<const double> point) const {
  check_arity(point, *variables_);
  return eval_jet(*root_, point, *variables_);
}

}  // namespace twistcal
