#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twistcal/linalg.hpp"

namespace twistcal {

namespace detail {
struct Node;
}

// Value, gradient and Hessian of a scalar function at a point.
struct Jet2 {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

// Immutable expression over a declared list of variables.
//
// Grammar, loosest binding first:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | variable | function '(' expr ')' | '(' expr ')'
// Functions: exp log sin cos sinh cosh sqrt atan.
class Expr {
 public:
  // Identifiers must be one of `variables` or a key of `constants`; constants are folded in as
  // literals. Throws ParseError.
  static Expr parse(std::string_view text, std::vector<std::string> variables,
                    const std::map<std::string, double>& constants = {});

  static Expr constant(double value, std::vector<std::string> variables = {});

  const std::vector<std::string>& variables() const noexcept { return *variables_; }

  // Re-parseable infix text.
  std::string to_string() const;
  // Tree structure, e.g. "mul(exp(u), cos(v))".
  std::string describe() const;

  // Throws DomainError (log of a nonpositive number, sqrt of a negative one, division by zero).
  double value(std::span<const double> point) const;
  // Analytic first and second derivatives by forward accumulation through the tree.
  Jet2 jet(std::span<const double> point) const;

 private:
  Expr(std::shared_ptr<const detail::Node> root, std::shared_ptr<const std::vector<std::string>> vars)
      : root_(std::move(root)), variables_(std::move(vars)) {}

  std::shared_ptr<const detail::Node> root_;
  std::shared_ptr<const std::vector<std::string>> variables_;
};

}  // namespace twistcal
