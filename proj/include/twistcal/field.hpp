#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "twistcal/expression.hpp"
#include "twistcal/linalg.hpp"

namespace twistcal {

// Value and gradient of a scalar function at a point.
struct Jet1 {
  double value = 0.0;
  Vec gradient;
};

// Scalar function on a parameter domain with analytic first derivatives. Backed either by an
// expression or by a callable such as an interpolated table.
class ScalarField {
 public:
  using Callable = std::function<Jet1(const Vec&)>;

  ScalarField(Expr expr);  // NOLINT(google-explicit-constructor)
  ScalarField(Callable fn, std::string description);

  static ScalarField constant(double value, std::vector<std::string> variables);

  Jet1 jet(const Vec& u) const;
  double value(const Vec& u) const { return jet(u).value; }

  // Re-parseable text for expression fields; a free-form label otherwise.
  const std::string& description() const noexcept { return description_; }
  bool is_expression() const noexcept { return expr_ != nullptr; }
  const Expr* expression() const noexcept { return expr_.get(); }

 private:
  std::shared_ptr<const Expr> expr_;
  Callable fn_;
  std::string description_;
};

// A 1-form sum_i mu_i du^i on the parameter domain of an immersion.
using OneForm = std::vector<ScalarField>;

}  // namespace twistcal
