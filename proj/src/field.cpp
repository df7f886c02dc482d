#include "twistcal/field.hpp"

#include <stdexcept>
#include <utility>

namespace twistcal {

ScalarField::ScalarField(Expr expr)
    : expr_(std::make_shared<const Expr>(std::move(expr))), description_(expr_->to_string()) {}

ScalarField::ScalarField(Callable fn, std::string description)
    : fn_(std::move(fn)), description_(std::move(description)) {
  if (!fn_) throw std::invalid_argument("scalar field needs a callable");
}

ScalarField ScalarField::constant(double value, std::vector<std::string> variables) {
  return ScalarField(Expr::constant(value, std::move(variables)));
}

Jet1 ScalarField::jet(const Vec& u) const {
  if (expr_) {
    Jet2 j = expr_->jet(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
    return {j.value, std::move(j.gradient)};
  }
  return fn_(u);
}

}  // namespace twistcal
