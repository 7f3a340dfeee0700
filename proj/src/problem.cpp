#include "avglab/problem.hpp"

#include <cmath>

#include "avglab/errors.hpp"

namespace avglab {

std::string_view to_string(EquationClass c) {
  switch (c) {
    case EquationClass::FastOde: return "fast_ode";
    case EquationClass::AveragedOde: return "averaged_ode";
    case EquationClass::RfdeNormalForm: return "rfde_normal_form";
    case EquationClass::FastRfde: return "fast_rfde";
    case EquationClass::AveragedRfde: return "averaged_rfde";
    case EquationClass::AveragedRfdeScaled: return "averaged_rfde_scaled";
  }
  return "?";
}

std::optional<EquationClass> equation_class_from_string(std::string_view s) {
  for (EquationClass c :
       {EquationClass::FastOde, EquationClass::AveragedOde, EquationClass::RfdeNormalForm,
        EquationClass::FastRfde, EquationClass::AveragedRfde, EquationClass::AveragedRfdeScaled})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

bool needs_epsilon(EquationClass c) {
  return c == EquationClass::FastOde || c == EquationClass::RfdeNormalForm ||
         c == EquationClass::FastRfde || c == EquationClass::AveragedRfdeScaled;
}

bool is_delay_class(EquationClass c) {
  return c == EquationClass::RfdeNormalForm || c == EquationClass::FastRfde ||
         c == EquationClass::AveragedRfde || c == EquationClass::AveragedRfdeScaled;
}

void validate_problem(const ProblemSpec& p) {
  validate_field(p.field);
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon))
    throw ConfigError("horizon L must be positive and finite");
  if (needs_epsilon(p.equation_class)) {
    if (!p.epsilon) throw ConfigError(std::string(to_string(p.equation_class)) +
                                      " requires epsilon");
    if (!(*p.epsilon > 0.0) || !std::isfinite(*p.epsilon))
      throw ConfigError("epsilon must be positive and finite");
  }
  if (!(p.r >= 0.0) || !std::isfinite(p.r)) throw ConfigError("delay span r must be >= 0");
  if (is_delay_class(p.equation_class)) {
    if (!p.phi) throw ConfigError(std::string(to_string(p.equation_class)) +
                                  " requires an initial history phi");
    if (std::abs(p.phi->delay_span() - p.r) > 1e-12 * std::max(1.0, p.r))
      throw ConfigError("phi span does not match the problem's delay span r");
    if (p.phi->dim() != p.field.dim) throw ConfigError("phi dimension does not match the field");
    if (p.field.kind != FieldKind::PointwiseOde &&
        p.field.history_span > p.r + 1e-12 * std::max(1.0, p.r))
      throw ConfigError("field reads a longer history window than the problem provides");
  } else {
    if (p.r != 0.0) throw ConfigError("point classes require r = 0");
    if (p.x0.size() == 0) throw ConfigError("point classes require an initial state x0");
    if (p.x0.size() != p.field.dim) throw ConfigError("x0 dimension does not match the field");
    if (!all_finite(p.x0)) throw ConfigError("x0 must be finite");
    if (p.field.kind != FieldKind::PointwiseOde)
      throw ConfigError("point classes require a pointwise field");
  }
}

}  // namespace avglab
