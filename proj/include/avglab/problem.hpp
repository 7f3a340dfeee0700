#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "avglab/field.hpp"

namespace avglab {

/// Which equation a solve integrates. Fast classes evaluate the field at
/// t/epsilon; averaged classes use it as given (autonomous).
enum class EquationClass {
  FastOde,            // x' = f(t/eps, x)
  AveragedOde,        // y' = F(y)
  RfdeNormalForm,     // x'(t) = f(t/eps, window x(t + eps*theta)), x = phi(t/eps) on [-eps r, 0]
  FastRfde,           // x'(t) = f(t/eps, window x(t + theta)), x0 = phi
  AveragedRfde,       // y'(t) = F(y_t), y0 = phi
  AveragedRfdeScaled  // y'(t) = F(window y(t + eps*theta)), y = phi(t/eps) on [-eps r, 0]
};

[[nodiscard]] std::string_view to_string(EquationClass c);
[[nodiscard]] std::optional<EquationClass> equation_class_from_string(std::string_view s);

[[nodiscard]] bool needs_epsilon(EquationClass c);
[[nodiscard]] bool is_delay_class(EquationClass c);

/// One well-posed initial value problem on [0, horizon] (delay classes carry
/// their initial interval to the left of 0).
struct ProblemSpec {
  EquationClass equation_class = EquationClass::FastOde;
  FieldSpec field;
  std::optional<double> epsilon;       // required for fast and scaled classes
  double r = 0.0;                      // delay span in theta units
  double horizon = 1.0;                // L > 0
  StateVec x0;                         // point classes
  std::optional<HistorySegment> phi;   // delay classes
};

/// Throws ConfigError naming the violated precondition.
void validate_problem(const ProblemSpec& p);

}  // namespace avglab
