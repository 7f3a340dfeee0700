#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avglab/average.hpp"
#include "avglab/problem.hpp"

namespace avglab {

/// One worked example: a fast problem with closed forms to test against.
///
/// `field` is the native fast-time evaluator and `field_text` its rendition in
/// the expression language (kept in lockstep by a load-time self-check).
/// `averaged_field` is the known closed-form average; for compressed-window
/// delay entries it is the lifted pointwise field. `exact` (when present) is
/// the fast solution as a function of (t, eps); `exact_averaged` solves the
/// averaged problem. Closed forms are validated on [0, horizon].
struct CatalogEntry {
  std::string name;
  std::string description;
  EquationClass equation_class = EquationClass::FastOde;
  FieldSpec field;
  FieldSpec averaged_field;
  std::vector<std::string> field_text;
  std::string phi_text;  // initial history in theta; empty for point classes
  AverageMode average_mode = AverageMode::Periodic;
  double r = 0.0;
  double horizon = 1.0;
  StateVec x0;
  std::optional<HistorySegment> phi;
  std::function<StateVec(double, double)> exact;   // (t, eps)
  std::function<StateVec(double)> exact_averaged;  // t
};

/// The built-in entries. First access runs a self-check: every closed form is
/// differentiated by a five-point stencil and compared against its governing
/// equation, and every field_text must evaluate identically to the native
/// field. A failure is an InternalError (the catalog itself is broken).
[[nodiscard]] const std::vector<CatalogEntry>& catalog();

/// Lookup by name; unknown names get a ConfigError listing what exists.
[[nodiscard]] const CatalogEntry& catalog_entry(std::string_view name);

/// Instantiate an entry as a runnable problem. A non-positive horizon picks
/// the entry's own.
[[nodiscard]] ProblemSpec make_problem(const CatalogEntry& e, double epsilon,
                                       double horizon = 0.0);
[[nodiscard]] ProblemSpec make_problem(std::string_view name, double epsilon,
                                       double horizon = 0.0);

/// Solution of y'(t) = -y(t - tau) with y == 1 on [-tau, 0], summed from the
/// piecewise-polynomial series. Exact up to roundoff for moderate t/tau; the
/// series alternates, so t/tau > 150 is refused rather than returned noisy.
[[nodiscard]] double delayed_exponential(double t, double tau);

}  // namespace avglab
