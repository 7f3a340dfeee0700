#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "avglab/history.hpp"
#include "avglab/types.hpp"

namespace avglab {

/// How the right-hand side consumes its state argument.
enum class FieldKind {
  PointwiseOde,    // f(t, x)
  PointwiseDelay,  // f(t, x(t), x at declared delay offsets)
  Functional,      // f(t, whole history segment)
};

using PointwiseFn = std::function<StateVec(double, const StateVec&)>;
using PointwiseDelayFn =
    std::function<StateVec(double, const StateVec&, const std::vector<StateVec>&)>;
using FunctionalFn = std::function<StateVec(double, const HistorySegment&)>;

/// Right-hand side in fast time. Evaluators must be pure: same inputs give
/// the same bits out (memoization and bitwise rerun checks depend on it).
///
/// `history_span` is the window r the field reads (0 for plain ODE fields);
/// `delay_offsets` are the theta-offsets d_j in (0, r] a PointwiseDelay field
/// reads, i.e. the j-th delayed argument is segment value at theta = -d_j.
/// `period` is the declared fast-time period when the field has one; solvers
/// use it to cap steps and the periodic average integrates over it.
struct FieldSpec {
  FieldKind kind = FieldKind::PointwiseOde;
  int dim = 1;
  double history_span = 0.0;
  std::vector<double> delay_offsets;
  std::optional<double> period;
  PointwiseFn pointwise;
  PointwiseDelayFn pointwise_delay;
  FunctionalFn functional;

  [[nodiscard]] static FieldSpec make_pointwise(int dim, PointwiseFn f,
                                                std::optional<double> period = std::nullopt);
  [[nodiscard]] static FieldSpec make_pointwise_delay(int dim, double r,
                                                      std::vector<double> offsets,
                                                      PointwiseDelayFn f,
                                                      std::optional<double> period = std::nullopt);
  [[nodiscard]] static FieldSpec make_functional(int dim, double r, FunctionalFn f,
                                                 std::optional<double> period = std::nullopt);
};

/// Throws ConfigError on malformed specs (missing evaluator, bad offsets, ...).
void validate_field(const FieldSpec& f);

/// Evaluate at a bare state. Delay/functional kinds see the constant history
/// x~(theta) == x (the zero-span identification of segments with points).
[[nodiscard]] StateVec eval_field(const FieldSpec& f, double t, const StateVec& x);

/// Evaluate on a history segment. A PointwiseOde field reads seg(0);
/// PointwiseDelay reads seg(0) and seg(-d_j).
[[nodiscard]] StateVec eval_field(const FieldSpec& f, double t, const HistorySegment& seg);

}  // namespace avglab
