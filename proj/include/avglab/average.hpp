#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "avglab/field.hpp"
#include "avglab/problem.hpp"

namespace avglab {

enum class AverageMode { Periodic, Cesaro, AlmostPeriodic };

[[nodiscard]] std::string_view to_string(AverageMode m);
[[nodiscard]] std::optional<AverageMode> average_mode_from_string(std::string_view s);

/// Where the three estimators agree to look: the argument is either a bare
/// state (delay/functional fields see its constant lift) or a history segment
/// (pointwise fields read seg(0)).
using FieldArg = std::variant<StateVec, HistorySegment>;

struct AverageEstimate {
  StateVec value;
  double horizon = 0.0;   // averaging window actually used
  double residual = 0.0;  // mode-specific error indicator (see each estimator)
  AverageMode mode = AverageMode::Periodic;
};

/// Per-mode default tolerance: 1e-6 periodic, 1e-4 cesaro, 1e-3 almost-periodic.
[[nodiscard]] double default_average_tol(AverageMode m);
[[nodiscard]] const std::vector<double>& default_probes();  // {0, 1, e, 10*pi}

struct AverageConfig {
  AverageMode mode = AverageMode::Periodic;
  double tol = 0.0;  // 0 => per-mode default
  double T0 = 1.0;
  double T_max = 1e6;
  int n_quad = 64;
  std::vector<double> probes;  // empty => default_probes()
};

/// Mean over one declared period by composite Simpson with n_quad panels
/// (2*n_quad+1 field evaluations). residual is the difference against the
/// n_quad/2-panel rule; n_quad must be even and >= 16.
[[nodiscard]] AverageEstimate average_periodic(const FieldSpec& f, const FieldArg& x, double T,
                                               int n_quad = 64);

/// Limit mean via horizon doubling: A(T) on T0, 2*T0, 4*T0, ... accepted once
/// two consecutive doublings move the estimate by less than tol (one quiet
/// doubling is not trusted: slowly drifting means can look converged for a
/// single step). Quadrature uses panels of width <= 0.05. residual is the
/// final accepted difference. Throws NoAverageError (carrying the last two
/// iterates) when T_max is exhausted. `start` shifts the window to
/// [start, start + T].
[[nodiscard]] AverageEstimate average_cesaro(const FieldSpec& f, const FieldArg& x,
                                             double tol = 1e-4, double T0 = 1.0,
                                             double T_max = 1e6, double start = 0.0);

/// Runs the doubling estimator from several start points; returns the first
/// probe's estimate with residual = max pairwise spread. Spread beyond
/// 10*tol throws NotAlmostPeriodicError.
[[nodiscard]] AverageEstimate average_almost_periodic(
    const FieldSpec& f, const FieldArg& x, double tol = 1e-3,
    const std::vector<double>& probes = default_probes(), double T0 = 1.0, double T_max = 1e6);

/// Estimator dispatch on cfg.mode (periodic mode refines n_quad by doubling
/// until the Simpson residual meets tol; it needs f.period declared).
[[nodiscard]] AverageEstimate estimate_average(const FieldSpec& f, const FieldArg& x,
                                               const AverageConfig& cfg);

/// The constant history x~(theta) == x.
[[nodiscard]] HistorySegment lift_constant_history(const StateVec& x, double r);

/// Autonomous field whose evaluator runs the estimator at its argument,
/// memoized per argument bit pattern (thread-safe). Pointwise fields average
/// to pointwise fields; delay/functional fields keep their kind and window.
[[nodiscard]] FieldSpec build_averaged_field(const FieldSpec& f, const AverageConfig& cfg);

/// Constant-lift reduction of a delay/functional field to an autonomous
/// pointwise ODE field: G(x) = average of f at the constant history x~.
[[nodiscard]] FieldSpec build_averaged_field_lifted(const FieldSpec& f, const AverageConfig& cfg);

/// The averaged initial value problem a fast problem converges to:
/// fast ODE -> averaged ODE; compressed-window RFDE -> averaged ODE via the
/// constant lift (or, with scaled = true, the eps-window averaged RFDE);
/// fixed-window RFDE -> averaged RFDE.
[[nodiscard]] ProblemSpec averaged_counterpart(const ProblemSpec& fast, const AverageConfig& cfg,
                                               bool scaled = false);

}  // namespace avglab
