#pragma once

#include "avglab/problem.hpp"
#include "avglab/trajectory.hpp"

namespace avglab {

/// Fixed-step classical RK4 with cubic-Hermite dense output.
///
/// `h` is a request. Solvers additionally cap the step so the fast
/// oscillation stays resolved (eps*period/20 when the field declares a
/// period, eps/10 otherwise) and so delay reads never touch the step being
/// computed (half the physical delay window), then round so the horizon
/// lands on a node exactly.
struct IntegratorConfig {
  double h = 1e-3;
  double blow_up_bound = 1e8;
  std::size_t max_nodes = 10'000'000;
};

/// The step actually taken for this problem/config pair (after caps and
/// horizon rounding). Exposed so tests can pin the cap policy.
[[nodiscard]] double effective_step(const ProblemSpec& p, const IntegratorConfig& cfg = {});

/// x' = f(t/eps, x) on [0, L]. Throws BlowUpError with the escape time when
/// the solution leaves the guard ball or goes non-finite.
[[nodiscard]] Trajectory solve_fast_ode(const ProblemSpec& p, const IntegratorConfig& cfg = {});

/// y' = F(y) on [0, L]; the field is used as given (autonomous).
[[nodiscard]] Trajectory solve_averaged_ode(const ProblemSpec& p,
                                            const IntegratorConfig& cfg = {});

/// x'(t) = f(t/eps, x_{t,eps}) with x(t) = phi(t/eps) on [-eps r, 0]: the
/// compressed-window normal form. History windows are read off the dense
/// interpolant; the step cap keeps every read inside completed steps.
[[nodiscard]] Trajectory solve_rfde_normal_form(const ProblemSpec& p,
                                                const IntegratorConfig& cfg = {});

/// x'(t) = f(t/eps, x_t) with x_0 = phi on [-r, 0]: fixed delay window,
/// method of steps.
[[nodiscard]] Trajectory solve_fast_rfde(const ProblemSpec& p, const IntegratorConfig& cfg = {});

/// y'(t) = F(y_t) (plain) or y'(t) = F(y_{t,eps}) (scaled class); the scaled
/// variant keeps the eps-compressed window and initial interval.
[[nodiscard]] Trajectory solve_averaged_rfde(const ProblemSpec& p,
                                             const IntegratorConfig& cfg = {});

/// Dispatch on p.equation_class.
[[nodiscard]] Trajectory solve(const ProblemSpec& p, const IntegratorConfig& cfg = {});

}  // namespace avglab
