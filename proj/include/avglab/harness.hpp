#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "avglab/average.hpp"
#include "avglab/integrate.hpp"

namespace avglab {

/// sup over [t0, t1] of the Euclidean distance |a(t) - ref(t)|. The sampling
/// comb is uniform with at least n_samples points (>= 1000) and at least ten
/// points per node interval of a, so the grid maximum misses the true sup by
/// no more than a Lipschitz sliver.
[[nodiscard]] double sup_error(const Trajectory& a, const std::function<StateVec(double)>& ref,
                               double t0, double t1, std::size_t n_samples = 1000);

/// Same between two trajectories; the comb also resolves b's nodes.
[[nodiscard]] double sup_error(const Trajectory& a, const Trajectory& b, double t0, double t1,
                               std::size_t n_samples = 1000);

/// Full common domain [max of starts, min of ends].
[[nodiscard]] double sup_error(const Trajectory& a, const Trajectory& b);

struct SweepRow {
  double epsilon = 0.0;
  double sup_err = std::numeric_limits<double>::quiet_NaN();
  double ratio_prev = std::numeric_limits<double>::quiet_NaN();  // sup_err / previous row's
  bool blow_up = false;
  double wall_ms = 0.0;
  // Distance to the eps-window averaged solve; NaN unless compare_scaled.
  double sup_err_scaled = std::numeric_limits<double>::quiet_NaN();
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool has_scaled = false;
  // Provenance, so a report is readable without the config that made it.
  std::string label;
  double horizon = 0.0;
  double requested_h = 0.0;
  AverageMode mode = AverageMode::Periodic;
  double tol = 0.0;  // resolved tolerance actually used
};

struct SweepOptions {
  IntegratorConfig integrator;
  AverageConfig average;
  int jobs = 1;
  // Additionally solve the eps-window averaged form per row (compressed-window
  // delay problems only) so the two approximations can be compared.
  bool compare_scaled = false;
  std::string label;  // free-text provenance for the report
};

/// Solve `fast` across the given epsilons (strictly decreasing, at least 3)
/// and measure each solution against the averaged counterpart, which is built
/// and solved once. Rows run on up to `jobs` threads; results are identical
/// to the sequential run. A blow-up marks its row rather than failing the
/// sweep. ratio_prev below 1 row over row is the convergence evidence.
[[nodiscard]] SweepReport epsilon_sweep(const ProblemSpec& fast,
                                        const std::vector<double>& epsilons,
                                        const SweepOptions& opt = {});

/// Pinned five-column schema: epsilon,sup_error,ratio_prev,blow_up,wall_ms.
/// Numbers print with %.17g (wall_ms %.3f), blow_up as 0/1, missing as nan.
[[nodiscard]] std::string sweep_csv(const SweepReport& report);

/// Aligned human-readable table; includes the scaled column when present.
[[nodiscard]] std::string sweep_table(const SweepReport& report);

/// One row per node: t,x1,...,xd with %.17g. Breakpoint nodes (same t, two
/// slopes) appear once per side.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);

struct StroboscopicReport {
  double alpha = 0.0;                 // sqrt(epsilon)
  std::vector<double> times;          // accepted grid points
  std::vector<double> residuals;      // |chord over alpha - averaged field|
  double max_residual = std::numeric_limits<double>::quiet_NaN();
  int skipped = 0;                    // grid points dropped (warned on stderr)
};

/// The default measurement grid: n uniform points on [0, t_end - alpha].
[[nodiscard]] std::vector<double> strobe_grid(double t_end, double alpha, int n_points = 20);

/// Finite-difference defect of the averaged equation along a solution:
/// residual(t) = |(x(t+alpha) - x(t))/alpha - F(arg at t)| with alpha =
/// sqrt(epsilon). A pointwise field_avg reads x(t) (the lifted comparison);
/// a delay/functional one reads the unscaled history window x_t. Grid points
/// whose window or chord leaves the trajectory are skipped with a warning.
[[nodiscard]] StroboscopicReport stroboscopic_residual(const Trajectory& traj,
                                                       const FieldSpec& field_avg, double epsilon,
                                                       const std::vector<double>& t_grid);

struct GuardBox {
  StateVec lo;           // state box corners, dimension = field dim
  StateVec hi;
  int n_states = 64;     // sampled states: the two corners plus seeded uniforms
  int n_times = 257;
  unsigned seed = 12345;
};

struct GuardReport {
  double max_norm = 0.0;            // largest |f| seen
  double continuity_quotient = 0.0; // largest |f(t,x)-f(t,y)| / |x-y| seen
  bool grows_with_time = false;     // late-time maxima dominate early ones
  bool rejected = false;            // a non-finite value appeared
  std::string summary;
};

/// Samples the field over a state box and [0, t_horizon] and reports evidence
/// for the standing assumptions (bounded, continuous in the state uniformly
/// in time, no secular growth). Sampling cannot prove them; it can only catch
/// violations, and the summary says so.
[[nodiscard]] GuardReport hypothesis_guard(const FieldSpec& f, const GuardBox& box,
                                           double t_horizon = 1000.0);

}  // namespace avglab
