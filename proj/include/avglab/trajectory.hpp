#pragma once

#include <vector>

#include "avglab/history.hpp"
#include "avglab/types.hpp"

namespace avglab {

/// Dense numerical solution on [t_start, t_end]: node states plus node
/// derivatives, queried through per-interval cubic Hermite. Node queries
/// reproduce the stored values exactly and the interpolant is continuous.
///
/// Adjacent nodes may share a time (a breakpoint): same state, different
/// slopes on the two sides. Queries at the shared time return that state;
/// query_derivative returns the right-hand slope.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, const std::vector<StateVec>& states,
             const std::vector<StateVec>& derivatives);

  [[nodiscard]] StateVec query(double t) const;
  [[nodiscard]] StateVec query_derivative(double t) const;

  [[nodiscard]] double t_start() const { return times_.front(); }
  [[nodiscard]] double t_end() const { return times_.back(); }
  [[nodiscard]] Eigen::Index dim() const { return states_.rows(); }
  [[nodiscard]] std::size_t node_count() const { return times_.size(); }
  [[nodiscard]] double node_time(std::size_t i) const { return times_[i]; }
  [[nodiscard]] StateVec node_state(std::size_t i) const { return states_.col(i); }
  [[nodiscard]] StateVec node_derivative(std::size_t i) const { return derivs_.col(i); }

  /// Largest node spacing intersecting [a, b]; the sampling comb other code
  /// lays over this trajectory must be at least that fine.
  [[nodiscard]] double max_node_gap(double a, double b) const;

  /// Bytes of (times, states, derivatives): bitwise determinism checks.
  [[nodiscard]] std::string bit_pattern_key() const;

 private:
  [[nodiscard]] std::size_t interval_index(double t) const;

  std::vector<double> times_;
  Eigen::MatrixXd states_;  // d x n, column per node
  Eigen::MatrixXd derivs_;  // d x n
};

/// History window of a solution at time t: theta in [-r, 0] |-> x(t + scale*theta),
/// sampled onto the standard uniform grid with the interpolant's slopes.
/// scale = eps reads the compressed window x_{t,eps}; scale = 1 reads x_t.
/// Windows reaching before t_start (or past t_end) are a DomainError.
[[nodiscard]] HistorySegment trajectory_history(const Trajectory& traj, double t, double r,
                                                double scale,
                                                int n_samples = HistorySegment::kDefaultSamples);

}  // namespace avglab
