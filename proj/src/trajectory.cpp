#include "avglab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "avglab/detail/hermite.hpp"
#include "avglab/errors.hpp"

namespace avglab {

Trajectory::Trajectory(std::vector<double> times, const std::vector<StateVec>& states,
                       const std::vector<StateVec>& derivatives) {
  if (times.size() < 2 || times.size() != states.size() || times.size() != derivatives.size())
    throw InternalError("trajectory needs matching times/states/derivatives, at least 2 nodes");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw InternalError("trajectory node times must not decrease");
    if (times[i] == times[i - 1] && (states[i] - states[i - 1]).norm() != 0.0)
      throw InternalError("breakpoint nodes must share their state");
  }
  const Eigen::Index d = states.front().size();
  times_ = std::move(times);
  states_.resize(d, static_cast<Eigen::Index>(times_.size()));
  derivs_.resize(d, static_cast<Eigen::Index>(times_.size()));
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (states[i].size() != d || derivatives[i].size() != d)
      throw InternalError("trajectory node dimension changed");
    states_.col(static_cast<Eigen::Index>(i)) = states[i];
    derivs_.col(static_cast<Eigen::Index>(i)) = derivatives[i];
  }
}

std::size_t Trajectory::interval_index(double t) const {
  // Last i with times_[i] <= t and times_[i+1] > times_[i]; zero-width
  // breakpoint intervals are skipped so Hermite never divides by zero.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (i >= times_.size() - 1) i = times_.size() - 2;
  while (i + 1 < times_.size() - 1 && times_[i + 1] <= times_[i]) ++i;
  while (i > 0 && times_[i + 1] <= times_[i]) --i;
  return i;
}

StateVec Trajectory::query(double t) const {
  const double span = times_.back() - times_.front();
  const double tol = 1e-12 * std::max(1.0, std::abs(times_.front()) + span);
  if (t < times_.front() - tol || t > times_.back() + tol)
    throw DomainError("trajectory queried at t = " + std::to_string(t) + " outside [" +
                      std::to_string(times_.front()) + ", " + std::to_string(times_.back()) + "]");
  t = std::clamp(t, times_.front(), times_.back());
  const std::size_t i = interval_index(t);
  const double t0 = times_[i], t1 = times_[i + 1];
  if (t == t0) return states_.col(static_cast<Eigen::Index>(i));
  if (t == t1) return states_.col(static_cast<Eigen::Index>(i + 1));
  const auto w = detail::hermite_value_weights(t0, t1, t);
  return w.w0 * states_.col(static_cast<Eigen::Index>(i)) +
         w.w1 * states_.col(static_cast<Eigen::Index>(i + 1)) +
         w.wm0 * derivs_.col(static_cast<Eigen::Index>(i)) +
         w.wm1 * derivs_.col(static_cast<Eigen::Index>(i + 1));
}

StateVec Trajectory::query_derivative(double t) const {
  const double span = times_.back() - times_.front();
  const double tol = 1e-12 * std::max(1.0, std::abs(times_.front()) + span);
  if (t < times_.front() - tol || t > times_.back() + tol)
    throw DomainError("trajectory derivative queried outside its domain");
  t = std::clamp(t, times_.front(), times_.back());
  // Prefer the stored slope when t is a node: it is the exact field value
  // there (right-hand side at breakpoints).
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && *it == t) {
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i + 1 < times_.size() && times_[i + 1] == t) ++i;  // breakpoint: right slope
    return derivs_.col(static_cast<Eigen::Index>(i));
  }
  const std::size_t i = interval_index(t);
  const auto w = detail::hermite_derivative_weights(times_[i], times_[i + 1], t);
  return w.w0 * states_.col(static_cast<Eigen::Index>(i)) +
         w.w1 * states_.col(static_cast<Eigen::Index>(i + 1)) +
         w.wm0 * derivs_.col(static_cast<Eigen::Index>(i)) +
         w.wm1 * derivs_.col(static_cast<Eigen::Index>(i + 1));
}

double Trajectory::max_node_gap(double a, double b) const {
  double gap = 0.0;
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    if (times_[i + 1] < a || times_[i] > b) continue;
    gap = std::max(gap, times_[i + 1] - times_[i]);
  }
  return gap;
}

std::string Trajectory::bit_pattern_key() const {
  std::string key;
  key.reserve((times_.size() + 2 * static_cast<std::size_t>(states_.size())) * sizeof(double));
  key.append(reinterpret_cast<const char*>(times_.data()), times_.size() * sizeof(double));
  key.append(reinterpret_cast<const char*>(states_.data()),
             static_cast<std::size_t>(states_.size()) * sizeof(double));
  key.append(reinterpret_cast<const char*>(derivs_.data()),
             static_cast<std::size_t>(derivs_.size()) * sizeof(double));
  return key;
}

HistorySegment trajectory_history(const Trajectory& traj, double t, double r, double scale,
                                  int n_samples) {
  if (!(r >= 0.0)) throw ConfigError("history span r must be >= 0");
  if (!(scale > 0.0)) throw ConfigError("history time scale must be > 0");
  const double lo = t - scale * r;
  const double span = traj.t_end() - traj.t_start();
  const double tol = 1e-9 * std::max(1.0, span);
  if (lo < traj.t_start() - tol || t > traj.t_end() + tol)
    throw DomainError("history window [" + std::to_string(lo) + ", " + std::to_string(t) +
                      "] exits the computed interval [" + std::to_string(traj.t_start()) + ", " +
                      std::to_string(traj.t_end()) + "]");
  if (r == 0.0) {
    return HistorySegment::from_samples(0.0, {0.0}, {traj.query(t)},
                                        {scale * traj.query_derivative(t)});
  }
  std::vector<double> thetas(static_cast<std::size_t>(n_samples));
  std::vector<StateVec> values, slopes;
  values.reserve(thetas.size());
  slopes.reserve(thetas.size());
  for (int i = 0; i < n_samples; ++i) {
    double th = -r + r * static_cast<double>(i) / (n_samples - 1);
    if (i == n_samples - 1) th = 0.0;
    thetas[static_cast<std::size_t>(i)] = th;
    const double u = std::clamp(t + scale * th, traj.t_start(), traj.t_end());
    values.push_back(traj.query(u));
    slopes.push_back(scale * traj.query_derivative(u));
  }
  return HistorySegment::from_samples(r, std::move(thetas), std::move(values), std::move(slopes));
}

}  // namespace avglab
