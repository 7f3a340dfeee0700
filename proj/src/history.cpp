#include "avglab/history.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "avglab/detail/hermite.hpp"
#include "avglab/errors.hpp"

namespace avglab {

namespace {

std::vector<double> uniform_thetas(double r, int n) {
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = -r + r * static_cast<double>(i) / (n - 1);
  ts.back() = 0.0;
  return ts;
}

void append_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

}  // namespace

HistorySegment HistorySegment::constant(const StateVec& value, double r) {
  if (!(r >= 0.0)) throw ConfigError("history span r must be >= 0");
  if (value.size() == 0) throw ConfigError("history value must be non-empty");
  HistorySegment seg;
  seg.r_ = r;
  if (r == 0.0) {
    seg.thetas_ = {0.0};
    seg.values_ = {value};
    seg.derivs_ = {StateVec::Zero(value.size())};
    return seg;
  }
  seg.thetas_ = {-r, 0.0};
  seg.values_ = {value, value};
  seg.derivs_ = {StateVec::Zero(value.size()), StateVec::Zero(value.size())};
  return seg;
}

HistorySegment HistorySegment::from_callable(const std::function<StateVec(double)>& phi, double r,
                                             int n_samples) {
  if (!(r >= 0.0)) throw ConfigError("history span r must be >= 0");
  HistorySegment seg;
  seg.r_ = r;
  if (r == 0.0) {
    seg.thetas_ = {0.0};
    seg.values_ = {phi(0.0)};
    return seg;
  }
  if (n_samples < 2) throw ConfigError("history sampling needs at least 2 nodes");
  seg.thetas_ = uniform_thetas(r, n_samples);
  seg.values_.reserve(n_samples);
  for (double th : seg.thetas_) seg.values_.push_back(phi(th));
  for (const auto& v : seg.values_)
    if (v.size() != seg.values_.front().size())
      throw ConfigError("history callable changed dimension across theta");
  return seg;
}

HistorySegment HistorySegment::from_callable_with_derivative(
    const std::function<StateVec(double)>& phi, const std::function<StateVec(double)>& dphi,
    double r, int n_samples) {
  HistorySegment seg = from_callable(phi, r, n_samples);
  seg.derivs_.reserve(seg.thetas_.size());
  for (double th : seg.thetas_) seg.derivs_.push_back(dphi(th));
  return seg;
}

HistorySegment HistorySegment::from_samples(double r, std::vector<double> thetas,
                                            std::vector<StateVec> values,
                                            std::vector<StateVec> derivatives) {
  if (!(r >= 0.0)) throw ConfigError("history span r must be >= 0");
  if (thetas.empty() || thetas.size() != values.size())
    throw ConfigError("history samples: thetas and values must match and be non-empty");
  if (!derivatives.empty() && derivatives.size() != values.size())
    throw ConfigError("history samples: derivative data must match values one for one");
  const double tol = 1e-12 * std::max(1.0, r);
  if (std::abs(thetas.front() + r) > tol || std::abs(thetas.back()) > tol)
    throw ConfigError("history samples must span [-r, 0]");
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1])) throw ConfigError("history thetas must strictly ascend");
  if (r == 0.0 && thetas.size() != 1)
    throw ConfigError("a zero-span history stores exactly one state");
  for (const auto& v : values)
    if (v.size() != values.front().size()) throw ConfigError("history values change dimension");
  thetas.front() = -r;
  thetas.back() = 0.0;
  HistorySegment seg;
  seg.r_ = r;
  seg.thetas_ = std::move(thetas);
  seg.values_ = std::move(values);
  seg.derivs_ = std::move(derivatives);
  return seg;
}

StateVec HistorySegment::eval(double theta) const {
  const double tol = 1e-12 * std::max(1.0, r_);
  if (theta < -r_ - tol || theta > tol)
    throw DomainError("history evaluated at theta = " + std::to_string(theta) +
                      " outside [-" + std::to_string(r_) + ", 0]");
  if (thetas_.size() == 1) return values_.front();
  theta = std::clamp(theta, -r_, 0.0);
  auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
  std::size_t i = (it == thetas_.begin()) ? 0 : static_cast<std::size_t>(it - thetas_.begin()) - 1;
  if (i >= thetas_.size() - 1) i = thetas_.size() - 2;
  const double t0 = thetas_[i], t1 = thetas_[i + 1];
  if (derivs_.empty()) {
    const double w = (theta - t0) / (t1 - t0);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }
  const auto w = detail::hermite_value_weights(t0, t1, theta);
  return w.w0 * values_[i] + w.w1 * values_[i + 1] + w.wm0 * derivs_[i] + w.wm1 * derivs_[i + 1];
}

StateVec HistorySegment::eval_derivative(double theta) const {
  const double tol = 1e-12 * std::max(1.0, r_);
  if (theta < -r_ - tol || theta > tol)
    throw DomainError("history derivative requested outside [-r, 0]");
  if (thetas_.size() == 1) return StateVec::Zero(values_.front().size());
  theta = std::clamp(theta, -r_, 0.0);
  auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
  std::size_t i = (it == thetas_.begin()) ? 0 : static_cast<std::size_t>(it - thetas_.begin()) - 1;
  if (i >= thetas_.size() - 1) i = thetas_.size() - 2;
  const double t0 = thetas_[i], t1 = thetas_[i + 1];
  if (derivs_.empty()) return (values_[i + 1] - values_[i]) / (t1 - t0);
  const auto w = detail::hermite_derivative_weights(t0, t1, theta);
  return w.w0 * values_[i] + w.w1 * values_[i + 1] + w.wm0 * derivs_[i] + w.wm1 * derivs_[i + 1];
}

double HistorySegment::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, v.norm());
  for (std::size_t i = 0; i + 1 < thetas_.size(); ++i)
    m = std::max(m, eval(0.5 * (thetas_[i] + thetas_[i + 1])).norm());
  return m;
}

std::string HistorySegment::bit_pattern_key() const {
  std::string key;
  const std::size_t n = thetas_.size();
  const std::size_t d = static_cast<std::size_t>(dim());
  key.reserve(16 + n * (1 + d * (derivs_.empty() ? 1 : 2)) * sizeof(double));
  append_bytes(key, &r_, sizeof(r_));
  append_bytes(key, thetas_.data(), n * sizeof(double));
  for (const auto& v : values_) append_bytes(key, v.data(), d * sizeof(double));
  const char flag = derivs_.empty() ? 0 : 1;
  key.push_back(flag);
  for (const auto& v : derivs_) append_bytes(key, v.data(), d * sizeof(double));
  return key;
}

StateVec segment_eval(const HistorySegment& seg, double theta) { return seg.eval(theta); }

}  // namespace avglab
