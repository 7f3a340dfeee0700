#pragma once

#include <functional>
#include <string>
#include <vector>

#include "avglab/types.hpp"

namespace avglab {

/// Continuous history on [-r, 0]: theta-samples of a d-dimensional path,
/// interpolated by cubic Hermite when derivative data is present and by
/// straight lines otherwise (the linear fallback is visible via
/// has_derivatives() so callers can demand the smooth form).
///
/// r == 0 degenerates to a single stored state: the segment *is* that point.
class HistorySegment {
 public:
  static constexpr int kDefaultSamples = 33;

  /// Constant history x~(theta) == value.
  [[nodiscard]] static HistorySegment constant(const StateVec& value, double r);

  /// Sample phi on a uniform theta grid. No derivative data: linear fallback.
  [[nodiscard]] static HistorySegment from_callable(const std::function<StateVec(double)>& phi,
                                                    double r, int n_samples = kDefaultSamples);

  /// Sample phi and dphi on a uniform theta grid: cubic Hermite interpolation.
  [[nodiscard]] static HistorySegment from_callable_with_derivative(
      const std::function<StateVec(double)>& phi, const std::function<StateVec(double)>& dphi,
      double r, int n_samples = kDefaultSamples);

  /// Adopt explicit samples. thetas must ascend from -r to 0; derivatives may
  /// be empty (linear fallback) or match values one for one.
  [[nodiscard]] static HistorySegment from_samples(double r, std::vector<double> thetas,
                                                   std::vector<StateVec> values,
                                                   std::vector<StateVec> derivatives = {});

  /// Value at theta in [-r, 0]; outside is a DomainError.
  [[nodiscard]] StateVec eval(double theta) const;

  /// Interpolant slope at theta (chord slope under the linear fallback).
  [[nodiscard]] StateVec eval_derivative(double theta) const;

  [[nodiscard]] double delay_span() const { return r_; }
  [[nodiscard]] Eigen::Index dim() const { return values_.front().size(); }
  [[nodiscard]] bool has_derivatives() const { return !derivs_.empty(); }

  /// sup over theta of the Euclidean norm, computed from the stored samples
  /// and the patch midpoints of the interpolant. Always >= |eval(0)|.
  [[nodiscard]] double sup_norm() const;

  [[nodiscard]] const std::vector<double>& thetas() const { return thetas_; }
  [[nodiscard]] const std::vector<StateVec>& values() const { return values_; }
  [[nodiscard]] const std::vector<StateVec>& derivatives() const { return derivs_; }

  /// Raw bytes of (r, thetas, values, derivatives): equal keys iff the stored
  /// representation is bit-identical. Used to memoize averaged fields.
  [[nodiscard]] std::string bit_pattern_key() const;

 private:
  HistorySegment() = default;

  double r_ = 0.0;
  std::vector<double> thetas_;
  std::vector<StateVec> values_;
  std::vector<StateVec> derivs_;
};

/// Spec of record for reading a segment; eval() is the member spelling.
[[nodiscard]] StateVec segment_eval(const HistorySegment& seg, double theta);

}  // namespace avglab
