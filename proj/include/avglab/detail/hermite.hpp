#pragma once

namespace avglab::detail {

/// Cubic Hermite basis on [t0, t1]: value = w0*x0 + w1*x1 + wm0*m0 + wm1*m1
/// with m = derivative data at the endpoints. Reproduces cubics exactly.
struct HermiteWeights {
  double w0, w1, wm0, wm1;
};

[[nodiscard]] inline HermiteWeights hermite_value_weights(double t0, double t1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, (s3 - 2 * s2 + s) * h, (s3 - s2) * h};
}

[[nodiscard]] inline HermiteWeights hermite_derivative_weights(double t0, double t1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return {(6 * s2 - 6 * s) / h, (-6 * s2 + 6 * s) / h, 3 * s2 - 4 * s + 1, 3 * s2 - 2 * s};
}

}  // namespace avglab::detail
