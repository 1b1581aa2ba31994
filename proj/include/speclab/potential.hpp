// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace speclab {

/// Parameters (p, lambda) of the operator family
///   -Delta + |xy|^p - lambda (x^2 + y^2)^{p/(p+2)}.
///
/// Construction validates p >= 1 and lambda >= 0 and throws
/// std::invalid_argument otherwise. The radial exponent p/(p+2) is computed
/// once here.
class PotentialParams {
 public:
  PotentialParams(double p, double lambda);

  double p() const noexcept { return p_; }
  double lambda() const noexcept { return lambda_; }

  /// p/(p+2): exponent applied to x^2 + y^2.
  double radial_exponent() const noexcept { return radial_exponent_; }
  /// 2p/(p+2): growth exponent of the negative part along the axes.
  double channel_exponent() const noexcept { return 2.0 * radial_exponent_; }

  PotentialParams with_lambda(double lambda) const { return {p_, lambda}; }

 private:
  double p_;
  double lambda_;
  double radial_exponent_;
};

/// |t|^p, computed as exp(p ln|t|) with an exact zero at t = 0.
inline double abs_pow(double t, double p) noexcept {
  if (t == 0.0) return 0.0;
  return std::exp(p * std::log(std::fabs(t)));
}

/// |xy|^p - lambda (x^2 + y^2)^{p/(p+2)}
inline double potential_2d(double x, double y, const PotentialParams& params) noexcept {
  const double confining = abs_pow(x * y, params.p());
  const double r2 = x * x + y * y;
  const double attractive =
      r2 == 0.0 ? 0.0 : std::exp(params.radial_exponent() * std::log(r2));
  return confining - params.lambda() * attractive;
}

/// |t|^p, the one-dimensional oscillator potential.
inline double potential_1d(double t, double p) noexcept { return abs_pow(t, p); }

}  // namespace speclab
