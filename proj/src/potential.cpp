// SPDX-License-Identifier: Apache-2.0
#include "speclab/potential.hpp"

#include <stdexcept>
#include <string>

namespace speclab {

PotentialParams::PotentialParams(double p, double lambda)
    : p_(p), lambda_(lambda), radial_exponent_(p / (p + 2.0)) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("PotentialParams: p must be >= 1, got " + std::to_string(p));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("PotentialParams: lambda must be >= 0, got " +
                                std::to_string(lambda));
  }
}

}  // namespace speclab
