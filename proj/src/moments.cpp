// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <stdexcept>

#include "speclab/experiments.hpp"

namespace speclab {

double clambda(double p, double gamma, double lambda) {
  const double g = gamma - lambda;
  if (!(g > 0.0)) throw std::invalid_argument("clambda: needs lambda < gamma_p");
  const double e1 = (p + 2.0) / (p * (p + 1.0));
  const double e2 = (p + 2.0) * (p + 2.0) / (4.0 * p * (p + 1.0));
  return std::max(std::pow(g, -e1), std::pow(g, -e2));
}

double moment_boundshape(double p, double gamma, double lambda, double biglambda, double sigma) {
  const double g = gamma - lambda;
  const double c = clambda(p, gamma, lambda);
  const double q = (biglambda + 1.0) / g;
  const double first = std::pow(q, sigma + (p + 1.0) / p) * (std::fabs(std::log(q)) + 1.0);
  const double second = c * c * std::pow(biglambda + std::pow(c, 2.0 * p / (p + 2.0)), sigma + 1.0);
  return first + second;
}

MomentReport moment_sum(const PotentialParams& params, double biglambda, double sigma, double radius, double spacing,
                        const SolveOptions& options) {
  if (!(sigma >= 1.5)) throw std::invalid_argument("moment_sum: sigma must be >= 3/2");
  if (!(biglambda >= 0.0) || !std::isfinite(biglambda)) throw std::invalid_argument("moment_sum: Lambda must be >= 0");
  MomentReport r;
  r.params = params;
  r.biglambda = biglambda;
  r.sigma = sigma;
  r.gamma = speclab::gamma(params.p(), 1e-8);
  if (!(params.lambda() < r.gamma)) throw std::invalid_argument("moment_sum: needs lambda < gamma_p");
  const Grid2D grid = grid_for_spacing(radius, spacing);
  r.radius = grid.radius();
  r.spacing = grid.spacing();
  const LatticeSpectrum s = solve_below(grid, params, BoundaryKind::Dirichlet, biglambda, 5000, options);
  r.converged = s.converged;
  r.eigenvalues = s.eigenvalues;
  for (double mu : r.eigenvalues) r.moment += std::pow(biglambda - mu, sigma);
  r.clambda = clambda(params.p(), r.gamma, params.lambda());
  r.boundshape = moment_boundshape(params.p(), r.gamma, params.lambda(), biglambda, sigma);
  r.ratio = r.moment / r.boundshape;
  return r;
}

}  // namespace speclab
