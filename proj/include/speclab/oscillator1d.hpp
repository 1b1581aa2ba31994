// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "speclab/eigensolve.hpp"

namespace speclab {

/// Ground state of the anharmonic oscillator -u'' + |t|^p u on the half line
/// [0, L] (even-symmetry reduction: mirror node at t = 0, Dirichlet wall at L).
struct OscillatorSolution {
  double p = 2.0;
  double halflength = 0.0;
  int meshcount = 0;
  double spacing = 0.0;
  double gamma = 0.0;
  /// n + 1 samples at t_i = i * spacing; the wall sample is zero.
  std::vector<double> hvalues;
  std::vector<double> hprime;
  /// (|t_i|^p - gamma) h_i, so the eigen-identity holds at every node.
  std::vector<double> hsecond;
  bool extrapolated = false;

  struct Sample {
    double h;
    double dh;
    double d2h;
  };

  /// Piecewise cubic Hermite interpolation of h, h', h'' at any real t
  /// (even extension; zero beyond the wall).
  Sample evaluate(double t) const;

  /// Smallest T such that |h| sampled on [T, L] stays below `threshold`.
  double tail_cutoff(double threshold) const;

  /// Trapezoid norm^2 of the even extension over [-L, L].
  double norm2() const;
};

/// Tridiagonal finite-difference matrix of -d^2/dt^2 + |t|^p on [0, L] with
/// n intervals: mirror (Neumann) node at t = 0 and Dirichlet at t = L, which
/// is eliminated, leaving n unknowns t_0 .. t_{n-1}. The t = 0 row is
/// half-weighted and symmetrized, giving offdiag[0] = -sqrt(2)/h^2.
/// Throws std::invalid_argument for n < 16 or L <= 0.
SymTridiagonal assemble_oscillator(double p, double halflength, int n, bool include_potential = true);

/// Same stencil with Neumann ends at both t = 0 and t = k (n + 1 unknowns).
SymTridiagonal assemble_neumann_oscillator(double p, double k, int n);

struct GammaReport {
  double gamma = 0.0;
  double halflength = 0.0;
  int meshcount = 0;        ///< finer mesh of the accepted Richardson pair
  double change = 0.0;      ///< |difference| of the last two extrapolants
  int refinements = 0;
};

/// Half-length of the computational interval before the doubling check:
/// max(8, 4 (3 * 3)^{1/p}), with 3 bounding gamma_p from above for p >= 1.
double default_halflength(double p);

/// Lowest eigenvalue of the mirror/Dirichlet oscillator on a given mesh.
double oscillator_eigenvalue(double p, double halflength, int n);

/// Richardson extrapolant (4 E_{h/2} - E_h) / 3 on meshes n and 2n.
double gamma_on_mesh(double p, double halflength, int n);

/// gamma_p = inf spec(-d^2/dt^2 + |t|^p) to accuracy `tol`. Throws
/// ConvergenceError when successive extrapolants still disagree by more than
/// tol at the finest admissible mesh, std::invalid_argument on p < 1 or
/// tol < 1e-8.
GammaReport gamma_report(double p, double tol);
double gamma(double p, double tol = 1e-8);

struct GammaMinimum {
  double pstar = 0.0;
  double gammastar = 0.0;
  int evaluations = 0;
};

/// Golden-section minimization of p -> gamma_p over [plo, phi]. All
/// evaluations share one mesh, refined up front to reach tol / 10, so the
/// objective is a smooth function of p.
GammaMinimum gamma_min(double plo, double phi, double tol);

/// Ground function on the mesh (L, n): eigenvalue by Sturm bisection,
/// eigenvector by inverse iteration, gamma from the (n, 2n) Richardson pair.
/// Throws ConvergenceError if inverse iteration stagnates.
OscillatorSolution ground_function(double p, double halflength, int n);

/// Lowest eigenvalue of -d^2/dx^2 + |x|^p on [-k, k] with Neumann ends,
/// mesh-converged by Richardson extrapolation. Uses the same mesh sequence
/// as gamma_report so that the two are directly comparable.
double truncated_gamma(double p, double k, double tol = 1e-8);

}  // namespace speclab
