// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "speclab/discretize2d.hpp"
#include "speclab/eigensolve.hpp"
#include "speclab/oscillator1d.hpp"
#include "speclab/potential.hpp"

namespace speclab {

// ---------------------------------------------------------------------------
// Lattice spectra
// ---------------------------------------------------------------------------

struct SolveOptions {
  double tol = 1e-8;
  int maxit = 4000;
  std::uint64_t seed = 42;
  /// Multigrid preconditioning; Jacobi when false.
  bool multigrid = true;
};

/// Lowest eigenvalues of a truncated lattice operator, merged over the four
/// reflection-parity sectors.
struct LatticeSpectrum {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  std::vector<Sector> sectors;
  int iterations = 0;  ///< summed over sector solves
  bool converged = false;
  /// Nodal values on the full npts x npts lattice (row-major, x outer),
  /// one per eigenvalue, when requested.
  std::vector<std::vector<double>> nodal;
};

/// `count` lowest eigenvalues. The ground state is simple and positive, so
/// count == 1 is solved in the even-even sector alone; otherwise every
/// sector is solved until its largest computed value clears the merged
/// count-th value. The odd-even sector is the x <-> y mirror of even-odd.
LatticeSpectrum solve_lowest(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                             int count, const SolveOptions& options = {}, bool want_vectors = false);

/// Every eigenvalue strictly below `threshold`. Throws std::runtime_error
/// when more than `cap` lie below it.
LatticeSpectrum solve_below(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                            double threshold, int cap = 5000, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Cutoff scans and Dirichlet-Neumann bracketing
// ---------------------------------------------------------------------------

struct CutoffRow {
  double radius = 0.0;
  int npts = 0;
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
};

/// One solve per radius at fixed spacing; rows in input order. A row that
/// fails to converge is flagged, not fatal.
std::vector<CutoffRow> cutoff_scan(const PotentialParams& params, const std::vector<double>& radii,
                                   BoundaryKind bc, int count, double spacing,
                                   const SolveOptions& options = {});

struct BracketRow {
  int index = 0;  ///< 1-based
  double neumann = 0.0;
  double dirichlet = 0.0;
  double gap = 0.0;  ///< dirichlet - neumann
  double neumann_residual = 0.0;
  double dirichlet_residual = 0.0;
};

struct DnBracket {
  double radius = 0.0;
  double spacing = 0.0;
  std::vector<BracketRow> rows;
  bool converged = false;
};

DnBracket dn_bracket(const PotentialParams& params, double radius, double spacing, int count,
                     const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Critical coupling
// ---------------------------------------------------------------------------

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CriticalResult {
  double p = 0.0;
  double lambdastar = 0.0;  ///< midpoint of the final bracket
  double lower = 0.0;       ///< E_1(lower) > 0
  double upper = 0.0;       ///< E_1(upper) < 0
  double e_lower = 0.0;
  double e_upper = 0.0;
  double res_lower = 0.0;
  double res_upper = 0.0;
  double gamma = 0.0;
  int solves = 0;
  /// Both end signs certified: E_1(upper) < 0 is a Ritz upper bound, and
  /// E_1(lower) exceeds its residual.
  bool certified = false;
};

/// Crossing of the lowest Dirichlet eigenvalue through zero as a function of
/// lambda, to bracket width `tol`. The bracket starts at [0, gamma_p + 1].
/// E_1 is concave in lambda, so Newton steps taken from the negative end
/// (slope -<v, r^{2p/(p+2)} v> by Hellmann-Feynman) stay inside the bracket;
/// the step falls back to bisection whenever it would not shrink the bracket.
/// Throws BracketError if E_1(0) < 0 or no negative end is found, and
/// ConvergenceError if an eigen-solve fails.
CriticalResult critical_lambda(double p, double radius, double spacing, double tol = 1e-4,
                               const SolveOptions& options = {});

struct CriticalScan {
  std::vector<double> pvalues;
  std::vector<double> lambdastar;
  std::vector<double> gammacurve;
  /// |lambda*(h) - lambda*(2h)| / 3 + tol per point: the resolution estimate.
  std::vector<double> uncertainty;
  /// gamma_p - lambda*(p) exceeds its uncertainty.
  std::vector<bool> resolved;
  std::vector<std::string> errors;  ///< empty when the point succeeded
  double radius = 0.0;
  double resolution = 0.0;  ///< grid spacing
  /// Consecutive p-values between which the two curves cross, when the scan
  /// resolves a sign change of gamma_p - lambda*(p).
  std::optional<std::pair<double, double>> meeting;
  bool resolution_limited = true;
};

/// lambda*(p) alongside gamma_p for each p in [1, 24]. Failed points are
/// recorded and the scan continues.
CriticalScan critical_surface(const std::vector<double>& pvalues, double radius, double spacing,
                              double tol = 1e-4, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Quasimodes
// ---------------------------------------------------------------------------

enum class PhaseKind { Supercritical, Critical };

std::string to_string(PhaseKind kind);

/// Bump chi(z) = c exp(-1/(1 - u^2)), u = 2z - 3, supported in [1, 2] with
/// integral chi^2 = 1; the constant is computed once by adaptive quadrature.
struct BumpSample {
  double chi;
  double dchi;
  double d2chi;
};
BumpSample bump(double z);
double bump_normalization();

/// Ingredients of one trial state
///   psi_k = k^{-1/(p+2)} h_p(x y^a) e^{i phi(y)} chi(y / k),  a = p/(p+2),
/// with phi' = sqrt(((2p+2) beta/(p+2))^2 y^{2a} + mu) for the supercritical
/// kind and phi = sqrt(mu) y for the critical kind.
struct QuasimodeSpec {
  PotentialParams params{2.0, 0.0};
  double mu = 0.0;
  double k = 1.0;
  double beta = 0.0;
  PhaseKind phasekind = PhaseKind::Supercritical;
  OscillatorSolution oscillator;

  /// Lower limit of the phase integral: (|mu| / (lambda - gamma))^{(p+2)/(2p)}.
  double phase_origin() const;
  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

/// Ground function on the standard quasimode mesh (spacing 1/512).
OscillatorSolution quasimode_oscillator(double p);

/// lambda > gamma_p; beta = ((p+2)/(2p+2)) sqrt(lambda - gamma_p).
QuasimodeSpec make_supercritical(const PotentialParams& params, double mu, double k,
                                 const OscillatorSolution& oscillator);
/// lambda = gamma_p (taken from the oscillator), mu >= 0.
QuasimodeSpec make_critical(double mu, double k, const OscillatorSolution& oscillator);

struct QuasimodeResult {
  double norm = 0.0;
  double residual = 0.0;
  double relative = 0.0;
  double tcut = 0.0;
  int s_intervals = 0;
  int y_intervals = 0;
  double change = 0.0;  ///< relative change at the last refinement
};

/// ||psi_k||, ||(L_p(lambda) - mu) psi_k|| and their ratio, on a tensor
/// Simpson rule in (s, y) = (x y^a, y) over |s| <= T_cut, y in [k, 2k],
/// halving both spacings until norm and residual change by less than 1e-8
/// relative. Throws ConvergenceError if the change is still above 1e-3 at
/// the finest rule.
QuasimodeResult quasimode_residual(const QuasimodeSpec& spec);

// ---------------------------------------------------------------------------
// Eigenvalue moments
// ---------------------------------------------------------------------------

/// C_lambda = max{(gamma - lambda)^{-(p+2)/(p(p+1))}, (gamma - lambda)^{-(p+2)^2/(4p(p+1))}}.
double clambda(double p, double gamma, double lambda);

/// Lambda-dependence of the moment bound with unit prefactor:
///   ((L+1)/g)^{s+(p+1)/p} (|ln((L+1)/g)| + 1) + C^2 (L + C^{2p/(p+2)})^{s+1},
/// g = gamma - lambda, C = C_lambda.
double moment_boundshape(double p, double gamma, double lambda, double biglambda, double sigma);

struct MomentReport {
  PotentialParams params{2.0, 0.0};
  double biglambda = 0.0;
  double sigma = 1.5;
  double radius = 0.0;
  double spacing = 0.0;
  double gamma = 0.0;
  std::vector<double> eigenvalues;
  double moment = 0.0;
  double clambda = 0.0;
  double boundshape = 0.0;
  double ratio = 0.0;
  bool converged = false;
};

/// Sum over Dirichlet eigenvalues mu_j < Lambda of (Lambda - mu_j)^sigma.
/// Dirichlet truncation only raises eigenvalues, so this is a lower bound on
/// the trace. Requires lambda < gamma_p and sigma >= 3/2.
MomentReport moment_sum(const PotentialParams& params, double biglambda, double sigma, double radius,
                        double spacing, const SolveOptions& options = {});

// ---------------------------------------------------------------------------
// Eigenfunctions
// ---------------------------------------------------------------------------

struct EigenfunctionGrid {
  double radius = 0.0;
  int npts = 0;
  double spacing = 0.0;
  int index = 1;
  double eigenvalue = 0.0;
  double residual = 0.0;
  Sector sector = Sector::EvenEven;
  /// npts x npts nodal values, row-major with x outer.
  std::vector<double> values;

  double coordinate(int i) const { return -radius + spacing * i; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * npts + j]; }
};

/// index-th (1-based) eigenfunction on the full lattice, zero on a
/// Dirichlet boundary, positive at the origin (or at its largest entry when
/// it vanishes there), with sum h^2 u^2 = 1.
EigenfunctionGrid export_eigenfunction(const PotentialParams& params, double radius, double spacing,
                                       BoundaryKind bc, int index, const SolveOptions& options = {});

}  // namespace speclab
