// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "speclab/sparse.hpp"

namespace speclab {

/// Lowest part of a symmetric spectrum.
///
/// `residuals[j]` is ||A v_j - theta_j v_j|| for unit v_j when eigenvectors are
/// produced (LOBPCG, dense oracle). For Sturm bisection, which produces no
/// vectors, it is the width of the final bracket that contains the eigenvalue.
struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  int iterations = 0;
  bool converged = false;
  /// Unit eigenvectors as columns, matched to `eigenvalues`.
  std::optional<Block> eigenvectors;

  double max_residual() const;
};

/// Thrown by routines that need a converged answer to continue.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Tridiagonal
// ---------------------------------------------------------------------------

struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;  // size diag.size() - 1

  std::size_t size() const noexcept { return diag.size(); }
};

/// Number of eigenvalues strictly below theta (Sturm count via the LDL^T
/// pivot recurrence).
std::int64_t sturm_count(const SymTridiagonal& t, double theta);

/// [lower, upper] Gershgorin enclosure of the spectrum.
std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t);

/// index-th smallest eigenvalue (0-based) by bisection on the Sturm count,
/// to absolute width `tol` or until the bracket stops shrinking in floating
/// point. Returns the bracket midpoint; `width` receives the final width.
double tridiag_eigenvalue(const SymTridiagonal& t, std::int64_t index, double tol,
                          double* width = nullptr);

/// `count` smallest eigenvalues of a symmetric tridiagonal matrix.
SpectrumResult tridiag_lowest(std::span<const double> diag, std::span<const double> offdiag,
                              int count, double tol);

/// Solve (T - shift) x = b for tridiagonal T by Gaussian elimination with
/// partial pivoting. Used by inverse iteration.
std::vector<double> tridiag_solve_shifted(const SymTridiagonal& t, double shift,
                                          std::span<const double> rhs);

// ---------------------------------------------------------------------------
// Dense oracle
// ---------------------------------------------------------------------------

inline constexpr std::int64_t kDenseOracleMaxDim = 2500;

/// Full spectrum by cyclic Jacobi rotations, iterated until the off-diagonal
/// Frobenius norm drops below 1e-12 (relative to ||A||_F when ||A||_F > 1).
/// Returns the `count` lowest. Throws std::invalid_argument for dim > 2500.
SpectrumResult dense_oracle(const Eigen::MatrixXd& a, int count, bool want_vectors = false);

// ---------------------------------------------------------------------------
// LOBPCG
// ---------------------------------------------------------------------------

/// Symmetric positive definite approximation of an inverse, applied to a
/// block of residuals.
class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const Block& r, Block& w) const = 0;
};

/// M = (diag(A) - s + 1)^{-1} with s = min diag(A).
class JacobiPreconditioner final : public Preconditioner {
 public:
  explicit JacobiPreconditioner(const SparseSymmetric& a);
  void apply(const Block& r, Block& w) const override;

 private:
  Eigen::VectorXd inv_;
};

struct LobpcgOptions {
  int count = 1;
  double tol = 1e-8;
  int maxit = 2000;
  std::uint64_t seed = 42;
  /// Extra block vectors beyond `count`.
  int guard = 3;
  /// Defaults to JacobiPreconditioner when null.
  const Preconditioner* preconditioner = nullptr;
  /// Optional starting vectors; missing columns are filled from the LCG.
  const Block* initial = nullptr;
  /// Optional per-row scale applied to the random start (e.g. to keep the
  /// start small where the diagonal is huge). Empty means unscaled.
  std::span<const double> start_envelope{};
};

/// `count` lowest eigenpairs. Block size count + guard, soft locking of
/// converged columns, modified Gram-Schmidt orthonormalization of the trial
/// basis every iteration. Deterministic for a fixed seed. On maxit exhaustion
/// returns converged = false with best-effort pairs.
SpectrumResult lobpcg(const SparseSymmetric& a, const LobpcgOptions& options);

/// Convenience form with the Jacobi preconditioner.
SpectrumResult lobpcg(const SparseSymmetric& a, int count, double tol, int maxit,
                      std::uint64_t seed);

/// ||A v - theta v||_2 for the given pair (v assumed unit).
double certify(const SparseSymmetric& a, double theta, std::span<const double> v);

/// Rayleigh quotient v^T A v / v^T v.
double rayleigh_quotient(const SparseSymmetric& a, std::span<const double> v);

}  // namespace speclab
