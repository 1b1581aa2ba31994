// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "speclab/discretize2d.hpp"
#include "speclab/eigensolve.hpp"

namespace speclab {

struct MultigridOptions {
  int pre_smooth = 2;
  int post_smooth = 2;
  double jacobi_weight = 0.8;
  /// Coarsening stops once a level has at most this many unknowns; that
  /// level is factorized exactly (banded Cholesky).
  std::int64_t coarse_unknowns = 4096;
  /// Positive shift added to max(V, 0) in the preconditioned operator.
  double shift = 1.0;
};

/// Geometric multigrid V-cycle for a lattice operator, used as an LOBPCG
/// preconditioner.
///
/// The cycle works on the finite-volume pair behind LatticeOperator and
/// approximates the inverse of K_+ = K_Laplace + M diag(max(V, 0) + shift),
/// which is positive definite for every (p, lambda). Coarse levels are
/// rediscretized on the lattice with doubled spacing, transfers are bilinear
/// interpolation and its transpose, and the smoother is weighted Jacobi with
/// equal pre and post sweeps, so the resulting operator is symmetric positive
/// definite. Applied to LOBPCG residuals in the symmetric basis as
/// w = M^{1/2} V(M^{1/2} r).
class LatticeMultigrid final : public Preconditioner {
 public:
  LatticeMultigrid(const LatticeOperator& op, const PotentialParams& params, bool include_potential,
                   MultigridOptions options = {});
  ~LatticeMultigrid() override;
  LatticeMultigrid(LatticeMultigrid&&) noexcept;
  LatticeMultigrid& operator=(LatticeMultigrid&&) noexcept;

  void apply(const Block& r, Block& w) const override;

  int levels() const noexcept;
  std::int64_t coarsest_unknowns() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Dense-banded Cholesky factorization for symmetric positive definite
/// matrices with |i - j| <= bandwidth outside the band being zero.
class BandedCholesky {
 public:
  BandedCholesky() = default;
  /// Throws std::runtime_error when the matrix is not positive definite.
  BandedCholesky(const SparseSymmetric& a, std::int64_t bandwidth);
  void solve_in_place(std::span<double> b) const;
  std::int64_t dim() const noexcept { return n_; }

 private:
  std::int64_t n_ = 0;
  std::int64_t bw_ = 0;
  std::vector<double> l_;  // row i holds L(i, i-bw .. i)
};

}  // namespace speclab
