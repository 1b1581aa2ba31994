// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace speclab {

/// Dense block of column vectors (n rows, one column per vector).
using Block = Eigen::MatrixXd;

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

/// Compressed sparse row storage of a real symmetric matrix. Both triangles
/// are stored, so a row product is a plain CSR product.
///
/// Invariants checked at construction: rowptr is monotone, column indices are
/// strictly increasing within a row, and entry (i,j) equals entry (j,i)
/// bit for bit. Violations throw std::invalid_argument.
class SparseSymmetric {
 public:
  SparseSymmetric() = default;
  SparseSymmetric(std::int64_t dim, std::vector<std::int64_t> rowptr,
                  std::vector<std::int32_t> colidx, std::vector<double> values);

  /// Duplicate (row, col) pairs are summed.
  static SparseSymmetric from_triplets(std::int64_t dim, std::vector<Triplet> triplets);

  std::int64_t dim() const noexcept { return dim_; }
  std::int64_t nnz() const noexcept { return static_cast<std::int64_t>(values_.size()); }
  std::span<const std::int64_t> rowptr() const noexcept { return rowptr_; }
  std::span<const std::int32_t> colidx() const noexcept { return colidx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// Y = A X, column by column.
  void apply(const Block& x, Block& y) const;

  double at(std::int64_t i, std::int64_t j) const;
  std::vector<double> diagonal() const;
  std::int64_t max_row_nnz() const;
  Eigen::MatrixXd to_dense() const;

 private:
  void validate() const;

  std::int64_t dim_ = 0;
  std::vector<std::int64_t> rowptr_{0};
  std::vector<std::int32_t> colidx_;
  std::vector<double> values_;
};

}  // namespace speclab
