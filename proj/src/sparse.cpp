// SPDX-License-Identifier: Apache-2.0
#include "speclab/sparse.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace speclab {

SparseSymmetric::SparseSymmetric(std::int64_t dim, std::vector<std::int64_t> rowptr,
                                 std::vector<std::int32_t> colidx, std::vector<double> values)
    : dim_(dim), rowptr_(std::move(rowptr)), colidx_(std::move(colidx)), values_(std::move(values)) {
  validate();
}

SparseSymmetric SparseSymmetric::from_triplets(std::int64_t dim, std::vector<Triplet> triplets) {
  if (dim < 0 || dim > std::numeric_limits<std::int32_t>::max()) {
    throw std::invalid_argument("SparseSymmetric: dimension out of range");
  }
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim) {
      throw std::invalid_argument("SparseSymmetric: triplet index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::int64_t> rowptr(static_cast<std::size_t>(dim) + 1, 0);
  std::vector<std::int32_t> colidx;
  std::vector<double> values;
  colidx.reserve(triplets.size());
  values.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      values.back() += t.value;
      continue;
    }
    colidx.push_back(static_cast<std::int32_t>(t.col));
    values.push_back(t.value);
    rowptr[static_cast<std::size_t>(t.row) + 1] += 1;
  }
  for (std::size_t i = 1; i < rowptr.size(); ++i) rowptr[i] += rowptr[i - 1];
  return SparseSymmetric(dim, std::move(rowptr), std::move(colidx), std::move(values));
}

void SparseSymmetric::validate() const {
  if (rowptr_.size() != static_cast<std::size_t>(dim_) + 1 || rowptr_.front() != 0 ||
      rowptr_.back() != static_cast<std::int64_t>(colidx_.size()) ||
      colidx_.size() != values_.size()) {
    throw std::invalid_argument("SparseSymmetric: inconsistent CSR arrays");
  }
  for (std::int64_t i = 0; i < dim_; ++i) {
    if (rowptr_[i + 1] < rowptr_[i]) {
      throw std::invalid_argument("SparseSymmetric: rowptr not monotone");
    }
    for (std::int64_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k) {
      if (colidx_[k] < 0 || colidx_[k] >= dim_) {
        throw std::invalid_argument("SparseSymmetric: column index out of range");
      }
      if (k > rowptr_[i] && colidx_[k] <= colidx_[k - 1]) {
        throw std::invalid_argument("SparseSymmetric: column indices not strictly increasing");
      }
    }
  }
  for (std::int64_t i = 0; i < dim_; ++i) {
    for (std::int64_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k) {
      const std::int64_t j = colidx_[k];
      if (j == i) continue;
      // Binary search row j for column i.
      const auto first = colidx_.begin() + rowptr_[j];
      const auto last = colidx_.begin() + rowptr_[j + 1];
      const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(i));
      if (it == last || *it != i || values_[static_cast<std::size_t>(it - colidx_.begin())] != values_[k]) {
        throw std::invalid_argument("SparseSymmetric: matrix is not exactly symmetric at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

void SparseSymmetric::apply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<std::int64_t>(x.size()) != dim_ || static_cast<std::int64_t>(y.size()) != dim_) {
    throw std::invalid_argument("SparseSymmetric::apply: size mismatch");
  }
  const double* val = values_.data();
  const std::int32_t* col = colidx_.data();
  for (std::int64_t i = 0; i < dim_; ++i) {
    double sum = 0.0;
    for (std::int64_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k) sum += val[k] * x[col[k]];
    y[i] = sum;
  }
}

void SparseSymmetric::apply(const Block& x, Block& y) const {
  if (x.rows() != dim_) throw std::invalid_argument("SparseSymmetric::apply: size mismatch");
  y.resize(dim_, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    apply(std::span<const double>(x.col(c).data(), static_cast<std::size_t>(dim_)),
          std::span<double>(y.col(c).data(), static_cast<std::size_t>(dim_)));
  }
}

double SparseSymmetric::at(std::int64_t i, std::int64_t j) const {
  const auto first = colidx_.begin() + rowptr_[i];
  const auto last = colidx_.begin() + rowptr_[i + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - colidx_.begin())];
}

std::vector<double> SparseSymmetric::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
  for (std::int64_t i = 0; i < dim_; ++i) d[i] = at(i, i);
  return d;
}

std::int64_t SparseSymmetric::max_row_nnz() const {
  std::int64_t m = 0;
  for (std::int64_t i = 0; i < dim_; ++i) m = std::max(m, rowptr_[i + 1] - rowptr_[i]);
  return m;
}

Eigen::MatrixXd SparseSymmetric::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_, dim_);
  for (std::int64_t i = 0; i < dim_; ++i) {
    for (std::int64_t k = rowptr_[i]; k < rowptr_[i + 1]; ++k) d(i, colidx_[k]) = values_[k];
  }
  return d;
}

}  // namespace speclab
