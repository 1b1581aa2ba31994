// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "speclab/eigensolve.hpp"

namespace speclab {

namespace {

double pivot_floor(const SymTridiagonal& t) {
  double bmax = 0.0;
  for (double b : t.offdiag) bmax = std::max(bmax, b * b);
  return std::numeric_limits<double>::min() * std::max(1.0, bmax);
}

void check_shape(const SymTridiagonal& t) {
  if (t.diag.empty() || t.offdiag.size() + 1 != t.diag.size()) {
    throw std::invalid_argument("SymTridiagonal: offdiag must have size diag.size() - 1");
  }
}

}  // namespace

std::int64_t sturm_count(const SymTridiagonal& t, double theta) {
  check_shape(t);
  const double pivmin = pivot_floor(t);
  std::int64_t count = 0;
  double q = t.diag[0] - theta;
  if (std::fabs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.diag.size(); ++i) {
    const double b = t.offdiag[i - 1];
    q = (t.diag[i] - theta) - b * b / q;
    if (std::fabs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

std::pair<double, double> gershgorin_bounds(const SymTridiagonal& t) {
  check_shape(t);
  const std::size_t n = t.diag.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::fabs(t.offdiag[i - 1]);
    if (i + 1 < n) radius += std::fabs(t.offdiag[i]);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }
  // Widen slightly so that the count at the ends is unambiguous.
  const double pad = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi)) +
                     std::numeric_limits<double>::min();
  return {lo - pad, hi + pad};
}

double tridiag_eigenvalue(const SymTridiagonal& t, std::int64_t index, double tol, double* width) {
  check_shape(t);
  if (index < 0 || index >= static_cast<std::int64_t>(t.size())) {
    throw std::invalid_argument("tridiag_eigenvalue: index out of range");
  }
  auto [lo, hi] = gershgorin_bounds(t);
  if (index == 0) {
    // The smallest eigenvalue never exceeds the smallest diagonal entry.
    const double dmin = *std::min_element(t.diag.begin(), t.diag.end());
    const double cap = dmin + 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(dmin) +
                       std::numeric_limits<double>::min();
    hi = std::min(hi, cap);
  }
  // Invariant: count(lo) <= index < count(hi).
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) > index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (width != nullptr) *width = hi - lo;
  return 0.5 * (lo + hi);
}

SpectrumResult tridiag_lowest(std::span<const double> diag, std::span<const double> offdiag,
                              int count, double tol) {
  if (count < 1 || static_cast<std::size_t>(count) > diag.size()) {
    throw std::invalid_argument("tridiag_lowest: count must be in [1, n]");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tridiag_lowest: tol must be positive");
  SymTridiagonal t{{diag.begin(), diag.end()}, {offdiag.begin(), offdiag.end()}};
  SpectrumResult out;
  out.eigenvalues.reserve(static_cast<std::size_t>(count));
  out.residuals.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    double w = 0.0;
    out.eigenvalues.push_back(tridiag_eigenvalue(t, j, tol, &w));
    out.residuals.push_back(w);
  }
  out.converged = true;
  return out;
}

std::vector<double> tridiag_solve_shifted(const SymTridiagonal& t, double shift,
                                          std::span<const double> rhs) {
  check_shape(t);
  const std::size_t n = t.size();
  if (rhs.size() != n) throw std::invalid_argument("tridiag_solve_shifted: size mismatch");
  // Row i holds (sub, diag, super, super2) after pivoting, as in LAPACK dgtsv.
  std::vector<double> sub(t.offdiag), d(n), sup(t.offdiag), sup2(n, 0.0), x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
  sup.push_back(0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::fabs(d[i]) >= std::fabs(sub[i])) {
      if (d[i] == 0.0) d[i] = std::numeric_limits<double>::min();
      const double f = sub[i] / d[i];
      d[i + 1] -= f * sup[i];
      x[i + 1] -= f * x[i];
    } else {
      // Swap rows i and i+1.
      const double f = d[i] / sub[i];
      d[i] = sub[i];
      const double tmp_d = d[i + 1];
      d[i + 1] = sup[i] - f * tmp_d;
      sup2[i] = sup[i + 1];
      sup[i + 1] = -f * sup[i + 1];
      sup[i] = tmp_d;
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = std::numeric_limits<double>::min();
  x[n - 1] /= d[n - 1];
  if (n == 1) return x;
  x[n - 2] = (x[n - 2] - sup[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t ii = n - 2; ii-- > 0;) {
    x[ii] = (x[ii] - sup[ii] * x[ii + 1] - sup2[ii] * x[ii + 2]) / d[ii];
  }
  return x;
}

}  // namespace speclab
