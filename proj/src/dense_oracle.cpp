// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "speclab/eigensolve.hpp"

namespace speclab {

namespace {

// Cyclic Jacobi on a full row-major copy, swept in round-robin (tournament)
// order: each round pairs every index exactly once, and the n/2 disjoint
// rotations of a round are applied first to the rows, then to the columns
// row by row, so every access is contiguous.
struct JacobiWorkspace {
  std::size_t n;
  std::vector<double> a;   // row-major n x n
  std::vector<double> vt;  // eigenvectors as rows, empty when not requested

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }

  double off_norm2() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
    }
    return s;
  }

  struct Rotation {
    std::size_t p, q;
    double c, s, t;
  };

  static void rotate_pair(double* xp, double* xq, std::size_t len, double c, double s) {
    for (std::size_t k = 0; k < len; ++k) {
      const double u = xp[k];
      const double w = xq[k];
      xp[k] = c * u - s * w;
      xq[k] = s * u + c * w;
    }
  }

  void apply_round(const std::vector<Rotation>& rot) {
    for (const Rotation& r : rot) rotate_pair(&a[r.p * n], &a[r.q * n], n, r.c, r.s);
    for (std::size_t k = 0; k < n; ++k) {
      double* row = &a[k * n];
      for (const Rotation& r : rot) {
        const double u = row[r.p];
        const double w = row[r.q];
        row[r.p] = r.c * u - r.s * w;
        row[r.q] = r.s * u + r.c * w;
      }
    }
    if (!vt.empty()) {
      for (const Rotation& r : rot) rotate_pair(&vt[r.p * n], &vt[r.q * n], n, r.c, r.s);
    }
  }

  // One sweep over all n(n-1)/2 pairs.
  void sweep() {
    const std::size_t m = n + (n % 2);  // a dummy player when n is odd
    std::vector<std::size_t> players(m);
    std::iota(players.begin(), players.end(), 0);
    std::vector<Rotation> rot;
    rot.reserve(m / 2);
    for (std::size_t round = 0; round + 1 < m; ++round) {
      rot.clear();
      for (std::size_t i = 0; i < m / 2; ++i) {
        std::size_t p = players[i];
        std::size_t q = players[m - 1 - i];
        if (p >= n || q >= n) continue;
        if (p > q) std::swap(p, q);
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Entries far below the diagonal scale cannot move the eigenvalues.
        if (std::fabs(apq) < 1e-18 * (std::fabs(app) + std::fabs(aqq))) {
          at(p, q) = 0.0;
          at(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        rot.push_back({p, q, c, t * c, t});
      }
      std::vector<double> apq(rot.size()), app(rot.size()), aqq(rot.size());
      for (std::size_t r = 0; r < rot.size(); ++r) {
        apq[r] = at(rot[r].p, rot[r].q);
        app[r] = at(rot[r].p, rot[r].p);
        aqq[r] = at(rot[r].q, rot[r].q);
      }
      apply_round(rot);
      for (std::size_t r = 0; r < rot.size(); ++r) {
        const auto [p, q, c, s, t] = rot[r];
        at(p, p) = app[r] - t * apq[r];
        at(q, q) = aqq[r] + t * apq[r];
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
      // Circle method: keep players[0] fixed, rotate the rest by one.
      std::rotate(players.begin() + 1, players.end() - 1, players.end());
    }
  }
};

}  // namespace

SpectrumResult dense_oracle(const Eigen::MatrixXd& a, int count, bool want_vectors) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (a.rows() != a.cols()) throw std::invalid_argument("dense_oracle: matrix must be square");
  if (a.rows() > kDenseOracleMaxDim) {
    throw std::invalid_argument("dense_oracle: dimension exceeds 2500");
  }
  if (count < 1 || static_cast<std::size_t>(count) > n) {
    throw std::invalid_argument("dense_oracle: count must be in [1, n]");
  }
  JacobiWorkspace ws{n, std::vector<double>(n * n), {}};
  double frob2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // Symmetrize defensively against asymmetric inputs from dense callers.
      ws.at(i, j) = 0.5 * (a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                           a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
      frob2 += ws.at(i, j) * ws.at(i, j);
    }
  }
  if (want_vectors) {
    ws.vt.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) ws.vt[i * n + i] = 1.0;
  }
  const double target = 1e-12 * std::max(1.0, std::sqrt(frob2));
  const double target2 = target * target;
  int sweeps = 0;
  constexpr int kMaxSweeps = 60;
  while (ws.off_norm2() > target2 && sweeps < kMaxSweeps) {
    ws.sweep();
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return ws.at(i, i) < ws.at(j, j); });

  SpectrumResult out;
  out.iterations = sweeps;
  out.converged = ws.off_norm2() <= target2;
  const double residual_bound = std::sqrt(ws.off_norm2());
  for (int j = 0; j < count; ++j) {
    out.eigenvalues.push_back(ws.at(order[j], order[j]));
    out.residuals.push_back(residual_bound);
  }
  if (want_vectors) {
    Block v(static_cast<Eigen::Index>(n), count);
    for (int j = 0; j < count; ++j) {
      for (std::size_t k = 0; k < n; ++k) v(static_cast<Eigen::Index>(k), j) = ws.vt[order[j] * n + k];
    }
    out.eigenvectors = std::move(v);
  }
  return out;
}

}  // namespace speclab
