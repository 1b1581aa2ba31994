// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "speclab/eigensolve.hpp"
#include "speclab/rng.hpp"

namespace speclab {

double SpectrumResult::max_residual() const {
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

JacobiPreconditioner::JacobiPreconditioner(const SparseSymmetric& a) {
  const auto d = a.diagonal();
  const double s = d.empty() ? 0.0 : *std::min_element(d.begin(), d.end());
  inv_.resize(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) inv_[static_cast<Eigen::Index>(i)] = 1.0 / (d[i] - s + 1.0);
}

void JacobiPreconditioner::apply(const Block& r, Block& w) const {
  w = inv_.asDiagonal() * r;
}

double certify(const SparseSymmetric& a, double theta, std::span<const double> v) {
  std::vector<double> av(v.size());
  a.apply(v, av);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = av[i] - theta * v[i];
    s += r * r;
  }
  return std::sqrt(s);
}

double rayleigh_quotient(const SparseSymmetric& a, std::span<const double> v) {
  std::vector<double> av(v.size());
  a.apply(v, av);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += v[i] * av[i];
    den += v[i] * v[i];
  }
  return num / den;
}

namespace {

// Orthonormalize the columns of `w` against the orthonormal columns of `basis`
// and among themselves (two passes of modified Gram-Schmidt). Columns whose
// norm collapses below `drop` times their incoming norm are discarded.
Block orthonormalize_against(const Block& basis, Block w, double drop = 1e-10) {
  const Eigen::Index n = w.rows();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double n0 = w.col(j).norm();
    if (!(n0 > 0.0) || !std::isfinite(n0)) continue;
    w.col(j) /= n0;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis.cols() > 0) w.col(j) -= basis * (basis.transpose() * w.col(j));
      for (Eigen::Index i : keep) w.col(j) -= w.col(i) * w.col(i).dot(w.col(j));
    }
    const double n1 = w.col(j).norm();
    if (n1 < drop) continue;
    w.col(j) /= n1;
    keep.push_back(j);
  }
  Block out(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = w.col(keep[k]);
  return out;
}

struct RitzPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Eigen-decomposition of the projected matrix, ordered by value with ties
// broken by the solver's original index.
RitzPairs rayleigh_ritz(const Eigen::MatrixXd& gram) {
  const Eigen::MatrixXd g = 0.5 * (gram + gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::Index s = g.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return es.eigenvalues()[i] < es.eigenvalues()[j];
  });
  RitzPairs out{Eigen::VectorXd(s), Eigen::MatrixXd(s, s)};
  for (Eigen::Index k = 0; k < s; ++k) {
    out.values[k] = es.eigenvalues()[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Block random_block(Eigen::Index n, Eigen::Index m, std::uint64_t seed,
                   std::span<const double> envelope) {
  Lcg64 rng(seed);
  Block x(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.next_symmetric();
  }
  if (!envelope.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) *= envelope[static_cast<std::size_t>(i)];
  }
  return x;
}

}  // namespace

SpectrumResult lobpcg(const SparseSymmetric& a, const LobpcgOptions& opt) {
  const Eigen::Index n = a.dim();
  const int k = opt.count;
  if (k < 1) throw std::invalid_argument("lobpcg: count must be >= 1");
  if (static_cast<std::int64_t>(k) * 4 > n) throw std::invalid_argument("lobpcg: count exceeds dim/4");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("lobpcg: tol must be positive");
  if (!opt.start_envelope.empty() && static_cast<Eigen::Index>(opt.start_envelope.size()) != n) {
    throw std::invalid_argument("lobpcg: envelope size mismatch");
  }
  const Eigen::Index m = std::min<Eigen::Index>(k + std::max(opt.guard, 0), n / 2);

  std::optional<JacobiPreconditioner> fallback;
  if (opt.preconditioner == nullptr) fallback.emplace(a);
  const Preconditioner& prec = opt.preconditioner ? *opt.preconditioner : *fallback;

  Block x = random_block(n, m, opt.seed, opt.start_envelope);
  if (opt.initial != nullptr) {
    if (opt.initial->rows() != n) throw std::invalid_argument("lobpcg: initial block size mismatch");
    const Eigen::Index c = std::min(opt.initial->cols(), m);
    x.leftCols(c) = opt.initial->leftCols(c);
  }
  x = orthonormalize_against(Block(n, 0), x);
  // Refill any columns lost to linear dependence.
  std::uint64_t refill_seed = opt.seed ^ 0x9e3779b97f4a7c15ULL;
  while (x.cols() < m) {
    Block extra = random_block(n, m - x.cols(), refill_seed++, opt.start_envelope);
    Block more = orthonormalize_against(x, extra);
    Block merged(n, x.cols() + more.cols());
    merged << x, more;
    x = std::move(merged);
  }

  Block ax;
  a.apply(x, ax);
  RitzPairs rr = rayleigh_ritz(x.transpose() * ax);
  x = x * rr.vectors;
  ax = ax * rr.vectors;
  Eigen::VectorXd theta = rr.values;

  Block p(n, 0);
  SpectrumResult out;
  Eigen::VectorXd res(m);
  int it = 0;
  for (;; ++it) {
    Block r = ax - x * theta.asDiagonal();
    for (Eigen::Index j = 0; j < m; ++j) res[j] = r.col(j).norm();
    bool done = true;
    for (int j = 0; j < k; ++j) done = done && res[j] <= opt.tol;
    if (done) {
      out.converged = true;
      break;
    }
    if (it >= opt.maxit) break;

    // Soft locking: converged columns stay in the Ritz basis but contribute
    // no new search directions.
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (res[j] > opt.tol) active.push_back(j);
    }
    Block ra(n, static_cast<Eigen::Index>(active.size()));
    for (std::size_t q = 0; q < active.size(); ++q) ra.col(static_cast<Eigen::Index>(q)) = r.col(active[q]);
    Block w;
    prec.apply(ra, w);
    w = orthonormalize_against(x, std::move(w));
    if (w.cols() == 0) break;  // stagnation at rounding level
    Block xw(n, x.cols() + w.cols());
    xw << x, w;
    Block pn = p.cols() > 0 ? orthonormalize_against(xw, p) : Block(n, 0);

    Block aw;
    a.apply(w, aw);
    Block apn;
    if (pn.cols() > 0) a.apply(pn, apn);

    const Eigen::Index sw = w.cols();
    const Eigen::Index sp = pn.cols();
    Block s(n, m + sw + sp);
    Block as(n, m + sw + sp);
    if (sp > 0) {
      s << x, w, pn;
      as << ax, aw, apn;
    } else {
      s << x, w;
      as << ax, aw;
    }
    rr = rayleigh_ritz(s.transpose() * as);
    const Eigen::MatrixXd c = rr.vectors.leftCols(m);
    theta = rr.values.head(m);

    // New search directions from the W and P parts of the active Ritz vectors.
    const Eigen::MatrixXd cwp = c.bottomRows(sw + sp);
    Eigen::MatrixXd cact(sw + sp, static_cast<Eigen::Index>(active.size()));
    for (std::size_t q = 0; q < active.size(); ++q) cact.col(static_cast<Eigen::Index>(q)) = cwp.col(active[q]);
    p = s.rightCols(sw + sp) * cact;

    x = s * c;
    // Re-orthonormalize against drift and refresh A X exactly.
    Block xo = orthonormalize_against(Block(n, 0), x, 0.0);
    if (xo.cols() == m) x = std::move(xo);
    a.apply(x, ax);
    for (Eigen::Index j = 0; j < m; ++j) theta[j] = x.col(j).dot(ax.col(j));
  }

  out.iterations = it;
  // Report the pairs in final Ritz order with explicitly recomputed residuals.
  Block r = ax - x * theta.asDiagonal();
  for (int j = 0; j < k; ++j) {
    out.eigenvalues.push_back(theta[j]);
    out.residuals.push_back(r.col(j).norm());
  }
  if (out.converged) {
    for (int j = 0; j < k; ++j) out.converged = out.converged && out.residuals[static_cast<std::size_t>(j)] <= opt.tol;
  }
  out.eigenvectors = x.leftCols(k);
  return out;
}

SpectrumResult lobpcg(const SparseSymmetric& a, int count, double tol, int maxit, std::uint64_t seed) {
  LobpcgOptions opt;
  opt.count = count;
  opt.tol = tol;
  opt.maxit = maxit;
  opt.seed = seed;
  return lobpcg(a, opt);
}

}  // namespace speclab
