// SPDX-License-Identifier: Apache-2.0
#include "speclab/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace speclab {

BandedCholesky::BandedCholesky(const SparseSymmetric& a, std::int64_t bandwidth)
    : n_(a.dim()), bw_(bandwidth), l_(static_cast<std::size_t>(a.dim() * (bandwidth + 1)), 0.0) {
  const auto rowptr = a.rowptr();
  const auto col = a.colidx();
  const auto val = a.values();
  auto L = [&](std::int64_t i, std::int64_t j) -> double& {
    return l_[static_cast<std::size_t>(i * (bw_ + 1) + (j - i + bw_))];
  };
  for (std::int64_t i = 0; i < n_; ++i) {
    for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) {
      const std::int64_t j = col[k];
      if (j > i) continue;
      if (i - j > bw_) throw std::invalid_argument("BandedCholesky: entry outside the band");
      L(i, j) = val[k];
    }
  }
  for (std::int64_t i = 0; i < n_; ++i) {
    const std::int64_t j0 = std::max<std::int64_t>(0, i - bw_);
    for (std::int64_t j = j0; j <= i; ++j) {
      double sum = L(i, j);
      const std::int64_t k0 = std::max(j0, j - bw_);
      for (std::int64_t k = k0; k < j; ++k) sum -= L(i, k) * L(j, k);
      if (j < i) {
        L(i, j) = sum / L(j, j);
      } else {
        if (!(sum > 0.0)) throw std::runtime_error("BandedCholesky: matrix not positive definite");
        L(i, i) = std::sqrt(sum);
      }
    }
  }
}

void BandedCholesky::solve_in_place(std::span<double> b) const {
  auto L = [&](std::int64_t i, std::int64_t j) {
    return l_[static_cast<std::size_t>(i * (bw_ + 1) + (j - i + bw_))];
  };
  for (std::int64_t i = 0; i < n_; ++i) {
    double s = b[i];
    for (std::int64_t k = std::max<std::int64_t>(0, i - bw_); k < i; ++k) s -= L(i, k) * b[k];
    b[i] = s / L(i, i);
  }
  for (std::int64_t i = n_ - 1; i >= 0; --i) {
    double s = b[i];
    for (std::int64_t k = i + 1; k <= std::min(n_ - 1, i + bw_); ++k) s -= L(k, i) * b[k];
    b[i] = s / L(i, i);
  }
}

namespace {

// Rectangular CSR, used for interpolation from a coarse level.
struct Interp {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<std::int64_t> rowptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;

  // fine += P coarse
  void add_prolong(const std::vector<double>& coarse, std::vector<double>& fine) const {
    for (std::int64_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * coarse[col[k]];
      fine[i] += s;
    }
  }
  // coarse = P^T fine
  void restrict_to(const std::vector<double>& fine, std::vector<double>& coarse) const {
    std::fill(coarse.begin(), coarse.end(), 0.0);
    for (std::int64_t i = 0; i < rows; ++i) {
      for (std::int64_t k = rowptr[i]; k < rowptr[i + 1]; ++k) coarse[col[k]] += val[k] * fine[i];
    }
  }
};

struct Weight1D {
  std::vector<std::pair<int, double>> terms;
};

// Linear interpolation weights from a coarse axis (spacing 2h) to a fine one.
std::vector<Weight1D> interp_1d(const AxisLayout& fine, const AxisLayout& coarse) {
  std::vector<int> active(static_cast<std::size_t>(coarse.intervals) + 1, -1);
  for (std::size_t c = 0; c < coarse.size(); ++c) active[coarse.segment_node[c]] = static_cast<int>(c);
  std::vector<Weight1D> out(fine.size());
  for (std::size_t f = 0; f < fine.size(); ++f) {
    const int s = fine.segment_node[f];
    if (s % 2 == 0) {
      if (active[s / 2] >= 0) out[f].terms.push_back({active[s / 2], 1.0});
    } else {
      if (active[(s - 1) / 2] >= 0) out[f].terms.push_back({active[(s - 1) / 2], 0.5});
      if (active[(s + 1) / 2] >= 0) out[f].terms.push_back({active[(s + 1) / 2], 0.5});
    }
  }
  return out;
}

Interp interp_2d(const AxisLayout& fx, const AxisLayout& fy, const AxisLayout& cx, const AxisLayout& cy) {
  const auto wx = interp_1d(fx, cx);
  const auto wy = interp_1d(fy, cy);
  Interp p;
  p.rows = static_cast<std::int64_t>(fx.size() * fy.size());
  p.cols = static_cast<std::int64_t>(cx.size() * cy.size());
  const std::size_t cny = cy.size();
  for (std::size_t i = 0; i < fx.size(); ++i) {
    for (std::size_t j = 0; j < fy.size(); ++j) {
      for (const auto& [ci, a] : wx[i].terms) {
        for (const auto& [cj, b] : wy[j].terms) {
          p.col.push_back(static_cast<std::int32_t>(static_cast<std::size_t>(ci) * cny + cj));
          p.val.push_back(a * b);
        }
      }
      p.rowptr.push_back(static_cast<std::int64_t>(p.col.size()));
    }
  }
  return p;
}

// Finite-volume K_+ on an axis pair: stiffness S x M + M x S plus the mass
// weighted shifted potential.
SparseSymmetric shifted_stiffness(const AxisLayout& ax, const AxisLayout& ay, const PotentialParams& params,
                                  bool include_potential, double shift) {
  const std::size_t nx = ax.size();
  const std::size_t ny = ay.size();
  std::vector<std::int64_t> rowptr{0};
  std::vector<std::int32_t> col;
  std::vector<double> val;
  rowptr.reserve(nx * ny + 1);
  col.reserve(5 * nx * ny);
  val.reserve(5 * nx * ny);
  const double off = -1.0 / ax.spacing;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t u = i * ny + j;
      const double v = include_potential ? potential_2d(ax.coord[i], ay.coord[j], params) : 0.0;
      const double m = ax.mass[i] * ay.mass[j];
      auto push = [&](std::size_t c, double x) {
        col.push_back(static_cast<std::int32_t>(c));
        val.push_back(x);
      };
      // Off-diagonal couplings: x-links scale with the y mass and vice versa.
      if (i > 0) push(u - ny, off * ay.mass[j]);
      if (j > 0) push(u - 1, off * ax.mass[i]);
      push(u, ax.stiff_diag[i] * ay.mass[j] + ax.mass[i] * ay.stiff_diag[j] + m * (std::max(v, 0.0) + shift));
      if (j + 1 < ny) push(u + 1, off * ax.mass[i]);
      if (i + 1 < nx) push(u + ny, off * ay.mass[j]);
      rowptr.push_back(static_cast<std::int64_t>(col.size()));
    }
  }
  return SparseSymmetric(static_cast<std::int64_t>(nx * ny), std::move(rowptr), std::move(col), std::move(val));
}

bool can_coarsen(const AxisLayout& a) { return a.intervals % 2 == 0 && a.intervals / 2 >= 4; }

AxisLayout coarsen(const AxisLayout& a) {
  return make_axis(a.origin, 2.0 * a.spacing, a.intervals / 2, a.left, a.right);
}

}  // namespace

struct LatticeMultigrid::Impl {
  struct Level {
    AxisLayout x;
    AxisLayout y;
    SparseSymmetric k;
    std::vector<double> inv_diag;  // smoothing weight over the diagonal, per row
    Interp from_coarse;  // empty on the coarsest level
    mutable std::vector<double> r, xc, bc;
  };
  std::vector<Level> levels;
  BandedCholesky coarse;
  MultigridOptions opt;
  std::vector<double> sqrt_mass;

  void smooth(const Level& lv, std::span<const double> b, std::vector<double>& x, int sweeps) const {
    const auto n = static_cast<std::size_t>(lv.k.dim());
    for (int s = 0; s < sweeps; ++s) {
      lv.k.apply(x, lv.r);
      for (std::size_t i = 0; i < n; ++i) x[i] += lv.inv_diag[i] * (b[i] - lv.r[i]);
    }
  }

  void vcycle(std::size_t l, std::span<const double> b, std::vector<double>& x) const {
    const Level& lv = levels[l];
    const auto n = static_cast<std::size_t>(lv.k.dim());
    x.assign(n, 0.0);
    if (l + 1 == levels.size()) {
      std::copy(b.begin(), b.end(), x.begin());
      coarse.solve_in_place(x);
      return;
    }
    smooth(lv, b, x, opt.pre_smooth);
    lv.k.apply(x, lv.r);
    for (std::size_t i = 0; i < n; ++i) lv.r[i] = b[i] - lv.r[i];
    const Level& next = levels[l + 1];
    next.bc.resize(static_cast<std::size_t>(next.k.dim()));
    next.from_coarse.restrict_to(lv.r, next.bc);
    std::vector<double> ec;
    vcycle(l + 1, next.bc, ec);
    next.from_coarse.add_prolong(ec, x);
    smooth(lv, b, x, opt.post_smooth);
  }
};

LatticeMultigrid::LatticeMultigrid(const LatticeOperator& op, const PotentialParams& params,
                                   bool include_potential, MultigridOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->opt = options;
  AxisLayout x = op.x_axis;
  AxisLayout y = op.y_axis;
  for (;;) {
    Impl::Level lv;
    lv.k = shifted_stiffness(x, y, params, include_potential, options.shift);
    const auto d = lv.k.diagonal();
    lv.inv_diag.resize(d.size());
    const auto rowptr = lv.k.rowptr();
    const auto col = lv.k.colidx();
    const auto val = lv.k.values();
    for (std::size_t i = 0; i < d.size(); ++i) {
      double off = 0.0;
      for (auto k = rowptr[i]; k < rowptr[i + 1]; ++k)
        if (static_cast<std::size_t>(col[k]) != i) off += std::fabs(val[k]);
      // Rows dominated by the potential take an undamped step: damping
      // would leave a fraction of the prolonged correction where the
      // eigenvectors vanish. Both weights keep 2D/w - K positive definite.
      const double w = d[i] >= 2.0 * off ? 1.0 : options.jacobi_weight;
      lv.inv_diag[i] = w / d[i];
    }
    lv.r.resize(d.size());
    lv.x = x;
    lv.y = y;
    const bool last = lv.k.dim() <= options.coarse_unknowns || !can_coarsen(x) || !can_coarsen(y);
    impl_->levels.push_back(std::move(lv));
    if (last) break;
    AxisLayout cx = coarsen(x);
    AxisLayout cy = coarsen(y);
    x = std::move(cx);
    y = std::move(cy);
  }
  for (std::size_t l = 1; l < impl_->levels.size(); ++l) {
    auto& fine = impl_->levels[l - 1];
    auto& coarse = impl_->levels[l];
    coarse.from_coarse = interp_2d(fine.x, fine.y, coarse.x, coarse.y);
  }
  const auto& last = impl_->levels.back();
  impl_->coarse = BandedCholesky(last.k, static_cast<std::int64_t>(last.y.size()));
  impl_->sqrt_mass.resize(op.mass.size());
  for (std::size_t i = 0; i < op.mass.size(); ++i) impl_->sqrt_mass[i] = std::sqrt(op.mass[i]);
}

LatticeMultigrid::~LatticeMultigrid() = default;
LatticeMultigrid::LatticeMultigrid(LatticeMultigrid&&) noexcept = default;
LatticeMultigrid& LatticeMultigrid::operator=(LatticeMultigrid&&) noexcept = default;

int LatticeMultigrid::levels() const noexcept { return static_cast<int>(impl_->levels.size()); }

std::int64_t LatticeMultigrid::coarsest_unknowns() const noexcept { return impl_->levels.back().k.dim(); }

void LatticeMultigrid::apply(const Block& r, Block& w) const {
  const auto n = static_cast<Eigen::Index>(impl_->sqrt_mass.size());
  if (r.rows() != n) throw std::invalid_argument("LatticeMultigrid::apply: size mismatch");
  w.resize(n, r.cols());
  std::vector<double> b(static_cast<std::size_t>(n));
  std::vector<double> x;
  for (Eigen::Index c = 0; c < r.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = impl_->sqrt_mass[static_cast<std::size_t>(i)] * r(i, c);
    impl_->vcycle(0, b, x);
    for (Eigen::Index i = 0; i < n; ++i) w(i, c) = impl_->sqrt_mass[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  }
}

}  // namespace speclab
