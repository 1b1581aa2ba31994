// SPDX-License-Identifier: Apache-2.0
#include "speclab/discretize2d.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace speclab {

Grid2D::Grid2D(double radius, int npts) : radius_(radius), npts_(npts), spacing_(0.0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("Grid2D: radius must be positive");
  }
  if (npts < 9) throw std::invalid_argument("Grid2D: npts must be >= 9");
  if (npts % 2 == 0) throw std::invalid_argument("Grid2D: npts must be odd so the origin is a node");
  spacing_ = 2.0 * radius / (npts - 1);
}

Grid2D build_grid(double radius, int npts) { return Grid2D(radius, npts); }

Grid2D grid_for_spacing(double radius, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid_for_spacing: spacing must be positive");
  const double half = std::round(radius / spacing);
  if (half > 1e6) throw std::invalid_argument("grid_for_spacing: lattice too large");
  return Grid2D(radius, 2 * static_cast<int>(std::max(half, 4.0)) + 1);
}

std::string to_string(BoundaryKind bc) {
  return bc == BoundaryKind::Dirichlet ? "dirichlet" : "neumann";
}

BoundaryKind parse_boundary(const std::string& name) {
  if (name == "dirichlet" || name == "D" || name == "Dirichlet") return BoundaryKind::Dirichlet;
  if (name == "neumann" || name == "N" || name == "Neumann") return BoundaryKind::Neumann;
  throw std::invalid_argument("unknown boundary kind '" + name + "' (expected dirichlet|neumann)");
}

std::string to_string(Sector s) {
  switch (s) {
    case Sector::Full: return "full";
    case Sector::EvenEven: return "even-even";
    case Sector::EvenOdd: return "even-odd";
    case Sector::OddEven: return "odd-even";
    case Sector::OddOdd: return "odd-odd";
  }
  return "unknown";
}

double AxisLayout::sym_off(std::size_t i) const {
  return (-1.0 / spacing) / std::sqrt(mass[i] * mass[i + 1]);
}

AxisLayout make_axis(double origin, double spacing, int intervals, EndKind left, EndKind right) {
  if (intervals < 2) throw std::invalid_argument("make_axis: need at least two intervals");
  AxisLayout ax;
  ax.origin = origin;
  ax.spacing = spacing;
  ax.intervals = intervals;
  ax.left = left;
  ax.right = right;
  const int first = left == EndKind::Eliminated ? 1 : 0;
  const int last = right == EndKind::Eliminated ? intervals - 1 : intervals;
  for (int s = first; s <= last; ++s) {
    const bool half = (s == 0 || s == intervals);
    ax.segment_node.push_back(s);
    ax.coord.push_back(origin + spacing * s);
    ax.mass.push_back(half ? 0.5 * spacing : spacing);
    ax.stiff_diag.push_back(half ? 1.0 / spacing : 2.0 / spacing);
  }
  return ax;
}

namespace {

struct SectorAxes {
  AxisLayout x;
  AxisLayout y;
};

EndKind outer_end(BoundaryKind bc) {
  return bc == BoundaryKind::Dirichlet ? EndKind::Eliminated : EndKind::HalfCell;
}

EndKind mirror_end(bool even) { return even ? EndKind::HalfCell : EndKind::Eliminated; }

SectorAxes sector_axes(const Grid2D& g, BoundaryKind bc, Sector sector) {
  const int n = g.npts() - 1;
  const EndKind outer = outer_end(bc);
  if (sector == Sector::Full) {
    AxisLayout a = make_axis(-g.radius(), g.spacing(), n, outer, outer);
    return {a, a};
  }
  const bool xeven = sector == Sector::EvenEven || sector == Sector::EvenOdd;
  const bool yeven = sector == Sector::EvenEven || sector == Sector::OddEven;
  return {make_axis(0.0, g.spacing(), n / 2, mirror_end(xeven), outer),
          make_axis(0.0, g.spacing(), n / 2, mirror_end(yeven), outer)};
}

}  // namespace

int LatticeOperator::lattice_x(std::size_t i) const {
  return sector == Sector::Full ? x_axis.segment_node[i] : grid.center() + x_axis.segment_node[i];
}

int LatticeOperator::lattice_y(std::size_t j) const {
  return sector == Sector::Full ? y_axis.segment_node[j] : grid.center() + y_axis.segment_node[j];
}

std::vector<double> LatticeOperator::embed(std::span<const double> v) const {
  if (static_cast<std::int64_t>(v.size()) != unknowns()) {
    throw std::invalid_argument("LatticeOperator::embed: size mismatch");
  }
  const int n = grid.npts();
  const int c = grid.center();
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  const double sx = (sector == Sector::OddEven || sector == Sector::OddOdd) ? -1.0 : 1.0;
  const double sy = (sector == Sector::EvenOdd || sector == Sector::OddOdd) ? -1.0 : 1.0;
  for (std::size_t i = 0; i < x_axis.size(); ++i) {
    for (std::size_t j = 0; j < y_axis.size(); ++j) {
      const std::int64_t u = index(i, j);
      const double value = v[static_cast<std::size_t>(u)] / std::sqrt(mass[static_cast<std::size_t>(u)]);
      const int lx = lattice_x(i);
      const int ly = lattice_y(j);
      out[static_cast<std::size_t>(lx) * n + ly] = value;
      if (sector != Sector::Full) {
        const int mx = 2 * c - lx;
        const int my = 2 * c - ly;
        out[static_cast<std::size_t>(mx) * n + ly] = sx * value;
        out[static_cast<std::size_t>(lx) * n + my] = sy * value;
        out[static_cast<std::size_t>(mx) * n + my] = sx * sy * value;
      }
    }
  }
  return out;
}

namespace {

LatticeOperator assemble_impl(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                              Sector sector, bool include_potential) {
  LatticeOperator op;
  op.grid = grid;
  op.bc = bc;
  op.sector = sector;
  auto axes = sector_axes(grid, bc, sector);
  op.x_axis = std::move(axes.x);
  op.y_axis = std::move(axes.y);
  const AxisLayout& ax = op.x_axis;
  const AxisLayout& ay = op.y_axis;
  const std::size_t nx = ax.size();
  const std::size_t ny = ay.size();
  const std::size_t dim = nx * ny;
  if (dim > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw std::invalid_argument("assemble: lattice too large");
  }

  std::vector<double> offx(nx > 0 ? nx - 1 : 0);
  std::vector<double> offy(ny > 0 ? ny - 1 : 0);
  for (std::size_t i = 0; i + 1 < nx; ++i) offx[i] = ax.sym_off(i);
  for (std::size_t j = 0; j + 1 < ny; ++j) offy[j] = ay.sym_off(j);

  std::vector<std::int64_t> rowptr;
  std::vector<std::int32_t> colidx;
  std::vector<double> values;
  rowptr.reserve(dim + 1);
  colidx.reserve(5 * dim);
  values.reserve(5 * dim);
  op.mass.resize(dim);
  op.potential.assign(dim, 0.0);
  rowptr.push_back(0);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t u = i * ny + j;
      const double v = include_potential ? potential_2d(ax.coord[i], ay.coord[j], params) : 0.0;
      op.potential[u] = v;
      op.mass[u] = ax.mass[i] * ay.mass[j];
      auto push = [&](std::size_t col, double val) {
        colidx.push_back(static_cast<std::int32_t>(col));
        values.push_back(val);
      };
      // Column order: (i-1, j), (i, j-1), (i, j), (i, j+1), (i+1, j).
      if (i > 0) push(u - ny, offx[i - 1]);
      if (j > 0) push(u - 1, offy[j - 1]);
      push(u, ax.sym_diag(i) + ay.sym_diag(j) + v);
      if (j + 1 < ny) push(u + 1, offy[j]);
      if (i + 1 < nx) push(u + ny, offx[i]);
      rowptr.push_back(static_cast<std::int64_t>(colidx.size()));
    }
  }
  op.matrix = SparseSymmetric(static_cast<std::int64_t>(dim), std::move(rowptr), std::move(colidx),
                              std::move(values));
  return op;
}

}  // namespace

LatticeOperator assemble_2d(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                            bool include_potential) {
  return assemble_impl(grid, params, bc, Sector::Full, include_potential);
}

LatticeOperator assemble_sector(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                                Sector sector, bool include_potential) {
  return assemble_impl(grid, params, bc, sector, include_potential);
}

std::vector<double> lattice_weights(const Grid2D& grid, BoundaryKind bc) {
  const int n = grid.npts();
  const double h = grid.spacing();
  std::vector<double> w1(static_cast<std::size_t>(n), h);
  if (bc == BoundaryKind::Dirichlet) {
    w1.front() = 0.0;
    w1.back() = 0.0;
  } else {
    w1.front() = 0.5 * h;
    w1.back() = 0.5 * h;
  }
  std::vector<double> w(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(i) * n + j] = w1[i] * w1[j];
  }
  return w;
}

}  // namespace speclab
