// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "speclab/potential.hpp"
#include "speclab/sparse.hpp"

namespace speclab {

/// Uniform lattice on [-R, R]^2 with an odd number of points per axis, so that
/// the origin is a node.
class Grid2D {
 public:
  /// Throws std::invalid_argument unless R > 0, npts odd and npts >= 9.
  Grid2D(double radius, int npts);

  double radius() const noexcept { return radius_; }
  int npts() const noexcept { return npts_; }
  double spacing() const noexcept { return spacing_; }
  int center() const noexcept { return (npts_ - 1) / 2; }
  double coordinate(int i) const noexcept { return -radius_ + spacing_ * i; }

 private:
  double radius_;
  int npts_;
  double spacing_;
};

Grid2D build_grid(double radius, int npts);

/// Grid with spacing as close as possible to `spacing`: npts = 2 round(R/h) + 1.
Grid2D grid_for_spacing(double radius, double spacing);

enum class BoundaryKind { Dirichlet, Neumann };

std::string to_string(BoundaryKind bc);
BoundaryKind parse_boundary(const std::string& name);

/// Reflection-parity sectors of the square lattice. The discretized operator
/// commutes with x -> -x and y -> -y, so its spectrum is the disjoint union of
/// the spectra on the four parity sectors, each posed on the closed quadrant
/// x, y >= 0. `Full` is the unreduced lattice.
enum class Sector { Full, EvenEven, EvenOdd, OddEven, OddOdd };

inline constexpr Sector kParitySectors[] = {Sector::EvenEven, Sector::EvenOdd, Sector::OddEven,
                                            Sector::OddOdd};

std::string to_string(Sector s);

/// How a lattice segment is closed at one end.
enum class EndKind {
  Eliminated,  ///< end node removed from the unknowns (Dirichlet, odd mirror)
  HalfCell,    ///< end node kept with half a control volume (Neumann, even mirror)
};

/// Active nodes of one axis and the one-dimensional finite-volume stiffness
/// and lumped mass on them.
struct AxisLayout {
  double origin = 0.0;    ///< coordinate of segment node 0
  double spacing = 0.0;
  int intervals = 0;
  EndKind left = EndKind::Eliminated;
  EndKind right = EndKind::Eliminated;

  std::vector<int> segment_node;  ///< segment index (0..intervals) of each active node
  std::vector<double> coord;
  std::vector<double> mass;       ///< h or h/2
  std::vector<double> stiff_diag; ///< 2/h, or 1/h at a half cell
  // Link i joins active nodes i and i+1 with stiffness -1/h; ends that were
  // eliminated leave no link.

  std::size_t size() const noexcept { return coord.size(); }
  /// Symmetrized 1D operator M^{-1/2} S M^{-1/2}.
  double sym_diag(std::size_t i) const { return stiff_diag[i] / mass[i]; }
  double sym_off(std::size_t i) const;  ///< between active i and i+1
};

AxisLayout make_axis(double origin, double spacing, int intervals, EndKind left, EndKind right);

/// Discretized operator -Delta + V on a lattice sector, stored as the
/// symmetric matrix A = M^{-1/2} K M^{-1/2} of the lumped finite-volume pair
/// (stiffness K, mass M). Interior rows are the 5-point stencil with 1/h^2
/// scaling plus the nodal potential.
struct LatticeOperator {
  Grid2D grid{1.0, 9};
  BoundaryKind bc = BoundaryKind::Dirichlet;
  Sector sector = Sector::Full;
  AxisLayout x_axis;
  AxisLayout y_axis;
  SparseSymmetric matrix;
  std::vector<double> mass;       ///< M per unknown (h^2 times 1, 1/2 or 1/4)
  std::vector<double> potential;  ///< nodal potential per unknown (zeros if omitted)

  std::int64_t unknowns() const noexcept { return matrix.dim(); }
  /// Unknown index of active node (i, j): row-major over (x, y).
  std::int64_t index(std::size_t i, std::size_t j) const noexcept {
    return static_cast<std::int64_t>(i * y_axis.size() + j);
  }
  /// Lattice column (0..npts-1) of active x node i, and likewise for y.
  int lattice_x(std::size_t i) const;
  int lattice_y(std::size_t j) const;

  /// Re-embed a matrix eigenvector into nodal values on the full
  /// npts x npts lattice (row-major, x outer). Values are v / sqrt(M), the
  /// sector images are filled by reflection with the sector's parities, and
  /// eliminated nodes are zero.
  std::vector<double> embed(std::span<const double> v) const;
};

/// Full-lattice discretization with the given outer boundary condition.
/// Dirichlet eliminates the boundary nodes; Neumann keeps them with
/// half-weighted control volumes so the matrix stays exactly symmetric.
LatticeOperator assemble_2d(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                            bool include_potential = true);

/// Same discretization restricted to one reflection-parity sector.
LatticeOperator assemble_sector(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc,
                                Sector sector, bool include_potential = true);

/// Trapezoid (lumped-mass) weights of the full lattice for the given
/// boundary kind: h^2 inside, halved on edges, quartered at corners for
/// Neumann; zero on the boundary for Dirichlet.
std::vector<double> lattice_weights(const Grid2D& grid, BoundaryKind bc);

}  // namespace speclab
