// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "speclab/experiments.hpp"
#include "speclab/multigrid.hpp"
#include "speclab/workqueue.hpp"

namespace speclab {

namespace {

struct SectorSolve {
  LatticeOperator op;
  SpectrumResult result;
};

// Lowest `count` pairs of one sector operator. Tiny sectors that cannot hold
// an LOBPCG block go to the dense oracle.
SpectrumResult solve_operator(const LatticeOperator& op, const PotentialParams& params, int count,
                              const SolveOptions& options, const Block* initial) {
  const std::int64_t dim = op.unknowns();
  if (4 * static_cast<std::int64_t>(count) > dim) {
    if (dim > kDenseOracleMaxDim) throw std::invalid_argument("solve: too many eigenvalues requested");
    SpectrumResult r = dense_oracle(op.matrix.to_dense(), std::min<int>(count, static_cast<int>(dim)), true);
    for (int j = 0; j < static_cast<int>(r.eigenvalues.size()); ++j) {
      r.residuals[j] = certify(op.matrix, r.eigenvalues[j],
                               std::span<const double>(r.eigenvectors->col(j).data(), dim));
    }
    r.converged = r.max_residual() <= options.tol;
    return r;
  }
  std::vector<double> envelope(op.potential.size());
  std::transform(op.potential.begin(), op.potential.end(), envelope.begin(),
                 [](double v) { return 1.0 / (1.0 + std::max(v, 0.0)); });
  std::optional<LatticeMultigrid> mg;
  if (options.multigrid) mg.emplace(op, params, true);
  LobpcgOptions lo;
  lo.count = count;
  lo.tol = options.tol;
  lo.maxit = options.maxit;
  lo.seed = options.seed;
  lo.preconditioner = mg ? &*mg : nullptr;
  lo.initial = initial;
  lo.start_envelope = envelope;
  return lobpcg(op.matrix, lo);
}

SectorSolve solve_sector(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc, Sector sector,
                         int count, const SolveOptions& options, const Block* initial = nullptr) {
  SectorSolve s{assemble_sector(grid, params, bc, sector), {}};
  s.result = solve_operator(s.op, params, count, options, initial);
  return s;
}

std::vector<double> transpose_nodal(const std::vector<double>& v, int n) {
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j) * n + i] = v[static_cast<std::size_t>(i) * n + j];
  }
  return out;
}

struct Candidate {
  double value;
  double residual;
  Sector sector;
  int local;      // index within the sector solve
  int solve_slot; // which SectorSolve it came from
};

// The x <-> y exchange maps the even-odd sector onto odd-even, so that sector
// is solved once and reported twice.
constexpr Sector kSolvedSectors[] = {Sector::EvenEven, Sector::EvenOdd, Sector::OddOdd};

LatticeSpectrum merge(const std::vector<SectorSolve>& solves, std::size_t take, int npts, bool want_vectors,
                      double threshold = std::numeric_limits<double>::infinity()) {
  std::vector<Candidate> all;
  int iterations = 0;
  bool converged = true;
  for (std::size_t s = 0; s < solves.size(); ++s) {
    const auto& r = solves[s].result;
    iterations += r.iterations;
    converged = converged && r.converged;
    for (int j = 0; j < static_cast<int>(r.eigenvalues.size()); ++j) {
      if (!(r.eigenvalues[j] < threshold)) continue;
      const Sector sec = solves[s].op.sector;
      all.push_back({r.eigenvalues[j], r.residuals[j], sec, j, static_cast<int>(s)});
      if (sec == Sector::EvenOdd) all.push_back({r.eigenvalues[j], r.residuals[j], Sector::OddEven, j, static_cast<int>(s)});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  if (all.size() > take) all.resize(take);
  LatticeSpectrum out;
  out.iterations = iterations;
  out.converged = converged;
  for (const Candidate& c : all) {
    out.eigenvalues.push_back(c.value);
    out.residuals.push_back(c.residual);
    out.sectors.push_back(c.sector);
    if (want_vectors) {
      const SectorSolve& s = solves[static_cast<std::size_t>(c.solve_slot)];
      const Eigen::VectorXd v = s.result.eigenvectors->col(c.local);
      auto nodal = s.op.embed(std::span<const double>(v.data(), s.op.unknowns()));
      if (c.sector == Sector::OddEven) nodal = transpose_nodal(nodal, npts);
      out.nodal.push_back(std::move(nodal));
    }
  }
  return out;
}

void check_spacing(double spacing) {
  if (!(spacing > 0.0) || !(spacing <= 0.1 + 1e-12)) {
    throw std::invalid_argument("spacing must be in (0, 0.1]");
  }
}

}  // namespace

LatticeSpectrum solve_lowest(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc, int count,
                             const SolveOptions& options, bool want_vectors) {
  if (count < 1) throw std::invalid_argument("solve_lowest: count must be >= 1");
  std::vector<SectorSolve> solves;
  if (count == 1) {
    solves.push_back(solve_sector(grid, params, bc, Sector::EvenEven, 1, options));
  } else {
    // Any sector's count-th value is at or above the merged count-th value,
    // so `count` per sector is always enough.
    for (Sector s : kSolvedSectors) solves.push_back(solve_sector(grid, params, bc, s, count, options));
  }
  LatticeSpectrum out = merge(solves, static_cast<std::size_t>(count), grid.npts(), want_vectors);
  if (out.eigenvalues.size() < static_cast<std::size_t>(count)) out.converged = false;
  return out;
}

LatticeSpectrum solve_below(const Grid2D& grid, const PotentialParams& params, BoundaryKind bc, double threshold,
                            int cap, const SolveOptions& options) {
  std::vector<SectorSolve> solves;
  for (Sector sector : kSolvedSectors) {
    int m = 4;
    std::optional<SectorSolve> current;
    while (true) {
      const Block* warm = current ? &*current->result.eigenvectors : nullptr;
      SectorSolve next = solve_sector(grid, params, bc, sector, m, options, warm);
      current.emplace(std::move(next));
      const auto& r = current->result;
      if (!r.converged) break;
      if (r.eigenvalues.back() >= threshold) break;
      if (static_cast<std::int64_t>(r.eigenvalues.size()) >= current->op.unknowns()) break;
      if (m >= cap) {
        throw std::runtime_error("solve_below: more than " + std::to_string(cap) + " eigenvalues below " +
                                 std::to_string(threshold));
      }
      m = std::min(2 * m, cap);
    }
    solves.push_back(std::move(*current));
  }
  LatticeSpectrum out = merge(solves, std::numeric_limits<std::size_t>::max(), grid.npts(), false, threshold);
  if (out.eigenvalues.size() > static_cast<std::size_t>(cap)) {
    throw std::runtime_error("solve_below: more than " + std::to_string(cap) + " eigenvalues below threshold");
  }
  return out;
}

std::vector<CutoffRow> cutoff_scan(const PotentialParams& params, const std::vector<double>& radii,
                                   BoundaryKind bc, int count, double spacing, const SolveOptions& options) {
  check_spacing(spacing);
  if (radii.empty()) throw std::invalid_argument("cutoff_scan: no radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("cutoff_scan: radii must be increasing");
  }
  return parallel_map(radii.size(), [&](std::size_t i) {
    const Grid2D grid = grid_for_spacing(radii[i], spacing);
    CutoffRow row;
    row.radius = radii[i];
    row.npts = grid.npts();
    const LatticeSpectrum s = solve_lowest(grid, params, bc, count, options);
    row.eigenvalues = s.eigenvalues;
    row.residuals = s.residuals;
    row.iterations = s.iterations;
    row.converged = s.converged;
    return row;
  });
}

DnBracket dn_bracket(const PotentialParams& params, double radius, double spacing, int count,
                     const SolveOptions& options) {
  const Grid2D grid = grid_for_spacing(radius, spacing);
  const BoundaryKind kinds[] = {BoundaryKind::Neumann, BoundaryKind::Dirichlet};
  const auto both = parallel_map(2, [&](std::size_t i) { return solve_lowest(grid, params, kinds[i], count, options); });
  DnBracket out;
  out.radius = radius;
  out.spacing = grid.spacing();
  out.converged = both[0].converged && both[1].converged;
  const std::size_t n = std::min(both[0].eigenvalues.size(), both[1].eigenvalues.size());
  for (std::size_t j = 0; j < n; ++j) {
    BracketRow row;
    row.index = static_cast<int>(j) + 1;
    row.neumann = both[0].eigenvalues[j];
    row.dirichlet = both[1].eigenvalues[j];
    row.gap = row.dirichlet - row.neumann;
    row.neumann_residual = both[0].residuals[j];
    row.dirichlet_residual = both[1].residuals[j];
    out.rows.push_back(row);
  }
  return out;
}

namespace {

struct LambdaProbe {
  double e = 0.0;
  double residual = 0.0;
  double slope = 0.0;
};

class GroundStateTracker {
 public:
  GroundStateTracker(double p, const Grid2D& grid, const SolveOptions& options)
      : p_(p), grid_(grid), options_(options) {}

  LambdaProbe operator()(double lambda) {
    const PotentialParams params(p_, lambda);
    const Block* warm = warm_ ? &*warm_ : nullptr;
    SectorSolve s = solve_sector(grid_, params, BoundaryKind::Dirichlet, Sector::EvenEven, 1, options_, warm);
    ++solves_;
    if (!s.result.converged) {
      throw ConvergenceError("critical_lambda: eigen-solve did not converge at lambda = " + std::to_string(lambda));
    }
    const Eigen::VectorXd v = s.result.eigenvectors->col(0);
    double weight = 0.0;
    for (std::size_t i = 0; i < s.op.x_axis.size(); ++i) {
      for (std::size_t j = 0; j < s.op.y_axis.size(); ++j) {
        const double x = s.op.x_axis.coord[i];
        const double y = s.op.y_axis.coord[j];
        const double r2 = x * x + y * y;
        const double w = r2 == 0.0 ? 0.0 : std::exp(params.radial_exponent() * std::log(r2));
        const double c = v[static_cast<Eigen::Index>(s.op.index(i, j))];
        weight += c * c * w;
      }
    }
    warm_ = *s.result.eigenvectors;
    return {s.result.eigenvalues[0], s.result.residuals[0], -weight};
  }

  int solves() const noexcept { return solves_; }

 private:
  double p_;
  Grid2D grid_;
  SolveOptions options_;
  std::optional<Block> warm_;
  int solves_ = 0;
};

}  // namespace

CriticalResult critical_lambda(double p, double radius, double spacing, double tol, const SolveOptions& options) {
  if (!(p >= 1.0)) throw std::invalid_argument("critical_lambda: p must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("critical_lambda: tol must be positive");
  const Grid2D grid = grid_for_spacing(radius, spacing);
  GroundStateTracker eval(p, grid, options);
  CriticalResult out;
  out.p = p;
  out.gamma = speclab::gamma(p, 1e-8);

  double lo = 0.0;
  LambdaProbe flo = eval(lo);
  if (!(flo.e > 0.0)) throw BracketError("critical_lambda: E_1(0) is not positive");
  double hi = out.gamma + 1.0;
  LambdaProbe fhi = eval(hi);
  for (int widen = 0; widen < 4 && !(fhi.e < 0.0); ++widen) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = eval(hi);
  }
  if (!(fhi.e < 0.0)) throw BracketError("critical_lambda: no negative lowest eigenvalue found");

  constexpr int kMaxSolves = 80;
  while (hi - lo > tol) {
    if (eval.solves() >= kMaxSolves) throw ConvergenceError("critical_lambda: bracket did not close");
    double x = hi - fhi.e / fhi.slope;
    if (hi - x < 0.25 * tol) x = hi - 0.5 * tol;  // Newton has settled: close from below
    if (!std::isfinite(x) || x <= lo || x >= hi || (x - lo) < 1e-3 * (hi - lo)) x = 0.5 * (lo + hi);
    const LambdaProbe f = eval(x);
    if (f.e < 0.0) {
      hi = x;
      fhi = f;
    } else {
      lo = x;
      flo = f;
    }
  }
  out.lower = lo;
  out.upper = hi;
  out.lambdastar = 0.5 * (lo + hi);
  out.e_lower = flo.e;
  out.e_upper = fhi.e;
  out.res_lower = flo.residual;
  out.res_upper = fhi.residual;
  out.solves = eval.solves();
  out.certified = fhi.e < 0.0 && flo.e > flo.residual;
  return out;
}

CriticalScan critical_surface(const std::vector<double>& pvalues, double radius, double spacing, double tol,
                              const SolveOptions& options) {
  for (double p : pvalues) {
    if (!(p >= 1.0 && p <= 24.0)) throw std::invalid_argument("critical_surface: p-values must lie in [1, 24]");
  }
  struct Point {
    double lambdastar = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double uncertainty = std::numeric_limits<double>::quiet_NaN();
    std::string error;
  };
  const auto points = parallel_map(pvalues.size(), [&](std::size_t i) {
    Point pt;
    try {
      const CriticalResult fine = critical_lambda(pvalues[i], radius, spacing, tol, options);
      const CriticalResult coarse = critical_lambda(pvalues[i], radius, 2.0 * spacing, tol, options);
      pt.lambdastar = fine.lambdastar;
      pt.gamma = fine.gamma;
      pt.uncertainty = std::fabs(fine.lambdastar - coarse.lambdastar) / 3.0 + tol;
    } catch (const std::exception& e) {
      pt.error = e.what();
    }
    return pt;
  });
  CriticalScan scan;
  scan.radius = radius;
  scan.resolution = grid_for_spacing(radius, spacing).spacing();
  scan.pvalues = pvalues;
  for (const Point& pt : points) {
    scan.lambdastar.push_back(pt.lambdastar);
    scan.gammacurve.push_back(pt.gamma);
    scan.uncertainty.push_back(pt.uncertainty);
    scan.resolved.push_back(pt.error.empty() && std::fabs(pt.gamma - pt.lambdastar) > pt.uncertainty);
    scan.errors.push_back(pt.error);
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!scan.resolved[i] || !scan.resolved[i + 1]) continue;
    const double g0 = scan.gammacurve[i] - scan.lambdastar[i];
    const double g1 = scan.gammacurve[i + 1] - scan.lambdastar[i + 1];
    if (g0 > 0.0 && g1 < 0.0) {
      scan.meeting = std::make_pair(pvalues[i], pvalues[i + 1]);
      scan.resolution_limited = false;
      break;
    }
  }
  return scan;
}

EigenfunctionGrid export_eigenfunction(const PotentialParams& params, double radius, double spacing,
                                       BoundaryKind bc, int index, const SolveOptions& options) {
  if (index < 1) throw std::invalid_argument("export_eigenfunction: index must be >= 1");
  const Grid2D grid = grid_for_spacing(radius, spacing);
  LatticeSpectrum s = solve_lowest(grid, params, bc, index, options, true);
  if (!s.converged) throw ConvergenceError("export_eigenfunction: eigen-solve did not converge");
  EigenfunctionGrid out;
  out.radius = grid.radius();
  out.npts = grid.npts();
  out.spacing = grid.spacing();
  out.index = index;
  out.eigenvalue = s.eigenvalues[index - 1];
  out.residual = s.residuals[index - 1];
  out.sector = s.sectors[index - 1];
  out.values = std::move(s.nodal[index - 1]);
  const double h2 = out.spacing * out.spacing;
  double norm = 0.0;
  for (double v : out.values) norm += h2 * v * v;
  norm = std::sqrt(norm);
  const std::size_t origin = static_cast<std::size_t>(grid.center()) * out.npts + grid.center();
  double ref = out.values[origin];
  if (std::fabs(ref) < 1e-12 * norm) {
    ref = *std::max_element(out.values.begin(), out.values.end(),
                            [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  }
  const double scale = (ref < 0.0 ? -1.0 : 1.0) / norm;
  for (double& v : out.values) v *= scale;
  return out;
}

}  // namespace speclab
