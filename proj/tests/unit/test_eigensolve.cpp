// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "speclab/discretize2d.hpp"
#include "speclab/eigensolve.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

namespace {

SymTridiagonal random_tridiagonal(Lcg64& rng, int n) {
  SymTridiagonal t;
  for (int i = 0; i < n; ++i) t.diag.push_back(10.0 * rng.next_symmetric());
  for (int i = 0; i + 1 < n; ++i) t.offdiag.push_back(3.0 * rng.next_symmetric());
  return t;
}

Eigen::MatrixXd dense_of(const SymTridiagonal& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = t.diag[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = t.offdiag[i];
  }
  return a;
}

SparseSymmetric diagonal_matrix(int n) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, static_cast<double>(n - i)});
  return SparseSymmetric::from_triplets(n, t);
}

double orthonormality_defect(const Block& v) {
  const Eigen::MatrixXd g = v.transpose() * v;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("tridiag_lowest on a diagonal matrix") {
  const std::vector<double> d{1.0, 2.0, 3.0};
  const std::vector<double> e{0.0, 0.0};
  const auto r = tridiag_lowest(d, e, 2, 1e-13);
  REQUIRE(r.eigenvalues.size() == 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(r.converged);
}

TEST_CASE("tridiag_lowest on the Dirichlet Laplacian stencil") {
  const int n = 99;
  const double length = 3.0;
  const double h = length / (n + 1);
  std::vector<double> d(n, 2.0 / (h * h));
  std::vector<double> e(n - 1, -1.0 / (h * h));
  const auto r = tridiag_lowest(d, e, 5, 1e-12);
  for (int j = 1; j <= 5; ++j) {
    const double s = std::sin(j * std::numbers::pi * h / (2.0 * length));
    CHECK(r.eigenvalues[j - 1] == doctest::Approx(4.0 / (h * h) * s * s).epsilon(1e-12));
  }
}

TEST_CASE("tridiag_lowest rejects bad arguments") {
  const std::vector<double> d{1.0, 2.0};
  const std::vector<double> e{0.5};
  CHECK_THROWS_AS(tridiag_lowest(d, e, 0, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(tridiag_lowest(d, e, 3, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(tridiag_lowest(d, std::vector<double>{}, 1, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(tridiag_lowest(d, e, 1, 0.0), std::invalid_argument);
}

TEST_CASE("random tridiagonal n = 200 matches the dense oracle") {
  Lcg64 rng(2024);
  const SymTridiagonal t = random_tridiagonal(rng, 200);
  const auto sturm = tridiag_lowest(t.diag, t.offdiag, 6, 1e-13);
  const auto oracle = dense_oracle(dense_of(t), 6);
  CHECK(oracle.converged);
  for (int j = 0; j < 6; ++j) CHECK(std::fabs(sturm.eigenvalues[j] - oracle.eigenvalues[j]) < 1e-10);
}

TEST_CASE("Sturm counts match oracle counts on random tridiagonals") {
  Lcg64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_unit() * 60);
    const SymTridiagonal t = random_tridiagonal(rng, n);
    const auto all = dense_oracle(dense_of(t), n);
    for (int probe = 0; probe < 5; ++probe) {
      const double theta = 12.0 * rng.next_symmetric();
      // Stay clear of eigenvalues so rounding cannot decide the count.
      bool clear = true;
      for (double ev : all.eigenvalues) clear = clear && std::fabs(ev - theta) > 1e-9;
      if (!clear) continue;
      const auto expected = std::count_if(all.eigenvalues.begin(), all.eigenvalues.end(),
                                          [&](double ev) { return ev < theta; });
      CHECK(sturm_count(t, theta) == expected);
    }
  }
}

TEST_CASE("gershgorin bounds enclose the spectrum") {
  Lcg64 rng(5);
  const SymTridiagonal t = random_tridiagonal(rng, 40);
  const auto [lo, hi] = gershgorin_bounds(t);
  CHECK(sturm_count(t, lo) == 0);
  CHECK(sturm_count(t, hi) == 40);
}

TEST_CASE("shifted tridiagonal solve") {
  Lcg64 rng(17);
  const SymTridiagonal t = random_tridiagonal(rng, 30);
  std::vector<double> b(30);
  for (double& v : b) v = rng.next_symmetric();
  const auto x = tridiag_solve_shifted(t, 0.37, b);
  const Eigen::MatrixXd a = dense_of(t) - 0.37 * Eigen::MatrixXd::Identity(30, 30);
  const Eigen::VectorXd r = a * Eigen::Map<const Eigen::VectorXd>(x.data(), 30) -
                            Eigen::Map<const Eigen::VectorXd>(b.data(), 30);
  CHECK(r.norm() < 1e-10);
  const SymTridiagonal one{{4.0}, {}};
  CHECK(tridiag_solve_shifted(one, 2.0, std::vector<double>{6.0})[0] == doctest::Approx(3.0));
}

TEST_CASE("dense oracle small cases") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  const auto r = dense_oracle(swap, 2);
  CHECK(r.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));

  const auto id = dense_oracle(Eigen::MatrixXd::Identity(5, 5), 5);
  for (double v : id.eigenvalues) CHECK(v == 1.0);

  CHECK_THROWS_AS(dense_oracle(Eigen::MatrixXd::Identity(2501, 2501), 1), std::invalid_argument);
}

TEST_CASE("dense oracle eigenvectors") {
  Lcg64 rng(8);
  Eigen::MatrixXd a(30, 30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.next_symmetric();
  }
  const auto r = dense_oracle(a, 4, true);
  REQUIRE(r.eigenvectors.has_value());
  CHECK(orthonormality_defect(*r.eigenvectors) < 1e-10);
  for (int j = 0; j < 4; ++j) {
    const Eigen::VectorXd v = r.eigenvectors->col(j);
    CHECK((a * v - r.eigenvalues[j] * v).norm() < 1e-10);
  }
  CHECK(std::is_sorted(r.eigenvalues.begin(), r.eigenvalues.end()));
}

TEST_CASE("lobpcg on a diagonal matrix") {
  const auto a = diagonal_matrix(60);
  const auto r = lobpcg(a, 3, 1e-10, 500, 42);
  REQUIRE(r.converged);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-12));
  for (double res : r.residuals) CHECK(res <= 1e-10);
  CHECK(orthonormality_defect(*r.eigenvectors) < 1e-8);
}

TEST_CASE("lobpcg rejects count above dim/4") {
  const auto a = diagonal_matrix(12);
  CHECK_THROWS_AS(lobpcg(a, 4, 1e-8, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(lobpcg(a, 0, 1e-8, 100, 1), std::invalid_argument);
}

TEST_CASE("lobpcg on the 33 x 33 Dirichlet Laplacian") {
  const Grid2D grid = build_grid(1.0, 33);
  const auto op = assemble_2d(grid, PotentialParams(2.0, 0.0), BoundaryKind::Dirichlet, false);
  const auto r = lobpcg(op.matrix, 4, 1e-9, 3000, 42);
  REQUIRE(r.converged);
  const int intervals = 32;
  const double h = grid.spacing();
  auto mode = [&](int i) {
    const double s = std::sin(i * std::numbers::pi / (2.0 * intervals));
    return 4.0 / (h * h) * s * s;
  };
  const std::vector<double> expected{mode(1) + mode(1), mode(1) + mode(2), mode(2) + mode(1),
                                     mode(2) + mode(2)};
  for (int j = 0; j < 4; ++j) CHECK(std::fabs(r.eigenvalues[j] - expected[j]) < 1e-8);
}

TEST_CASE("lobpcg on L_2(1) matches the dense oracle") {
  const auto op = assemble_2d(build_grid(6.0, 25), PotentialParams(2.0, 1.0), BoundaryKind::Dirichlet);
  const auto r = lobpcg(op.matrix, 3, 1e-9, 3000, 42);
  REQUIRE(r.converged);
  const auto oracle = dense_oracle(op.matrix.to_dense(), 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(r.eigenvalues[j] - oracle.eigenvalues[j]) < 1e-7);
    // Bauer-Fike: a true eigenvalue lies within the residual.
    CHECK(std::fabs(r.eigenvalues[j] - oracle.eigenvalues[j]) <= r.residuals[j] + 1e-12);
    CHECK(certify(op.matrix, r.eigenvalues[j], std::span<const double>(r.eigenvectors->col(j).data(),
                                                                       op.unknowns())) <= 1e-9);
  }
  // Rayleigh quotients of random vectors never undercut the lowest eigenvalue.
  Lcg64 rng(1234);
  std::vector<double> v(static_cast<std::size_t>(op.unknowns()));
  for (int trial = 0; trial < 100; ++trial) {
    for (double& e : v) e = rng.next_symmetric();
    CHECK(rayleigh_quotient(op.matrix, v) >= r.eigenvalues[0] - 1e-9);
  }
}

TEST_CASE("lobpcg is deterministic for a fixed seed") {
  const auto op = assemble_2d(build_grid(4.0, 21), PotentialParams(2.0, 0.5), BoundaryKind::Neumann);
  const auto a = lobpcg(op.matrix, 2, 1e-9, 2000, 42);
  const auto b = lobpcg(op.matrix, 2, 1e-9, 2000, 42);
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < 2; ++j) CHECK(a.eigenvalues[j] == b.eigenvalues[j]);
  CHECK((*a.eigenvectors - *b.eigenvectors).norm() == 0.0);
}

TEST_CASE("lobpcg reports non-convergence after maxit") {
  const auto op = assemble_2d(build_grid(4.0, 21), PotentialParams(2.0, 1.0), BoundaryKind::Dirichlet);
  const auto r = lobpcg(op.matrix, 2, 1e-14, 3, 42);
  CHECK_FALSE(r.converged);
  CHECK(r.eigenvalues.size() == 2);
  CHECK(r.iterations == 3);
}

TEST_CASE("certify") {
  const auto a = diagonal_matrix(10);
  std::vector<double> v(10, 0.0);
  v[9] = 1.0;
  CHECK(certify(a, 1.0, v) == 0.0);
  // Perturbed eigenvector: residual is first order in eps.
  for (double eps : {1e-3, 1e-5}) {
    std::vector<double> w = v;
    w[3] = eps;
    const double norm = std::sqrt(1.0 + eps * eps);
    for (double& e : w) e /= norm;
    const double res = certify(a, 1.0, w);
    CHECK(res == doctest::Approx(6.0 * eps).epsilon(1e-3));
  }
}
