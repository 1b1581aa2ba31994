// SPDX-License-Identifier: Apache-2.0
// End-to-end acceptance checks. One line per criterion; exit status is the
// number of failed criteria (capped at 1).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/cli.hpp"
#include "speclab/eigensolve.hpp"
#include "speclab/experiments.hpp"
#include "speclab/oscillator1d.hpp"

using namespace speclab;

namespace {

// Pinned thresholds.
constexpr double kGamma2Tol = 1e-6;
constexpr double kGamma2Seconds = 5.0;
constexpr double kPstar = 1.788;
constexpr double kPstarTol = 0.01;
constexpr double kGammaStar = 0.998995;
constexpr double kGammaStarTol = 5e-6;
constexpr double kGammaMinSeconds = 120.0;
constexpr double kLargePGap = 0.05;
// pi^2/4 - gamma_200 from an independent shooting computation (adaptive
// Runge-Kutta integration of the half-line problem with a root search on
// the energy).
constexpr double kLargePGapOracle = 0.220662788600098;
constexpr double kGroundEnergy = -0.18365;
constexpr double kGroundEnergyTol = 1e-3;
constexpr double kGroundSpacing = 1.0 / 30.0;
constexpr double kGridShift = 3e-4;
constexpr double kGroundSeconds = 600.0;
constexpr double kPlateau = 1e-3;
constexpr double kSqueeze = 1e-3;
constexpr double kCertificate = 1e-8;
constexpr double kSurfaceRadius = 20.0;
constexpr double kSurfaceSpacing = 0.05;
constexpr double kMeetingP = 20.392;
constexpr double kDecayRatio = 0.5;
constexpr double kNormSlack = 1e-6;
constexpr double kQuasimodeSeconds = 300.0;
constexpr double kRatioSpread = 10.0;
constexpr double kClambdaTol = 1e-12;
constexpr double kMomentSpacing = 0.1;
constexpr double kOracleTol = 1e-7;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double lowest_dirichlet(double p, double lambda, double radius, double spacing, double* residual = nullptr) {
  const LatticeSpectrum s =
      solve_lowest(grid_for_spacing(radius, spacing), PotentialParams(p, lambda), BoundaryKind::Dirichlet, 1);
  if (!s.converged) throw ConvergenceError("lowest eigenvalue did not converge");
  if (residual) *residual = s.residuals[0];
  return s.eigenvalues[0];
}

Verdict gamma_two() {
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out;
  std::ostringstream err;
  const int status = cli::run({"gamma", "--p", "2"}, out, err);
  const double dt = seconds_since(t0);
  std::stringstream ss(out.str());
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  std::getline(ss, line);
  const double g = std::strtod(line.substr(line.find(',') + 1).c_str(), nullptr);
  const bool ok = status == 0 && std::fabs(g - 1.0) <= kGamma2Tol && dt < kGamma2Seconds;
  return {ok, "gamma_2 = " + cli::format_real(g) + ", " + fmt("%.2f s", dt)};
}

Verdict gamma_minimum() {
  const auto t0 = std::chrono::steady_clock::now();
  const GammaMinimum m = gamma_min(1.0, 3.0, 1e-8);
  const double dt = seconds_since(t0);
  const bool ok = std::fabs(m.pstar - kPstar) <= kPstarTol && std::fabs(m.gammastar - kGammaStar) <= kGammaStarTol &&
                  dt < kGammaMinSeconds;
  return {ok, "p* = " + fmt("%.6f", m.pstar) + ", gamma* = " + fmt("%.9f", m.gammastar) + ", " + fmt("%.1f s", dt)};
}

Verdict large_p() {
  const double g50 = speclab::gamma(50.0);
  const double g100 = speclab::gamma(100.0);
  const double g200 = speclab::gamma(200.0);
  const double limit = std::numbers::pi * std::numbers::pi / 4.0;
  const double gap = limit - g200;
  const bool monotone = g50 < g100 && g100 < g200 && g200 < limit;
  const bool matches_oracle = std::fabs(gap - kLargePGapOracle) < 1e-6;
  const bool ok = monotone && matches_oracle && gap < kLargePGap;
  return {ok, "gamma_50,100,200 = " + fmt("%.9f", g50) + ", " + fmt("%.9f", g100) + ", " + fmt("%.9f", g200) +
                  "; pi^2/4 - gamma_200 = " + fmt("%.9f", gap) + (matches_oracle ? " (oracle agrees)" : " (oracle differs)") +
                  ", threshold " + fmt("%g", kLargePGap)};
}

Verdict ground_energy() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e = lowest_dirichlet(2.0, 1.0, 20.0, kGroundSpacing);
  const double e_half = lowest_dirichlet(2.0, 1.0, 20.0, kGroundSpacing / 2.0);
  const double dt = seconds_since(t0);
  const bool ok = std::fabs(e - kGroundEnergy) <= kGroundEnergyTol && std::fabs(e - e_half) < kGridShift &&
                  dt < kGroundSeconds;
  return {ok, "E_1(h) = " + fmt("%.7f", e) + ", E_1(h/2) = " + fmt("%.7f", e_half) + ", shift " +
                  fmt("%.2e", std::fabs(e - e_half)) + ", " + fmt("%.0f s", dt)};
}

Verdict plateau() {
  const double e10 = lowest_dirichlet(2.0, 1.0, 10.0, 0.05);
  const double e20 = lowest_dirichlet(2.0, 1.0, 20.0, 0.05);
  return {std::fabs(e10 - e20) < kPlateau,
          "E_1(R=10) = " + fmt("%.9f", e10) + ", E_1(R=20) = " + fmt("%.9f", e20)};
}

Verdict squeeze() {
  const DnBracket b = dn_bracket(PotentialParams(2.0, 1.0), 20.0, 0.05, 2);
  if (!b.converged || b.rows.size() < 2) return {false, "bracket solve did not converge"};
  const double gap = b.rows[0].gap;
  const bool ok = gap < kSqueeze && b.rows[1].neumann > 0.0;
  return {ok, "first gap = " + fmt("%.3e", gap) + ", Neumann E_2 = " + fmt("%.7f", b.rows[1].neumann) +
                  ", Dirichlet E_2 = " + fmt("%.7f", b.rows[1].dirichlet)};
}

Verdict critical_two() {
  const CriticalResult c = critical_lambda(2.0, 20.0, 0.05, 1e-4);
  const bool ok = c.upper < 1.0 && c.certified && c.res_lower <= kCertificate && c.res_upper <= kCertificate;
  return {ok, "lambda*(2) in [" + fmt("%.6f", c.lower) + ", " + fmt("%.6f", c.upper) + "], E = (" +
                  fmt("%.2e", c.e_lower) + ", " + fmt("%.2e", c.e_upper) + "), residuals (" + fmt("%.1e", c.res_lower) +
                  ", " + fmt("%.1e", c.res_upper) + ")"};
}

Verdict surface() {
  const std::vector<double> ps = {1.0, 2.0, 4.0, 8.0, 16.0};
  const CriticalScan s = critical_surface(ps, kSurfaceRadius, kSurfaceSpacing, 1e-4);
  std::string detail = "h = " + fmt("%g", s.resolution) + ":";
  bool below = true;
  double gap8 = NAN;
  double gap16 = NAN;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!s.errors[i].empty()) {
      detail += " p=" + fmt("%g", ps[i]) + " failed (" + s.errors[i] + ")";
      if (ps[i] <= 8.0) below = false;
      continue;
    }
    const double gap = s.gammacurve[i] - s.lambdastar[i];
    detail += " p=" + fmt("%g", ps[i]) + " lambda*=" + fmt("%.5f", s.lambdastar[i]) + "+-" +
              fmt("%.1e", s.uncertainty[i]) + " gap=" + fmt("%.5f", gap) + ";";
    if (ps[i] <= 8.0 && !(s.lambdastar[i] < s.gammacurve[i])) below = false;
    if (ps[i] == 8.0) gap8 = gap;
    if (ps[i] == 16.0) gap16 = gap;
  }
  const bool decreasing = gap16 < gap8;
  bool meeting_ok = true;
  if (s.meeting) {
    meeting_ok = s.meeting->first <= kMeetingP && kMeetingP <= s.meeting->second;
    detail += " meeting in [" + fmt("%g", s.meeting->first) + ", " + fmt("%g", s.meeting->second) + "]";
  } else {
    detail += " meeting resolution-limited";
  }
  return {below && decreasing && meeting_ok, detail};
}

Verdict quasimodes() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    double p, lambda, mu;
    bool critical;
  };
  const std::vector<Case> cases = {{2.0, 1.5, 0.0, false}, {2.0, 1.5, 1.0, false}, {2.0, 1.5, -1.0, false},
                                   {1.0, 1.2, 0.0, false}, {2.0, 0.0, 0.0, true},   {2.0, 0.0, 1.0, true},
                                   {1.0, 0.0, 0.0, true},  {1.0, 0.0, 1.0, true}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const OscillatorSolution osc = quasimode_oscillator(c.p);
    const double floor = std::pow(2.0, -c.p / (c.p + 2.0)) - kNormSlack;
    double r50 = 0.0;
    double r200 = 0.0;
    bool norms = true;
    for (double k : {50.0, 100.0, 200.0}) {
      const QuasimodeSpec spec = c.critical ? make_critical(c.mu, k, osc)
                                            : make_supercritical(PotentialParams(c.p, c.lambda), c.mu, k, osc);
      const QuasimodeResult r = quasimode_residual(spec);
      norms = norms && r.norm * r.norm >= floor;
      if (k == 50.0) r50 = r.relative;
      if (k == 200.0) r200 = r.relative;
    }
    const double ratio = r200 / r50;
    const bool pass = norms && ratio < kDecayRatio;
    ok = ok && pass;
    detail += std::string(c.critical ? " crit" : " super") + "(p=" + fmt("%g", c.p) +
              (c.critical ? "" : ",l=" + fmt("%g", c.lambda)) + ",mu=" + fmt("%g", c.mu) + ") ratio " +
              fmt("%.5f", ratio) + (pass ? "" : " FAIL") + ";";
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < kQuasimodeSeconds;
  return {ok, detail + " " + fmt("%.1f s", dt)};
}

Verdict moments() {
  const PotentialParams params(2.0, 0.5);
  std::vector<MomentReport> reports;
  for (double big : {1.0, 2.0, 4.0, 8.0}) reports.push_back(moment_sum(params, big, 1.5, 20.0, kMomentSpacing));
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const MomentReport& r = reports[i];
    ok = ok && r.converged;
    if (i > 0) ok = ok && r.moment >= reports[i - 1].moment;
    const double spread = r.ratio / reports[0].ratio;
    ok = ok && spread <= kRatioSpread && spread >= 1.0 / kRatioSpread;
    detail += " L=" + fmt("%g", r.biglambda) + " moment=" + fmt("%.6g", r.moment) + " ratio=" + fmt("%.4g", r.ratio) + ";";
  }
  const double g = reports[0].gamma - 0.5;
  const double expected = std::max(std::pow(g, -4.0 / 6.0), std::pow(g, -16.0 / 24.0));
  const double c = clambda(2.0, reports[0].gamma, 0.5);
  ok = ok && std::fabs(c - expected) <= kClambdaTol * expected;
  return {ok, detail + " C_lambda=" + fmt("%.15g", c)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 gen(20240617);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  bool invariants = true;
  int tri = 0;
  int lattice = 0;
  for (int trial = 0; trial < 20; ++trial) {
    if (trial % 2 == 0) {
      const int n = 2 + static_cast<int>(unit(gen) * 399);
      std::vector<double> d(n);
      std::vector<double> e(n - 1);
      for (double& v : d) v = 10.0 * (unit(gen) - 0.5);
      for (double& v : e) v = 4.0 * (unit(gen) - 0.5);
      const int count = std::min(n, 5);
      const SpectrumResult s = tridiag_lowest(d, e, count, 1e-12);
      Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) dense(i, i) = d[i];
      for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = e[i];
      const SpectrumResult ref = dense_oracle(dense, count);
      for (int i = 0; i < count; ++i) worst = std::max(worst, std::fabs(s.eigenvalues[i] - ref.eigenvalues[i]));
      ++tri;
      continue;
    }
    const double p = 1.0 + 3.0 * unit(gen);
    const double lambda = 1.5 * unit(gen);
    const double radius = 2.0 + 4.0 * unit(gen);
    const int npts = 2 * (4 + static_cast<int>(unit(gen) * 17)) + 1;  // 9 .. 41
    const Grid2D grid = build_grid(radius, npts);
    const PotentialParams params(p, lambda);
    std::vector<double> first;
    for (BoundaryKind bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
      const LatticeOperator op = assemble_2d(grid, params, bc);
      const int count = 4;
      const SpectrumResult s = lobpcg(op.matrix, count, 1e-9, 20000, 42);
      const SpectrumResult ref = dense_oracle(op.matrix.to_dense(), count);
      if (!s.converged) invariants = false;
      for (int i = 0; i < count; ++i) worst = std::max(worst, std::fabs(s.eigenvalues[i] - ref.eigenvalues[i]));
      first.push_back(ref.eigenvalues[0]);
      // E_1 decreases in lambda.
      const LatticeOperator shifted = assemble_2d(grid, PotentialParams(p, lambda + 0.25), bc);
      const double e_shift = lobpcg(shifted.matrix, 1, 1e-9, 20000, 42).eigenvalues[0];
      if (!(e_shift < ref.eigenvalues[0])) invariants = false;
    }
    if (!(first[1] <= first[0])) invariants = false;
    ++lattice;
  }
  return {worst <= kOracleTol && invariants, std::to_string(tri) + " tridiagonal + " + std::to_string(lattice) +
                                                 " lattice instances, max |difference| = " + fmt("%.2e", worst) +
                                                 (invariants ? ", invariants hold" : ", invariant violated")};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gamma_2 equals one", gamma_two},
      {2, "minimum of gamma_p", gamma_minimum},
      {3, "large-p limit", large_p},
      {4, "ground energy of L_2(1)", ground_energy},
      {5, "cutoff plateau", plateau},
      {6, "Dirichlet-Neumann squeeze", squeeze},
      {7, "critical coupling at p = 2", critical_two},
      {8, "positivity surface", surface},
      {9, "quasimode residual decay", quasimodes},
      {10, "eigenvalue moments", moments},
      {11, "solver oracle equivalence", oracle_equivalence},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures > 0 ? 1 : 0;
}
