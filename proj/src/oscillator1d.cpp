// SPDX-License-Identifier: Apache-2.0
#include "speclab/oscillator1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "speclab/potential.hpp"

namespace speclab {

namespace {

constexpr double kSturmTol = 1e-13;
// Points per unit length of the coarsest mesh in every Richardson sequence.
constexpr int kBaseDensity = 64;
// Finest admissible mesh: beyond this the Sturm count is dominated by
// rounding in the 2/h^2 diagonal.
constexpr int kMaxDensity = kBaseDensity << 9;
constexpr int kMaxDoublings = 4;

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("oscillator: p must be a finite real >= 1, got " + std::to_string(p));
  }
}

void check_mesh(double halflength, int n) {
  if (!(halflength > 0.0) || !std::isfinite(halflength)) {
    throw std::invalid_argument("oscillator: halflength must be positive");
  }
  if (n < 16) throw std::invalid_argument("oscillator: meshcount must be >= 16");
}

double lowest(const SymTridiagonal& t) { return tridiag_eigenvalue(t, 0, kSturmTol); }

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

double hermite(double s, double f0, double f1, double d0, double d1, double h) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * d1;
}

struct Extrapolant {
  double value;
  double change;
  int density;
  int refinements;
};

// Richardson sequence on spacings 1/(kBaseDensity 2^j) over [0, L] for an
// eigenvalue functor E(n).
template <class Eval>
Extrapolant refine(double halflength, double tol, Eval&& eval) {
  int density = kBaseDensity;
  auto count = [&](int d) { return static_cast<int>(std::lround(halflength * d)); };
  double coarse = eval(count(density));
  double fine = eval(count(2 * density));
  double previous = richardson(coarse, fine);
  int refinements = 0;
  while (true) {
    density *= 2;
    if (density > kMaxDensity) {
      throw ConvergenceError("oscillator: Richardson extrapolants still differ by more than " +
                             std::to_string(tol) + " at the finest mesh");
    }
    coarse = fine;
    fine = eval(count(2 * density));
    const double current = richardson(coarse, fine);
    ++refinements;
    const double change = std::fabs(current - previous);
    if (change <= tol) return {current, change, density, refinements};
    previous = current;
  }
}

}  // namespace

SymTridiagonal assemble_oscillator(double p, double halflength, int n, bool include_potential) {
  check_p(p);
  check_mesh(halflength, n);
  const double h = halflength / n;
  const double inv = 1.0 / (h * h);
  SymTridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.offdiag.assign(static_cast<std::size_t>(n - 1), -inv);
  for (int i = 0; i < n; ++i) {
    t.diag[i] = 2.0 * inv + (include_potential ? potential_1d(i * h, p) : 0.0);
  }
  t.offdiag[0] = -std::sqrt(2.0) * inv;
  return t;
}

SymTridiagonal assemble_neumann_oscillator(double p, double k, int n) {
  check_p(p);
  check_mesh(k, n);
  const double h = k / n;
  const double inv = 1.0 / (h * h);
  SymTridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n + 1));
  t.offdiag.assign(static_cast<std::size_t>(n), -inv);
  for (int i = 0; i <= n; ++i) t.diag[i] = 2.0 * inv + potential_1d(i * h, p);
  t.offdiag.front() = -std::sqrt(2.0) * inv;
  t.offdiag.back() = -std::sqrt(2.0) * inv;
  return t;
}

double default_halflength(double p) {
  check_p(p);
  return std::max(8.0, std::ceil(4.0 * std::pow(9.0, 1.0 / p)));
}

double oscillator_eigenvalue(double p, double halflength, int n) {
  return lowest(assemble_oscillator(p, halflength, n));
}

double gamma_on_mesh(double p, double halflength, int n) {
  return richardson(oscillator_eigenvalue(p, halflength, n), oscillator_eigenvalue(p, halflength, 2 * n));
}

GammaReport gamma_report(double p, double tol) {
  check_p(p);
  if (!(tol >= 1e-8)) throw std::invalid_argument("gamma: tol must be >= 1e-8");
  double halflength = default_halflength(p);
  for (int doubling = 0; doubling <= kMaxDoublings; ++doubling) {
    const Extrapolant x =
        refine(halflength, tol, [&](int n) { return oscillator_eigenvalue(p, halflength, n); });
    const int n = static_cast<int>(std::lround(halflength * x.density));
    const double wider = gamma_on_mesh(p, 2.0 * halflength, 2 * n);
    if (std::fabs(wider - x.value) < tol / 10.0) {
      return {x.value, halflength, n, x.change, x.refinements};
    }
    halflength *= 2.0;
  }
  throw ConvergenceError("gamma: wall at L still shifts the eigenvalue after domain doubling");
}

double gamma(double p, double tol) { return gamma_report(p, tol).gamma; }

GammaMinimum gamma_min(double plo, double phi, double tol) {
  check_p(plo);
  if (!(phi > plo) || !std::isfinite(phi)) throw std::invalid_argument("gamma_min: need plo < phi");
  if (!(tol > 0.0)) throw std::invalid_argument("gamma_min: tol must be positive");
  const double inner = std::max(tol / 10.0, 1e-8);
  // One mesh for the whole search: widest domain, finest spacing among probes.
  double halflength = 0.0;
  double spacing = std::numeric_limits<double>::infinity();
  for (double probe : {plo, 0.5 * (plo + phi), phi}) {
    const GammaReport r = gamma_report(probe, inner);
    halflength = std::max(halflength, r.halflength);
    spacing = std::min(spacing, r.halflength / r.meshcount);
  }
  const int n = static_cast<int>(std::lround(halflength / spacing));
  GammaMinimum out;
  auto f = [&](double p) {
    ++out.evaluations;
    return gamma_on_mesh(p, halflength, n);
  };

  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  const double xtol = std::max(1e-5, 1e-6 * (phi - plo));
  double a = plo;
  double b = phi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  out.pstar = fc < fd ? c : d;
  out.gammastar = std::min(fc, fd);
  // A minimum on the boundary shows up as the search collapsing onto it.
  for (double end : {plo, phi}) {
    const double fe = f(end);
    if (fe <= out.gammastar) {
      out.pstar = end;
      out.gammastar = fe;
    }
  }
  return out;
}

OscillatorSolution ground_function(double p, double halflength, int n) {
  const SymTridiagonal t = assemble_oscillator(p, halflength, n);
  const double theta = lowest(t);
  const double h = halflength / n;

  // Inverse iteration slightly below theta keeps T - shift positive definite.
  const double shift = theta - std::max(1e-10, 1e-12 * std::fabs(theta));
  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double e : x) s += e * e;
    s = std::sqrt(s);
    for (double& e : x) e /= s;
  };
  normalize(v);
  constexpr int kMaxIter = 100;
  bool settled = false;
  for (int it = 0; it < kMaxIter && !settled; ++it) {
    std::vector<double> w = tridiag_solve_shifted(t, shift, v);
    normalize(w);
    if (w[0] * v[0] < 0.0) {
      for (double& e : w) e = -e;
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) diff = std::max(diff, std::fabs(w[i] - v[i]));
    v.swap(w);
    settled = diff < 1e-14;
  }
  if (!settled) throw ConvergenceError("ground_function: inverse iteration stagnated");

  OscillatorSolution s;
  s.p = p;
  s.halflength = halflength;
  s.meshcount = n;
  s.spacing = h;
  s.gamma = gamma_on_mesh(p, halflength, n);
  s.extrapolated = true;
  s.hvalues.assign(static_cast<std::size_t>(n + 1), 0.0);
  const double sign = v[0] < 0.0 ? -1.0 : 1.0;
  s.hvalues[0] = sign * std::sqrt(2.0) * v[0];
  for (int i = 1; i < n; ++i) s.hvalues[i] = sign * v[i];
  const double scale = 1.0 / std::sqrt(s.norm2());
  for (double& e : s.hvalues) e *= scale;

  const auto& u = s.hvalues;
  s.hprime.assign(u.size(), 0.0);
  for (int i = 1; i < n; ++i) s.hprime[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  s.hprime[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
  s.hsecond.resize(u.size());
  for (int i = 0; i <= n; ++i) s.hsecond[i] = (potential_1d(i * h, p) - s.gamma) * u[i];
  return s;
}

double OscillatorSolution::norm2() const {
  if (hvalues.empty()) return 0.0;
  double sum = hvalues[0] * hvalues[0];
  for (std::size_t i = 1; i + 1 < hvalues.size(); ++i) sum += 2.0 * hvalues[i] * hvalues[i];
  sum += hvalues.back() * hvalues.back();
  return spacing * sum;
}

OscillatorSolution::Sample OscillatorSolution::evaluate(double t) const {
  const double a = std::fabs(t);
  if (a >= halflength || hvalues.empty()) return {0.0, 0.0, 0.0};
  const int i = std::min(static_cast<int>(a / spacing), meshcount - 1);
  const double s = (a - i * spacing) / spacing;
  auto third = [&](int j) {
    const double tj = j * spacing;
    const double slope = j == 0 ? (p == 1.0 ? 1.0 : 0.0) : p * std::pow(tj, p - 1.0);
    return slope * hvalues[j] + (potential_1d(tj, p) - gamma) * hprime[j];
  };
  Sample out;
  out.h = hermite(s, hvalues[i], hvalues[i + 1], hprime[i], hprime[i + 1], spacing);
  out.dh = hermite(s, hprime[i], hprime[i + 1], hsecond[i], hsecond[i + 1], spacing);
  out.d2h = hermite(s, hsecond[i], hsecond[i + 1], third(i), third(i + 1), spacing);
  if (t < 0.0) out.dh = -out.dh;
  return out;
}

double OscillatorSolution::tail_cutoff(double threshold) const {
  for (std::size_t i = hvalues.size(); i-- > 0;) {
    if (std::fabs(hvalues[i]) >= threshold) {
      return std::min(halflength, (static_cast<double>(i) + 1.0) * spacing);
    }
  }
  return 0.0;
}

double truncated_gamma(double p, double k, double tol) {
  check_p(p);
  if (!(k >= 1.0) || !std::isfinite(k)) throw std::invalid_argument("truncated_gamma: k must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("truncated_gamma: tol must be positive");
  return refine(k, tol, [&](int n) { return lowest(assemble_neumann_oscillator(p, k, n)); }).value;
}

}  // namespace speclab
