// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "speclab/experiments.hpp"

namespace speclab {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (b == a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

// exp(-1/(1-u^2)) and its first two u-derivatives.
BumpSample template_bump(double u) {
  const double q = 1.0 - u * u;
  if (q <= 1e-3) return {0.0, 0.0, 0.0};
  const double f = std::exp(-1.0 / q);
  const double g1 = -2.0 * u / (q * q);
  const double g2 = -2.0 / (q * q) - 8.0 * u * u / (q * q * q);
  return {f, f * g1, f * (g1 * g1 + g2)};
}

struct Phase {
  double d1;  // phi'
  double d2;  // phi''
};

Phase phase_derivatives(const QuasimodeSpec& s, double y) {
  if (s.phasekind == PhaseKind::Critical) return {std::sqrt(s.mu), 0.0};
  const double a = s.params.radial_exponent();
  const double c = s.params.lambda() - s.oscillator.gamma;
  const double y2a = std::pow(y, 2.0 * a);
  const double d1 = std::sqrt(std::max(c * y2a + s.mu, 0.0));
  return {d1, d1 > 0.0 ? c * a * y2a / y / d1 : 0.0};
}

// Simpson weights for `intervals` (even) subintervals of width h.
double simpson_weight(int i, int intervals, double h) {
  if (i == 0 || i == intervals) return h / 3.0;
  return (i % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
}

struct Integrals {
  double norm2;
  double residual2;
};

Integrals tensor_rule(const QuasimodeSpec& spec, double tcut, int ns, int ny) {
  const double p = spec.params.p();
  const double a = spec.params.radial_exponent();
  const double k = spec.k;
  const double amp2 = std::pow(k, -2.0 / (p + 2.0));
  const double hs = tcut / ns;
  const double hy = k / ny;

  std::vector<OscillatorSolution::Sample> hs_samples(static_cast<std::size_t>(ns) + 1);
  for (int i = 0; i <= ns; ++i) hs_samples[i] = spec.oscillator.evaluate(i * hs);

  // Phase accumulated node to node from its lower limit.
  std::vector<double> phi(static_cast<std::size_t>(ny) + 1);
  auto dphi = [&](double t) { return phase_derivatives(spec, t).d1; };
  if (spec.phasekind == PhaseKind::Critical) {
    for (int j = 0; j <= ny; ++j) phi[j] = std::sqrt(spec.mu) * (k + j * hy);
  } else {
    phi[0] = integrate(dphi, spec.phase_origin(), k, 1e-12);
    for (int j = 1; j <= ny; ++j) phi[j] = phi[j - 1] + integrate(dphi, k + (j - 1) * hy, k + j * hy, 1e-13);
  }

  using cd = std::complex<double>;
  const cd I(0.0, 1.0);
  double norm2 = 0.0;
  double res2 = 0.0;
  for (int j = 0; j <= ny; ++j) {
    const double y = k + j * hy;
    const BumpSample b = bump(y / k);
    if (b.chi == 0.0 && b.dchi == 0.0 && b.d2chi == 0.0) continue;
    const double c = b.chi;
    const double c1 = b.dchi / k;
    const double c2 = b.d2chi / (k * k);
    const Phase ph = phase_derivatives(spec, y);
    const cd e = std::exp(I * phi[j]);
    const double ya = std::pow(y, a);
    const double y2a = ya * ya;
    const double wy = simpson_weight(j, ny, hy) / ya;  // dx = ds / y^a
    double rowsum_n = 0.0;
    double rowsum_r = 0.0;
    for (int i = 0; i <= ns; ++i) {
      const double s = i * hs;
      const auto& h = hs_samples[i];
      const double x = s / ya;
      const double hy1 = h.dh * a * s / y;
      const double hy2 = h.d2h * (a * s / y) * (a * s / y) + h.dh * a * (a - 1.0) * s / (y * y);
      const double v = potential_2d(x, y, spec.params);
      const cd psi_xx = y2a * h.d2h * c;
      const cd psi_yy = hy2 * c + 2.0 * hy1 * (c1 + I * ph.d1 * c) +
                        h.h * (c2 + 2.0 * I * ph.d1 * c1 + (I * ph.d2 - ph.d1 * ph.d1) * c);
      const cd r = e * (-psi_xx - psi_yy + (v - spec.mu) * h.h * c);
      const double w = simpson_weight(i, ns, hs);
      rowsum_n += w * h.h * h.h * c * c;
      rowsum_r += w * std::norm(r);
    }
    norm2 += wy * rowsum_n;
    res2 += wy * rowsum_r;
  }
  // Even in s: the rule covers s >= 0 only.
  return {2.0 * amp2 * norm2, 2.0 * amp2 * res2};
}

}  // namespace

std::string to_string(PhaseKind kind) { return kind == PhaseKind::Critical ? "critical" : "supercritical"; }

double bump_normalization() {
  static const double c = [] {
    const double integral =
        integrate([](double z) { return std::pow(template_bump(2.0 * z - 3.0).chi, 2); }, 1.0, 2.0, 1e-16);
    return 1.0 / std::sqrt(integral);
  }();
  return c;
}

BumpSample bump(double z) {
  const double u = 2.0 * z - 3.0;
  if (!(std::fabs(u) < 1.0)) return {0.0, 0.0, 0.0};
  const BumpSample t = template_bump(u);
  const double c = bump_normalization();
  return {c * t.chi, 2.0 * c * t.dchi, 4.0 * c * t.d2chi};
}

double QuasimodeSpec::phase_origin() const {
  if (phasekind == PhaseKind::Critical || mu == 0.0) return 0.0;
  const double gap = params.lambda() - oscillator.gamma;
  return std::pow(std::fabs(mu) / gap, (params.p() + 2.0) / (2.0 * params.p()));
}

void QuasimodeSpec::validate() const {
  if (oscillator.hvalues.empty()) throw std::invalid_argument("quasimode: missing oscillator solution");
  if (oscillator.p != params.p()) throw std::invalid_argument("quasimode: oscillator exponent differs from p");
  if (!(k >= 1.0) || !std::isfinite(k)) throw std::invalid_argument("quasimode: k must be >= 1");
  if (!std::isfinite(mu)) throw std::invalid_argument("quasimode: mu must be finite");
  const double gamma = oscillator.gamma;
  if (phasekind == PhaseKind::Supercritical) {
    if (!(params.lambda() > gamma)) throw std::invalid_argument("quasimode: supercritical kind needs lambda > gamma_p");
    const double expected = (params.p() + 2.0) / (2.0 * params.p() + 2.0) * std::sqrt(params.lambda() - gamma);
    if (std::fabs(beta - expected) > 1e-12 * expected) throw std::invalid_argument("quasimode: beta inconsistent");
    if (phase_origin() > k) throw std::invalid_argument("quasimode: phase origin lies beyond the bump support");
  } else {
    if (std::fabs(params.lambda() - gamma) > 1e-9) throw std::invalid_argument("quasimode: critical kind needs lambda = gamma_p");
    if (!(mu >= 0.0)) throw std::invalid_argument("quasimode: critical kind needs mu >= 0");
    if (beta != 0.0) throw std::invalid_argument("quasimode: critical kind has beta = 0");
  }
}

OscillatorSolution quasimode_oscillator(double p) {
  const double length = default_halflength(p);
  return ground_function(p, length, static_cast<int>(std::lround(512.0 * length)));
}

QuasimodeSpec make_supercritical(const PotentialParams& params, double mu, double k, const OscillatorSolution& oscillator) {
  QuasimodeSpec s;
  s.params = params;
  s.mu = mu;
  s.k = k;
  s.phasekind = PhaseKind::Supercritical;
  s.oscillator = oscillator;
  const double gap = params.lambda() - oscillator.gamma;
  s.beta = gap > 0.0 ? (params.p() + 2.0) / (2.0 * params.p() + 2.0) * std::sqrt(gap) : 0.0;
  s.validate();
  return s;
}

QuasimodeSpec make_critical(double mu, double k, const OscillatorSolution& oscillator) {
  QuasimodeSpec s;
  s.params = PotentialParams(oscillator.p, oscillator.gamma);
  s.mu = mu;
  s.k = k;
  s.phasekind = PhaseKind::Critical;
  s.oscillator = oscillator;
  s.validate();
  return s;
}

QuasimodeResult quasimode_residual(const QuasimodeSpec& spec) {
  spec.validate();
  QuasimodeResult out;
  out.tcut = spec.oscillator.tail_cutoff(1e-9);
  constexpr int kStart = 64;
  constexpr int kMax = 4096;
  constexpr double kTarget = 1e-8;
  int ns = kStart;
  int ny = kStart;
  Integrals prev = tensor_rule(spec, out.tcut, ns, ny);
  double change = std::numeric_limits<double>::infinity();
  while (ns < kMax) {
    ns *= 2;
    ny *= 2;
    const Integrals cur = tensor_rule(spec, out.tcut, ns, ny);
    change = std::max(std::fabs(cur.norm2 - prev.norm2) / cur.norm2,
                      std::fabs(cur.residual2 - prev.residual2) / cur.residual2);
    prev = cur;
    if (change < kTarget) break;
  }
  if (!(change <= 1e-3)) throw ConvergenceError("quasimode_residual: quadrature under-resolved");
  out.norm = std::sqrt(prev.norm2);
  out.residual = std::sqrt(prev.residual2);
  out.relative = out.residual / out.norm;
  out.s_intervals = ns;
  out.y_intervals = ny;
  out.change = change;
  return out;
}

}  // namespace speclab
