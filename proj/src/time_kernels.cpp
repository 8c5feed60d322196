#include "nrad/time_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "nrad/error.hpp"
#include "nrad/exp_divided.hpp"
#include "nrad/quadrature.hpp"

namespace nrad {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr double kResonanceTol = 1e-6;
constexpr std::size_t kMaxPanels = 400000;

double term_cutoff(const NoiseTerm& term) {
  if (auto* g = std::get_if<GaussianCorr>(&term.kind)) return 6.5 * g->tau;
  if (auto* e = std::get_if<Exponential>(&term.kind)) return 40.0 * e->tau;
  if (auto* tb = std::get_if<Tabulated>(&term.kind)) return tb->s.back();
  return 0.0;
}

// Breakpoints on [0, L]: table nodes for tabulated terms, then every panel
// cut to at most half an oscillation of the fastest exponential.
std::vector<double> term_breakpoints(const NoiseTerm& term, double L, double freq) {
  std::vector<double> coarse;
  if (auto* tb = std::get_if<Tabulated>(&term.kind)) {
    for (double s : tb->s)
      if (s < L) coarse.push_back(s);
    coarse.push_back(L);
  } else {
    const double tau = std::get<GaussianCorr>(term.kind).tau;
    coarse = uniform_breakpoints(0.0, L, 0.5 * tau);
  }
  const double hmax = freq > 0.0 ? std::numbers::pi / freq : L;
  std::vector<double> bp{coarse.front()};
  for (std::size_t i = 1; i < coarse.size(); ++i) {
    const double a = coarse[i - 1];
    const double b = coarse[i];
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / hmax));
    for (std::size_t j = 1; j <= std::max<std::size_t>(n, 1); ++j)
      bp.push_back(j == n || n <= 1 ? b : a + (b - a) * static_cast<double>(j) / static_cast<double>(n));
    if (bp.size() > kMaxPanels)
      throw Error(ErrorCode::QuadratureNonConvergent,
                  "noise integral needs more than " + std::to_string(kMaxPanels) + " panels");
  }
  return bp;
}

// \int_0^L g(x) f_term(x) dx for a Gaussian or tabulated term.
template <class G>
cplx smooth_term_integral(const NoiseTerm& term, G&& g, double L, double freq) {
  if (!(L > 0.0)) return {};
  const auto bp = term_breakpoints(term, L, freq);
  auto integrand = [&](double x) { return g(x) * term_correlation(term, x); };
  double norm = 0.0;
  for (double x : bp) norm = std::max(norm, std::abs(integrand(x)));
  QuadOptions opt;
  opt.abs_tol = std::max(1e-13 * norm * L, 1e-300);
  opt.rel_tol = 1e-11;
  opt.max_intervals = static_cast<int>(bp.size()) * 64 + 1000;
  return integrate<cplx>(integrand, std::span<const double>(bp), opt).value;
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::InvalidArgument, "time must be finite and non-negative");
}

cplx divide(cplx num, cplx den, const char* what) {
  if (std::abs(den) == 0.0)
    throw Error(ErrorCode::ResonantIntermediate, std::string(what) + ": vanishing denominator");
  return num / den;
}

KernelParams zero_width(KernelParams p) {
  p.gamma_n = 0.0;
  p.gamma_m = 0.0;
  return p;
}

}  // namespace

double KernelParams::fi() const {
  const double sum = delta_fn + delta_ni;
  if (std::isnan(delta_fi)) return sum;
  const double scale = std::max({1.0, std::abs(delta_fi), std::abs(delta_fn), std::abs(delta_ni)});
  if (std::abs(delta_fi - sum) > 1e-12 * scale)
    throw Error(ErrorCode::InvariantViolation, "delta_fi != delta_fn + delta_ni");
  return delta_fi;
}

void KernelParams::validate() const {
  const double f = fi();
  if (delta_fm != 0.0 || delta_mi != 0.0) {
    const double scale = std::max({1.0, std::abs(f), std::abs(delta_fm), std::abs(delta_mi)});
    if (std::abs(f - delta_fm - delta_mi) > 1e-12 * scale)
      throw Error(ErrorCode::InvariantViolation, "delta_fi != delta_fm + delta_mi");
  }
  if (!(gamma_n >= 0.0) || !(gamma_m >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "widths must be non-negative");
  check_time(t);
}

KernelValue kernel_T_damped(const KernelParams& p) {
  p.validate();
  const cplx a = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  const cplx b = I1 * (p.delta_ni - p.nu) + p.gamma_n;
  KernelValue out;
  out.value = simplex_exp_integral(a, b, p.t);
  out.derivative = std::exp(a * p.t) * exp_integral(b, p.t);
  return out;
}

KernelValue kernel_T_undamped(const KernelParams& p) {
  return kernel_T_damped(zero_width(p));
}

KernelTerms kernel_T_terms(const KernelParams& p) {
  p.validate();
  const cplx a = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  const cplx b = I1 * (p.delta_ni - p.nu) + p.gamma_n;
  KernelTerms out;
  out.total = simplex_exp_integral(a, b, p.t);
  if (std::abs(a) > 0.0) {
    out.resonant = -exp_integral(a + b, p.t) / a;
    out.non_resonant = std::exp(a * p.t) * exp_integral(b, p.t) / a;
  } else {
    out.resonant = out.non_resonant = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  }
  out.transient = std::abs(a * b) > 0.0 ? -std::exp(a * p.t) / (a * b)
                                        : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  return out;
}

cplx noise_moment(cplx c, double t, const NoiseModel& noise) {
  check_time(t);
  cplx acc{};
  for (const auto& term : noise.terms()) {
    if (std::holds_alternative<White>(term.kind)) {
      acc += 0.5 * term.scale;
    } else if (auto* e = std::get_if<Exponential>(&term.kind)) {
      acc += term.scale / (2.0 * e->tau) * exp_integral(c - 1.0 / e->tau, t);
    } else {
      const double L = std::min(t, term_cutoff(term));
      acc += smooth_term_integral(term, [c](double x) { return std::exp(c * x); }, L, std::abs(c.imag()));
    }
  }
  return acc;
}

KernelValue I_abt(cplx a, cplx b, double t, const NoiseModel& noise) {
  check_time(t);
  const cplx c = a + b;
  cplx value{};
  cplx deriv{};
  for (const auto& term : noise.terms()) {
    if (std::holds_alternative<White>(term.kind)) {
      value += term.scale * exp_integral(c, t);
      deriv += term.scale * std::exp(c * t);
    } else if (auto* e = std::get_if<Exponential>(&term.kind)) {
      const double g = term.scale / (2.0 * e->tau);
      const cplx pa = a - 1.0 / e->tau;
      const cplx pb = b - 1.0 / e->tau;
      value += g * (simplex_exp_integral(c, pa - c, t) + simplex_exp_integral(c, pb - c, t));
      deriv += g * t * (exp_divided(pa * t, c * t) + exp_divided(pb * t, c * t));
    } else {
      const double L = std::min(t, term_cutoff(term));
      const double freq = std::max({std::abs(a.imag()), std::abs(b.imag()), std::abs(c.imag())});
      value += smooth_term_integral(
          term, [&](double x) { return (std::exp(a * x) + std::exp(b * x)) * exp_integral(c, t - x); }, L,
          freq);
      deriv += smooth_term_integral(
          term, [&](double x) { return (std::exp(a * x) + std::exp(b * x)) * std::exp(c * (t - x)); }, L,
          freq);
    }
  }
  KernelValue out;
  out.value = value;
  out.derivative = deriv;
  return out;
}

ExpSum& ExpSum::operator+=(const ExpSum& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

ExpSum ExpSum::scaled(cplx c) const {
  ExpSum out = *this;
  for (auto& t : out.terms) t.coeff *= c;
  return out;
}

ExpSum weight_inner_noise(double delta_fn_wk, double delta_ni, double gamma_n, double t) {
  const cplx a = I1 * delta_fn_wk - gamma_n;
  const cplx b = I1 * delta_ni + gamma_n;
  if (std::abs(a) * std::max(t, 1.0) < kResonanceTol)
    throw Error(ErrorCode::ResonantIntermediate, "Delta_fn + omega_k vanishes at zero width");
  ExpSum h;
  h.terms.push_back({std::exp(a * t) / a, b});
  h.terms.push_back({-1.0 / a, a + b});
  return h;
}

ExpSum weight_outer_noise(double delta_fn, double delta_ni_wk, double gamma_n) {
  const cplx l0 = I1 * delta_fn - gamma_n;
  const cplx d = I1 * delta_ni_wk + gamma_n;
  if (std::abs(d) < kResonanceTol)
    throw Error(ErrorCode::ResonantIntermediate, "Delta_ni + omega_k vanishes at zero width");
  ExpSum h;
  h.terms.push_back({1.0 / d, l0 + d});
  h.terms.push_back({-1.0 / d, l0});
  return h;
}

cplx noise_covariance(const ExpSum& h, const ExpSum& k, double t, const NoiseModel& noise) {
  std::vector<cplx> parts;
  parts.reserve(h.terms.size() * k.terms.size());
  for (const auto& x : h.terms)
    for (const auto& y : k.terms)
      parts.push_back(x.coeff * std::conj(y.coeff) * I_abt(x.rate, std::conj(y.rate), t, noise).value);
  return pairwise_sum(parts);
}

cplx finite_time_T1(const KernelParams& p, const NoiseModel& noise, double t) {
  p.validate();
  const auto h = weight_inner_noise(p.delta_fn + p.omega_k, p.delta_ni, p.gamma_n, t);
  const auto k = weight_inner_noise(p.delta_fm + p.omega_k, p.delta_mi, p.gamma_m, t);
  return noise_covariance(h, k, t, noise);
}

cplx finite_time_T2(const KernelParams& p, const NoiseModel& noise, double t) {
  p.validate();
  const auto h = weight_inner_noise(p.delta_fn + p.omega_k, p.delta_ni, p.gamma_n, t);
  const auto k = weight_outer_noise(p.delta_fm, p.delta_mi + p.omega_k, p.gamma_m);
  return noise_covariance(h, k, t, noise);
}

cplx finite_time_T3(const KernelParams& p, const NoiseModel& noise, double t) {
  p.validate();
  const auto h = weight_outer_noise(p.delta_fn, p.delta_ni + p.omega_k, p.gamma_n);
  const auto k = weight_outer_noise(p.delta_fm, p.delta_mi + p.omega_k, p.gamma_m);
  return noise_covariance(h, k, t, noise);
}

namespace {

template <class F>
cplx windowed(F&& finite, const KernelParams& p, const NoiseModel& noise, const NaiveWindow& w) {
  if (!(w.window > 0.0)) throw Error(ErrorCode::InvalidArgument, "naive window must be positive");
  const auto q = zero_width(p);
  return (finite(q, noise, w.t + w.window) - finite(q, noise, w.t)) / w.window;
}

}  // namespace

cplx dT1_dt_asymptotic(const KernelParams& p, const NoiseModel& noise, RateMode mode,
                       const NaiveWindow& naive) {
  if (mode == RateMode::Naive) return windowed(finite_time_T1, p, noise, naive);
  p.validate();
  const double f = noise.spectral_density(p.fi() + p.omega_k);
  const cplx an = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  const cplx am = -I1 * (p.delta_fm + p.omega_k) - p.gamma_m;
  return divide(f, an * am, "dT1");
}

cplx dT2_dt_asymptotic(const KernelParams& p, const NoiseModel& noise, RateMode mode,
                       const NaiveWindow& naive) {
  if (mode == RateMode::Naive) return windowed(finite_time_T2, p, noise, naive);
  p.validate();
  const double f = noise.spectral_density(p.fi() + p.omega_k);
  const cplx an = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  const cplx bm = -I1 * (p.delta_mi + p.omega_k) + p.gamma_m;
  return -divide(f, an * bm, "dT2");
}

cplx dT3_dt_asymptotic(const KernelParams& p, const NoiseModel& noise, RateMode mode,
                       const NaiveWindow& naive) {
  if (mode == RateMode::Naive) return windowed(finite_time_T3, p, noise, naive);
  p.validate();
  const double f = noise.spectral_density(p.fi() + p.omega_k);
  const cplx bn = I1 * (p.delta_ni + p.omega_k) + p.gamma_n;
  const cplx bm = -I1 * (p.delta_mi + p.omega_k) + p.gamma_m;
  return divide(f, bn * bm, "dT3");
}

cplx kernel_T_B(double delta_fi_wk, double t) {
  check_time(t);
  return exp_integral(I1 * delta_fi_wk, t);
}

cplx kernel_T_C1(const KernelParams& p, const NoiseModel& noise) {
  p.validate();
  const double t = p.t;
  const double omega = p.fi() + p.omega_k;
  const cplx a1 = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  const cplx b = I1 * p.delta_ni + p.gamma_n;
  const cplx c = -I1 * p.delta_mi - p.gamma_m;
  if (omega == 0.0) throw Error(ErrorCode::ResonantMixedTerm, "Delta_fi + omega_k = 0");
  const cplx io = I1 * omega;
  const cplx m_c = noise_moment(c, t, noise);
  const cplx m_res = noise_moment(c + io, t, noise);
  const cplx m_bc = noise_moment(b + c, t, noise);
  const cplx first = divide(std::exp(io * t) * m_c - m_res, b * io, "T_C1");
  const cplx second = divide(std::exp(a1 * t) * m_bc - m_res, b * a1, "T_C1");
  return first - second;
}

MixedTermValue mixed_dBC1_dt(const KernelParams& p, const NoiseModel& noise, double t,
                             double window_periods) {
  p.validate();
  check_time(t);
  const double omega = p.fi() + p.omega_k;
  if (omega == 0.0) throw Error(ErrorCode::ResonantMixedTerm, "Delta_fi + omega_k = 0");
  const cplx io = I1 * omega;
  const cplx c1 = -I1 * p.delta_mi - p.gamma_m;
  const cplx c2 = I1 * (p.delta_fm + p.omega_k) - p.gamma_m;
  const cplx b = I1 * p.delta_ni + p.gamma_n;
  const cplx a1 = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
  auto terms = [&](double s) {
    const cplx x = divide(std::exp(io * s) * noise_moment(c1, s, noise), io * b, "mixed term");
    const cplx y = divide(std::exp(-io * s) * noise_moment(c2, s, noise), io * a1, "mixed term");
    return std::pair<cplx, cplx>(x, y);
  };
  MixedTermValue out;
  const auto [x, y] = terms(t);
  out.value = x + y;
  out.instantaneous_bound = std::abs(x) + std::abs(y);
  const double len = 2.0 * std::numbers::pi * window_periods / std::abs(omega);
  const auto bp = uniform_breakpoints(t, t + len, std::numbers::pi / std::abs(omega));
  QuadOptions opt;
  opt.abs_tol = 1e-12 * std::max(out.instantaneous_bound, 1e-300) * len;
  const auto r = integrate<cplx>(
      [&](double s) {
        const auto [u, v] = terms(s);
        return u + v;
      },
      std::span<const double>(bp), opt);
  out.window_average = r.value / len;
  return out;
}

}  // namespace nrad
