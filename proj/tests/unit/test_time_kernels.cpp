#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nrad/error.hpp"
#include "nrad/quadrature.hpp"
#include "nrad/time_kernels.hpp"
#include "oracles/brute_force.hpp"
#include "support/gen.hpp"

using nrad::cplx;
using nrad::KernelParams;
using nrad::NoiseModel;

namespace {

constexpr cplx I1{0.0, 1.0};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Consistent Bohr frequencies from random level energies.
KernelParams random_params(gen::Gen& g, double gmin = 0.05, double gmax = 0.5) {
  const double ef = g.uniform(-2.5, 2.5), ei = g.uniform(-2.5, 2.5);
  const double en = g.uniform(-2.5, 2.5), em = g.uniform(-2.5, 2.5);
  KernelParams p;
  p.delta_fn = ef - en;
  p.delta_ni = en - ei;
  p.delta_fm = ef - em;
  p.delta_mi = em - ei;
  p.delta_nm = en - em;
  p.omega_k = g.uniform(0.2, 3.0);
  p.gamma_n = g.uniform(gmin, gmax);
  p.gamma_m = g.uniform(gmin, gmax);
  return p;
}

// M(c, t) by quadrature, white part as half weight.
cplx moment_by_quadrature(cplx c, double t, const NoiseModel& m) {
  cplx acc = 0.5 * m.white_weight();
  if (m.is_white()) return acc;
  const double L = std::min(t, m.correlation_cutoff());
  auto bp = nrad::uniform_breakpoints(0.0, L, 0.1);
  acc += nrad::integrate<cplx>([&](double x) { return std::exp(c * x) * m.smooth_correlation(x); },
                               std::span<const double>(bp))
             .value;
  return acc;
}

}  // namespace

TEST_CASE("second-order kernel T matches 2-D simplex quadrature") {
  gen::Gen g(21);
  for (int trial = 0; trial < 20; ++trial) {
    KernelParams p;
    p.delta_fn = g.uniform(-4.0, 4.0);
    p.delta_ni = g.uniform(-4.0, 4.0);
    p.omega_k = g.uniform(0.1, 3.0);
    p.nu = g.uniform(-3.0, 3.0);
    p.gamma_n = trial % 4 == 0 ? 0.0 : g.uniform(0.05, 0.5);
    p.t = g.uniform(0.5, 12.0);
    const cplx a = I1 * (p.delta_fn + p.omega_k) - p.gamma_n;
    const cplx b = I1 * (p.delta_ni - p.nu) + p.gamma_n;
    const auto T = nrad::kernel_T_damped(p);
    INFO("trial ", trial, " a=", a, " b=", b, " t=", p.t);
    CHECK(rel(T.value, oracle::simplex_T(a, b, p.t)) < 1e-8);
    auto terms = nrad::kernel_T_terms(p);
    CHECK(rel(terms.resonant + terms.non_resonant, T.value) < 1e-12);
  }
}

TEST_CASE("damped kernel reduces to the undamped one at zero width and vanishes at t = 0") {
  KernelParams p;
  p.delta_fn = -1.3;
  p.delta_ni = 0.4;
  p.omega_k = 2.0;
  p.nu = 0.1;
  p.t = 7.0;
  CHECK(nrad::kernel_T_damped(p).value == nrad::kernel_T_undamped(p).value);
  p.t = 0.0;
  CHECK(nrad::kernel_T_damped(p).value == cplx{});
  p.t = -1.0;
  CHECK_THROWS_AS(nrad::kernel_T_damped(p), nrad::Error);
}

TEST_CASE("non-resonant transient is suppressed by e^{-Gamma t}") {
  KernelParams p;
  p.delta_fn = -2.0;
  p.delta_ni = 1.0;
  p.omega_k = 0.7;
  p.nu = -0.4;
  p.gamma_n = 0.2;
  for (double gt : {1.0, 5.0, 10.0, 20.0}) {
    p.t = gt / p.gamma_n;
    auto damped = nrad::kernel_T_terms(p);
    auto q = p;
    q.gamma_n = 0.0;
    auto bare = nrad::kernel_T_terms(q);
    const double ratio = std::abs(damped.transient) / std::abs(bare.transient);
    CHECK(ratio / std::exp(-gt) > 0.5);
    CHECK(ratio / std::exp(-gt) < 2.0);
  }
}

TEST_CASE("square modulus of the undamped non-resonant term has the sin^2 shape") {
  KernelParams p;
  p.delta_fn = -2.0;
  p.delta_ni = 1.0;
  p.omega_k = 0.5;
  p.t = 30.0;
  const double a2 = std::norm(p.delta_fn + p.omega_k);
  for (double x : {0.0, 0.013, 0.2, 1.7}) {
    p.nu = p.delta_ni - x;
    const double v = std::norm(nrad::kernel_T_terms(p).non_resonant) * a2;
    const double shape = x == 0.0 ? p.t * p.t : std::pow(std::sin(x * p.t / 2.0) / (x / 2.0), 2);
    CHECK(v == doctest::Approx(shape).epsilon(1e-10));
  }
}

TEST_CASE("I(a, b, t) matches the double integral for every built-in noise") {
  gen::Gen g(23);
  std::vector<NoiseModel> models = {NoiseModel::white(1.3), NoiseModel::exponential(0.6),
                                    NoiseModel::gaussian(0.4, 2.0),
                                    NoiseModel::exponential(0.3) + NoiseModel::white(0.5)};
  for (const auto& m : models)
    for (int trial = 0; trial < 5; ++trial) {
      const cplx a(g.uniform(-0.5, 0.5), g.uniform(-4.0, 4.0));
      const cplx b(g.uniform(-0.5, 0.5), g.uniform(-4.0, 4.0));
      const double t = g.uniform(0.5, 10.0);
      const auto I = nrad::I_abt(a, b, t, m);
      CHECK(rel(I.value, oracle::double_integral(a, b, t, m)) < 1e-9);
    }
}

TEST_CASE("I(a, b, t) special cases") {
  const double nu = 1.7;
  CHECK(std::abs(nrad::I_abt(I1 * nu, -I1 * nu, 13.0, NoiseModel::white()).value - 13.0) < 1e-12);
  auto e = NoiseModel::exponential(0.8);
  const auto I = nrad::I_abt(I1 * nu, -I1 * nu, 400.0, e);
  CHECK(std::abs(*I.derivative - e.spectral_density(nu)) < 1e-10);
  const auto J = nrad::I_abt(cplx(-0.3, 1.0), cplx(-0.2, 0.4), 200.0, e);
  CHECK(std::abs(*J.derivative) < 1e-15);
}

TEST_CASE("time derivative of e^{-(a+b)t} I equals e^{-(a+b)t} (M(a) + M(b))") {
  gen::Gen g(29);
  const double h = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = g.noise();
    const cplx a(g.uniform(-0.5, 0.0), g.uniform(-3.0, 3.0));
    const cplx b(g.uniform(-0.5, 0.0), g.uniform(-3.0, 3.0));
    const double t = g.uniform(1.0, 8.0);
    auto F = [&](double s) { return std::exp(-(a + b) * s) * nrad::I_abt(a, b, s, m).value; };
    // five-point stencil
    const cplx fd = (-F(t + 2 * h) + 8.0 * F(t + h) - 8.0 * F(t - h) + F(t - 2 * h)) / (12.0 * h);
    const cplx rhs = std::exp(-(a + b) * t) * (moment_by_quadrature(a, t, m) + moment_by_quadrature(b, t, m));
    CHECK(std::abs(fd - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
    CHECK(std::abs(nrad::noise_moment(a, t, m) - moment_by_quadrature(a, t, m)) < 1e-10);
  }
}

TEST_CASE("asymptotic fourth-order derivatives match the finite-time oracle at Gamma t = 25") {
  gen::Gen g(31);
  for (int trial = 0; trial < 8; ++trial) {
    auto p = random_params(g);
    const auto m = trial % 2 ? NoiseModel::white() : NoiseModel::exponential(g.uniform(0.2, 1.5));
    const double t = 25.0 / std::min(p.gamma_n, p.gamma_m);
    CHECK(rel(nrad::dT1_dt_asymptotic(p, m), oracle::dT1(p, m, t)) < 1e-4);
    CHECK(rel(nrad::dT2_dt_asymptotic(p, m), oracle::dT2(p, m, t)) < 1e-4);
    CHECK(rel(nrad::dT3_dt_asymptotic(p, m), oracle::dT3(p, m, t)) < 1e-4);
  }
}

TEST_CASE("finite-time kernels agree with the lag-quadrature oracle") {
  gen::Gen g(37);
  for (int trial = 0; trial < 6; ++trial) {
    auto p = random_params(g);
    const auto m = g.noise();
    const double t = g.uniform(1.0, 15.0);
    const auto hn = oracle::inner_weight(p.delta_fn + p.omega_k, p.delta_ni, p.gamma_n, t);
    const auto hm = oracle::inner_weight(p.delta_fm + p.omega_k, p.delta_mi, p.gamma_m, t);
    const auto kn = oracle::outer_weight(p.delta_fn, p.delta_ni + p.omega_k, p.gamma_n);
    const auto km = oracle::outer_weight(p.delta_fm, p.delta_mi + p.omega_k, p.gamma_m);
    CHECK(rel(nrad::finite_time_T1(p, m, t), oracle::covariance(hn, hm, t, m)) < 1e-8);
    CHECK(rel(nrad::finite_time_T2(p, m, t), oracle::covariance(hn, km, t, m)) < 1e-8);
    CHECK(rel(nrad::finite_time_T3(p, m, t), oracle::covariance(kn, km, t, m)) < 1e-8);
  }
}

TEST_CASE("asymptotic kernels: reference values and structure") {
  KernelParams p;
  p.delta_fn = p.delta_fm = 2.0;
  p.delta_ni = p.delta_mi = -2.5;
  p.omega_k = 1.0;
  p.gamma_n = p.gamma_m = 0.1;
  const cplx v = nrad::dT1_dt_asymptotic(p, NoiseModel::white());
  CHECK(v.real() == doctest::Approx(1.0 / 9.01).epsilon(1e-12));
  CHECK(std::abs(v.imag()) < 1e-15);
  const cplx w = nrad::dT3_dt_asymptotic(p, NoiseModel::white());
  CHECK(w.real() > 0.0);
  CHECK(std::abs(w.imag()) < 1e-15);

  // exponential noise enters only through f~(Delta_fi + w_k)
  const double fi_w = p.delta_fn + p.delta_ni + p.omega_k;
  auto e = NoiseModel::exponential(0.9);
  CHECK(rel(nrad::dT2_dt_asymptotic(p, e), e.spectral_density(fi_w) * nrad::dT2_dt_asymptotic(p, NoiseModel::white())) <
        1e-14);

  auto q = p;
  q.gamma_n = q.gamma_m = 300.0;
  CHECK(std::abs(nrad::dT2_dt_asymptotic(q, NoiseModel::white())) < 2.0 / (300.0 * 300.0));
}

TEST_CASE("naive mode keeps the intermediate-frequency contribution") {
  KernelParams p;
  p.delta_fn = p.delta_fm = -1.0;
  p.delta_ni = p.delta_mi = 0.4;
  p.omega_k = 1.8;
  auto e = NoiseModel::exponential(1.0);
  const cplx naive = nrad::dT1_dt_asymptotic(p, e, nrad::RateMode::Naive, {400.0, 100.0});
  const double den = std::norm(p.delta_fn + p.omega_k);
  const double expect = (e.spectral_density(p.delta_fn + p.delta_ni + p.omega_k) + e.spectral_density(p.delta_ni)) / den;
  CHECK(naive.real() == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("T_C1 matches nested quadrature") {
  gen::Gen g(41);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_params(g);
    p.t = g.uniform(1.0, 8.0);
    const auto m = g.noise();
    CHECK(rel(nrad::kernel_T_C1(p, m), oracle::T_C1(p, m)) < 1e-7);
  }
}

TEST_CASE("mixed B*C1 derivative averages to zero") {
  gen::Gen g(43);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_params(g);
    const auto m = g.noise();
    const double t = 30.0 / std::min(p.gamma_n, p.gamma_m);
    const auto v = nrad::mixed_dBC1_dt(p, m, t);
    CHECK(std::abs(v.window_average) < 1e-3 * v.instantaneous_bound);
  }
  KernelParams r;
  r.delta_fn = -1.0;
  r.delta_ni = 0.0;
  r.delta_fm = -1.0;
  r.omega_k = 1.0;
  r.gamma_n = r.gamma_m = 0.1;
  CHECK_THROWS_AS(nrad::mixed_dBC1_dt(r, NoiseModel::white(), 100.0), nrad::Error);
}

TEST_CASE("kernels depend only on Bohr frequencies") {
  KernelParams p;
  p.delta_fn = 0.3;
  p.delta_ni = -1.1;
  p.delta_fi = -0.8;
  p.omega_k = 1.0;
  p.t = 3.0;
  CHECK_NOTHROW(nrad::kernel_T_damped(p));
  p.delta_fi = -0.7;
  CHECK_THROWS_AS(nrad::kernel_T_damped(p), nrad::Error);
}
