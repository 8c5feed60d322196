// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "nrad/linewidth.hpp"
#include "nrad/mc_oracle.hpp"
#include "nrad/quadrature.hpp"
#include "nrad/rate_engine.hpp"
#include "nrad/time_kernels.hpp"
#include "oracles/brute_force.hpp"
#include "support/gen.hpp"

namespace fs = std::filesystem;
using nrad::cplx;
using nrad::KernelParams;
using nrad::NoiseModel;

namespace {

// Pinned tolerances.
constexpr double kKernelTol = 1e-4;
constexpr double kLargeTime = 25.0;
constexpr double kIdentityTol = 1e-8;
constexpr double kSuppressionFactor = 2.0;
constexpr double kDeltaShapeTol = 0.05;
constexpr double kDeltaShapeXt = 200.0;
constexpr double kSpikeTol = 1e-10;
constexpr double kAssemblyTol = 1e-12;
constexpr double kAngularTol = 1e-9;
constexpr double kLinewidthTol = 1e-12;
constexpr double kSigmas = 3.0;
constexpr double kMixedTol = 1e-3;

constexpr cplx I1{0.0, 1.0};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

KernelParams random_params(gen::Gen& g) {
  const double ef = g.uniform(-2.5, 2.5), ei = g.uniform(-2.5, 2.5);
  const double en = g.uniform(-2.5, 2.5), em = g.uniform(-2.5, 2.5);
  KernelParams p;
  p.delta_fn = ef - en;
  p.delta_ni = en - ei;
  p.delta_fm = ef - em;
  p.delta_mi = em - ei;
  p.delta_nm = en - em;
  p.omega_k = g.uniform(0.2, 3.0);
  p.gamma_n = g.uniform(0.05, 0.5);
  p.gamma_m = g.uniform(0.05, 0.5);
  return p;
}

Outcome kernel_oracle() {
  gen::Gen g(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(g);
    const auto m = trial % 2 ? NoiseModel::white(g.uniform(0.5, 2.0)) : NoiseModel::exponential(g.uniform(0.2, 2.0));
    const double t = kLargeTime / std::min(p.gamma_n, p.gamma_m);
    worst = std::max({worst, rel(nrad::dT1_dt_asymptotic(p, m), oracle::dT1(p, m, t)),
                      rel(nrad::dT2_dt_asymptotic(p, m), oracle::dT2(p, m, t)),
                      rel(nrad::dT3_dt_asymptotic(p, m), oracle::dT3(p, m, t))});
  }
  return {worst < kKernelTol, "kernel-oracle equivalence: 50 sets x 3 kernels, max rel err " + fmt("%.2e", worst) +
                                  " (tol " + fmt("%.0e", kKernelTol) + ")"};
}

cplx moment_by_quadrature(cplx c, double t, const NoiseModel& m) {
  cplx acc = 0.5 * m.white_weight();
  if (m.is_white()) return acc;
  const double L = std::min(t, m.correlation_cutoff());
  auto bp = nrad::uniform_breakpoints(0.0, L, 0.05);
  nrad::QuadOptions opt;
  opt.abs_tol = 1e-14;
  acc += nrad::integrate<cplx>([&](double x) { return std::exp(c * x) * m.smooth_correlation(x); },
                               std::span<const double>(bp), opt)
             .value;
  return acc;
}

NoiseModel gaussian_table(double tau) {
  std::vector<double> s, f;
  for (int q = 0; q <= 1600; ++q) {
    s.push_back(8.0 * tau * q / 1600.0);
    f.push_back(std::exp(-s.back() * s.back() / (tau * tau)) / (tau * std::sqrt(std::numbers::pi)));
  }
  return NoiseModel::tabulated(s, f);
}

Outcome derivative_identity() {
  gen::Gen g(1002);
  double worst = 0.0;
  const double h = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    NoiseModel m;
    switch (trial % 5) {
      case 0: m = NoiseModel::white(g.uniform(0.2, 2.0)); break;
      case 1: m = NoiseModel::exponential(g.uniform(0.2, 2.0), g.uniform(0.2, 2.0)); break;
      case 2: m = NoiseModel::gaussian(g.uniform(0.2, 1.5), g.uniform(0.2, 2.0)); break;
      case 3: m = gaussian_table(g.uniform(0.3, 1.0)); break;
      default: m = NoiseModel::exponential(g.uniform(0.2, 1.0)) + NoiseModel::white(g.uniform(0.1, 0.5));
    }
    const cplx a(g.uniform(-0.5, 0.0), g.uniform(-3.0, 3.0));
    const cplx b(g.uniform(-0.5, 0.0), g.uniform(-3.0, 3.0));
    const double t = g.uniform(1.0, 8.0);
    auto F = [&](double s) { return std::exp(-(a + b) * s) * nrad::I_abt(a, b, s, m).value; };
    const cplx lhs = (-F(t + 2 * h) + 8.0 * F(t + h) - 8.0 * F(t - h) + F(t - 2 * h)) / (12.0 * h);
    const cplx rhs = std::exp(-(a + b) * t) * (moment_by_quadrature(a, t, m) + moment_by_quadrature(b, t, m));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return {worst < kIdentityTol, "derivative identity: 100 (a, b, noise) triples, max err " + fmt("%.2e", worst) +
                                    " (tol " + fmt("%.0e", kIdentityTol) + ")"};
}

Outcome suppression() {
  gen::Gen g(1003);
  double lo = 1e300, hi = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    KernelParams p;
    p.delta_fn = g.uniform(-5.0, 5.0);
    p.delta_ni = g.uniform(-5.0, 5.0);
    p.omega_k = g.uniform(0.2, 3.0);
    p.nu = g.uniform(-3.0, 3.0);
    p.gamma_n = g.uniform(0.05, 0.5);
    for (double gt : {1.0, 2.0, 5.0, 10.0, 15.0, 20.0}) {
      p.t = gt / p.gamma_n;
      auto q = p;
      q.gamma_n = 0.0;
      const double ratio = std::abs(nrad::kernel_T_terms(p).transient) / std::abs(nrad::kernel_T_terms(q).transient);
      lo = std::min(lo, ratio / std::exp(-gt));
      hi = std::max(hi, ratio / std::exp(-gt));
    }
  }
  const bool decay_ok = lo > 1.0 / kSuppressionFactor && hi < kSuppressionFactor;

  // Undamped non-resonant term near nu = Delta_ni: integrated |.|^2 and its
  // windowed time derivative against 2 pi t and 2 pi.
  KernelParams p;
  p.delta_fn = -2.0;
  p.delta_ni = 1.0;
  p.omega_k = 0.5;
  const double a2 = std::norm(p.delta_fn + p.omega_k);
  auto window_integral = [&](double t, double X) {
    auto bp = nrad::uniform_breakpoints(-X, X, std::numbers::pi / t);
    nrad::QuadOptions opt;
    opt.max_intervals = 200000;
    return nrad::integrate<double>(
               [&](double x) {
                 auto q = p;
                 q.t = t;
                 q.nu = p.delta_ni - x;
                 return a2 * std::norm(nrad::kernel_T_terms(q).non_resonant);
               },
               std::span<const double>(bp), opt)
        .value;
  };
  double worst = 0.0;
  for (double t : {40.0, 100.0, 250.0}) {
    const double X = kDeltaShapeXt / t;
    const double v = window_integral(t, X);
    const double dv = (window_integral(t + 1.0, X) - window_integral(t - 1.0, X)) / 2.0;
    worst = std::max({worst, std::abs(v / (2.0 * std::numbers::pi * t) - 1.0),
                      std::abs(dv / (2.0 * std::numbers::pi) - 1.0)});
  }
  const bool shape_ok = worst < kDeltaShapeTol;
  return {decay_ok && shape_ok, "non-resonant suppression: transient/e^{-Gt} in [" + fmt("%.3f", lo) + ", " +
                                    fmt("%.3f", hi) + "] over Gt in [1,20] (tol x2); undamped |T|^2 vs 2 pi t delta " +
                                    "max rel dev " + fmt("%.2e", worst) + " at xt=200 (tol 5%)"};
}

Outcome spike() {
  const auto base = NoiseModel::exponential(0.5);
  double worst = 0.0;
  const std::vector<double> amps = {1.0, 1e2, 1e4, 1e6};
  std::vector<nrad::SystemSpec> systems = {nrad::builtin_two_level(1.0, 1.0, 0.7, 0.2)};
  auto osc = nrad::builtin_harmonic_oscillator(1.0, 1.0, 1.0, 5);
  systems.push_back(nrad::with_radiative_widths(osc));
  for (const auto& s : systems)
    for (double k : {0.6, 1.0, 2.0}) {  // |Delta_fi + w_k| >= 0.6 for ground-state emission
      nrad::RateRequest req;
      req.spec = s;
      req.noise = base;
      req.k_grid = {k};
      const double r0 = nrad::emission_rate_at_k(req, k);
      for (double A : amps) {
        req.noise = base + NoiseModel::gaussian(2000.0, A);
        worst = std::max(worst, std::abs(nrad::emission_rate_at_k(req, k) - r0) / r0);
      }
    }

  bool monotone = true;
  double growth = 0.0;
  auto toy = nrad::builtin_two_level(1e-3, 1.0, 0.7, 0.0);
  for (double k : {0.5, 1.0, 2.0}) {
    nrad::RateRequest req;
    req.spec = toy;
    req.noise = base;
    req.k_grid = {k};
    req.mode = nrad::RateMode::Naive;
    req.naive = {20000.0, 5000.0};
    double prev = nrad::emission_rate_at_k(req, k);
    const double first = prev;
    for (double A : amps) {
      req.noise = base + NoiseModel::gaussian(2000.0, A);
      const double v = nrad::emission_rate_at_k(req, k);
      monotone = monotone && v > prev;
      prev = v;
    }
    growth = std::max(growth, prev / first);
  }
  return {worst < kSpikeTol && monotone,
          "no f~(0) term: spike A<=1e6 changes regularized rate by max rel " + fmt("%.2e", worst) + " (tol " +
              fmt("%.0e", kSpikeTol) + "); naive rate " + (monotone ? "grows monotonically" : "NOT monotone") +
              " in A (x" + fmt("%.3g", growth) + " at A=1e6)"};
}

cplx radiation(const nrad::SystemSpec& s, double k, int dir, std::size_t a, std::size_t b) {
  const auto& c = s.constants;
  const double alpha = std::sqrt(c.hbar / (2.0 * c.eps0 * k * c.c * std::pow(2.0 * std::numbers::pi, 3)));
  cplx acc{};
  for (const auto& d : s.dipole)
    if (d.direction == dir) acc += -s.particles[d.particle].charge / s.particles[d.particle].mass * d.p(a, b);
  return alpha * acc;
}

double modulus_form(const nrad::SystemSpec& s, const NoiseModel& noise, double k, std::size_t f) {
  const std::size_t i = s.initial_state;
  const double w = k * s.constants.c;
  auto delta = [&](std::size_t a, std::size_t b) { return (s.levels[a].energy - s.levels[b].energy) / s.constants.hbar; };
  double acc = 0.0;
  for (const auto& ch : s.noise_couplings)
    for (int dir : s.directions()) {
      cplx a{};
      for (std::size_t n = 0; n < s.dim(); ++n) {
        a += radiation(s, k, dir, f, n) * ch.op(n, i) / (I1 * (delta(f, n) + w) - s.widths[n]);
        a -= ch.op(f, n) * radiation(s, k, dir, n, i) / (I1 * (delta(n, i) + w) + s.widths[n]);
      }
      acc += std::norm(a);
    }
  return acc * noise.spectral_density(delta(f, i) + w);
}

Outcome assembly() {
  gen::Gen g(1005);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto s = g.system(static_cast<std::size_t>(g.integer(2, 5)));
    const int channels = g.integer(1, 3);
    while (static_cast<int>(s.noise_couplings.size()) < channels) s.noise_couplings.push_back({g.hermitian(s.dim()), "position"});
    if (g.coin()) s.dipole.push_back({1, 0, g.hermitian(s.dim())});
    s.initial_state = static_cast<std::size_t>(g.integer(0, static_cast<int>(s.dim()) - 1));
    const auto noise = g.noise();
    const double k = g.uniform(0.3, 3.0);
    for (std::size_t f = 0; f < s.dim(); ++f) {
      const double sum = nrad::rate_R11(s, noise, k, f).real() + 2.0 * nrad::rate_R12(s, noise, k, f).real() +
                         nrad::rate_R22(s, noise, k, f).real();
      const double ref = modulus_form(s, noise, k, f);
      worst = std::max(worst, std::abs(sum - ref) / ref);
    }
  }
  return {worst < kAssemblyTol, "assembly identity: 20 random systems, max rel err " + fmt("%.2e", worst) + " (tol " +
                                    fmt("%.0e", kAssemblyTol) + ")"};
}

Outcome angular() {
  const auto F = nrad::angular_polarization_tensor(nrad::AngularMethod::SphereQuadrature);
  double worst = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int jp = 0; jp < 3; ++jp)
      worst = std::max(worst, std::abs(F[j][jp] - (j == jp ? 8.0 * std::numbers::pi / 3.0 : 0.0)));
  return {worst < kAngularTol,
          "angular identity: 9 pairs, max abs err " + fmt("%.2e", worst) + " (tol " + fmt("%.0e", kAngularTol) + ")"};
}

Outcome linewidth() {
  double worst = 0.0;
  bool ground_zero = true;
  for (auto units : {nrad::PhysicalConstants::reduced(), nrad::PhysicalConstants::si()}) {
    const bool si = units == nrad::PhysicalConstants::si();
    const double w0 = si ? 1e15 : 1.0;
    const double m = si ? nrad::kElectronMassSI : 1.0;
    const double e = si ? -nrad::kElementaryChargeSI : 1.0;
    const auto spec = nrad::builtin_harmonic_oscillator_3d(w0, m, e, 5, units);
    const double lambda = nrad::oscillator_decay_rate({{0, 0, 0}, w0, m, e}, units);
    for (std::size_t i = 0; i < spec.dim(); ++i) {
      int q[3];
      std::sscanf(spec.levels[i].label.c_str(), "%d,%d,%d", &q[0], &q[1], &q[2]);
      if (q[0] > 3 || q[1] > 3 || q[2] > 3) continue;
      const double width = nrad::generic_linewidth(spec, i);
      const int total = q[0] + q[1] + q[2];
      if (total == 0) ground_zero = ground_zero && width == 0.0;
      else worst = std::max(worst, std::abs(width - lambda * total) / (lambda * total));
    }
  }
  return {worst < kLinewidthTol && ground_zero, "linewidth closed form: quanta up to (3,3,3), max rel err " +
                                                     fmt("%.2e", worst) + " (tol " + fmt("%.0e", kLinewidthTol) +
                                                     "), ground " + (ground_zero ? "exactly 0" : "NOT 0")};
}

Outcome monte_carlo() {
  auto toy = nrad::builtin_two_level(1.0, 1.0, 0.7, 0.2);
  const double k = 0.8, t = 125.0, window = 25.0;
  std::ostringstream d;
  bool ok = true;
  for (const auto& m : {NoiseModel::white(), NoiseModel::exponential(1.0)}) {
    nrad::RateRequest req;
    req.spec = toy;
    req.noise = m;
    req.k_grid = {k};
    const auto c = nrad::compare(nrad::emission_rate_to_final(req, k, 0),
                                 nrad::estimate_rate(toy, m, k, 0, t, window, 10000, 2024));
    ok = ok && std::abs(c.z) < kSigmas;
    d << m.describe() << " z=" << fmt("%.2f", c.z) << "; ";
    const auto ac = nrad::empirical_autocovariance(m, 0.05, 4096, 20, 2000, 77);
    int outside = 0;
    for (const auto& l : ac) outside += std::abs(l.mean - l.target) > kSigmas * l.std_error;
    ok = ok && outside == 0;
    d << "autocov lags outside 3 sigma " << outside << "/20; ";
  }
  return {ok, "Monte-Carlo agreement (1e4 realizations, damped 2-level rate): " + d.str()};
}

Outcome mixed() {
  gen::Gen g(1009);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // ground-state initial level: every other level lies above it
    const double ei = 0.0;
    const double en = g.uniform(0.3, 5.0), em = g.uniform(0.3, 5.0), ef = g.uniform(0.0, 5.0);
    KernelParams p;
    p.delta_fn = ef - en;
    p.delta_ni = en - ei;
    p.delta_fm = ef - em;
    p.delta_mi = em - ei;
    p.delta_nm = en - em;
    p.omega_k = g.uniform(0.2, 3.0);
    p.gamma_n = g.uniform(0.05, 0.5);
    p.gamma_m = g.uniform(0.05, 0.5);
    const auto m = trial % 2 ? NoiseModel::white() : NoiseModel::exponential(g.uniform(0.2, 2.0));
    const auto v = nrad::mixed_dBC1_dt(p, m, 30.0 / std::min(p.gamma_n, p.gamma_m));
    worst = std::max(worst, std::abs(v.window_average) / v.instantaneous_bound);
  }
  return {worst < kMixedTol, "mixed B*C1 vanishing: 20 sets, max |window avg| / bound " + fmt("%.2e", worst) +
                                 " (tol " + fmt("%.0e", kMixedTol) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "nrad_acceptance_repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = dir / "run.cfg";
  std::ofstream(cfg) << "[run]\noutput = " << (dir / "out").string()
                     << "\nseed = 99\n[system]\nbuiltin = oscillator3d\nn_per_axis = 2\n"
                        "[noise]\nmodel = exponential\ntau = 0.4\n[grid]\nk_min = 0.2\nk_max = 3\nn_points = 64\n"
                        "[oracle]\nk = 0.9\nt = 20\nwindow = 5\ndt = 0.02\nsamples = 400\n";
  std::string ref_spec, ref_oracle;
  bool same = true;
  for (int threads : {1, 4, 8}) {
    const int a = std::system((std::string(NRAD_CLI_PATH) + " spectrum --config " + cfg.string() + " --threads " +
                               std::to_string(threads) + " > /dev/null")
                                  .c_str());
    const int b = std::system((std::string(NRAD_CLI_PATH) + " oracle --config " + cfg.string() + " --threads " +
                               std::to_string(threads) + " > /dev/null")
                                  .c_str());
    if (a != 0 || b != 0) return {false, "reproducibility: CLI exited with an error"};
    const auto s = slurp(dir / "out.csv");
    const auto o = slurp(dir / "out_oracle.csv");
    if (threads == 1) {
      ref_spec = s;
      ref_oracle = o;
    } else {
      same = same && s == ref_spec && o == ref_oracle;
    }
  }
  return {same && !ref_spec.empty(), std::string("reproducibility: spectrum and oracle CSV ") +
                                         (same ? "byte-identical" : "DIFFER") + " across --threads 1, 4, 8"};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {kernel_oracle, derivative_identity, suppression, spike,
                                                          assembly,      angular,             linewidth,   monte_carlo,
                                                          mixed,         reproducibility};
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c + 1, o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
