#include "nrad/mc_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "nrad/error.hpp"
#include "nrad/exp_divided.hpp"
#include "nrad/quadrature.hpp"

namespace nrad {

namespace {

constexpr cplx I1{0.0, 1.0};

// The FFTW planner is not thread-safe; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

AmplitudeEstimate summarize(const std::vector<double>& x) {
  AmplitudeEstimate e;
  e.n_samples = x.size();
  if (x.empty()) return e;
  const double n = static_cast<double>(x.size());
  e.mean = pairwise_sum(x) / n;
  if (x.size() > 1) {
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - e.mean) * (x[i] - e.mean);
    e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

void check_resolution(const NoiseModel& model, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const double tc = model.correlation_time();
  if (std::isfinite(tc) && dt > tc / 20.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument,
                "dt=" + std::to_string(dt) + " does not resolve the correlation time " + std::to_string(tc));
}

// One term of the amplitude: a coefficient times a nested time integral
// that is advanced cell by cell with exact exponential weights.
struct Path {
  bool inner_noise;
  std::size_t channel;
  cplx coeff;
  cplx u_a, u_b;      // per-cell growth of the two exponentials
  cplx e_a, e_b, s;   // E(a, dt), E(b, dt), simplex(a, b, dt)
};

Path make_path(bool inner, std::size_t channel, cplx coeff, cplx a, cplx b, double dt) {
  return {inner, channel, coeff, std::exp(a * dt), std::exp(b * dt), exp_integral(a, dt), exp_integral(b, dt),
          simplex_exp_integral(a, b, dt)};
}

// Inner-noise paths: outer factor e^{a t1} with a = i(Dfn + wk) - Gn, inner
// e^{b t2} w(t2) with b = i Dni + Gn. Outer-noise paths: w(t1) e^{a t1}
// with a = i Dfn - Gn, inner e^{b t2} with b = i(Dni + wk) + Gn.
std::vector<Path> build_paths(const SystemSpec& spec, double k, std::size_t f, std::size_t dir_index, bool damped,
                              double dt, bool want_inner, bool want_outer) {
  spec.validate();
  if (f >= spec.dim()) throw Error(ErrorCode::IndexOutOfRange, "final state index out of range");
  const auto dirs = spec.directions();
  if (dir_index >= dirs.size()) throw Error(ErrorCode::IndexOutOfRange, "direction index out of range");
  const CMatrix R = radiation_matrix(spec, k, dirs[dir_index]);
  const std::size_t i = spec.initial_state;
  const double w = k * spec.constants.c;
  std::vector<Path> paths;
  for (std::size_t l = 0; l < spec.noise_couplings.size(); ++l) {
    const auto& N = spec.noise_couplings[l].op;
    for (std::size_t n = 0; n < spec.dim(); ++n) {
      const double g = damped ? spec.widths[n] : 0.0;
      const double d_fn = bohr_frequency(spec, f, n);
      const double d_ni = bohr_frequency(spec, n, i);
      const cplx x = R(f, n) * N(n, i);
      const cplx y = N(f, n) * R(n, i);
      if (want_inner && x != cplx{})
        paths.push_back(make_path(true, l, x, I1 * (d_fn + w) - g, I1 * d_ni + g, dt));
      if (want_outer && y != cplx{})
        paths.push_back(make_path(false, l, y, I1 * d_fn - g, I1 * (d_ni + w) + g, dt));
    }
  }
  return paths;
}

// Amplitude after each checkpoint (in cells, ascending).
std::vector<cplx> run_paths(const std::vector<Path>& paths, const std::vector<const double*>& w, double dt,
                            const std::vector<std::size_t>& checkpoints) {
  std::vector<cplx> out(checkpoints.size());
  if (checkpoints.empty()) return out;
  const std::size_t n_cells = checkpoints.back();
  std::vector<cplx> totals(checkpoints.size());
  for (const auto& p : paths) {
    const double* wl = w[p.channel];
    cplx acc{}, cum{};
    cplx ea{1.0, 0.0}, eb{1.0, 0.0};
    std::size_t next = 0;
    for (std::size_t c = 0; c <= n_cells; ++c) {
      while (next < checkpoints.size() && checkpoints[next] == c) totals[next++] += p.coeff * acc;
      if (c == n_cells) break;
      const double wc = wl[c];
      if (p.inner_noise) {
        // acc = \int e^{a u} G(u) du, G(u) = \int_0^u e^{b v} w(v) dv
        acc += cum * ea * p.e_a + wc * ea * eb * p.s;
        cum += wc * eb * p.e_b;
      } else {
        // acc = \int w(u) e^{a u} E(b, u) du
        acc += wc * (cum * ea * p.e_a + ea * eb * p.s);
        cum += eb * p.e_b;
      }
      ea *= p.u_a;
      eb *= p.u_b;
    }
  }
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = totals[q];
  (void)dt;
  return out;
}

std::size_t cells_for(double t, double dt) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "time must be non-negative");
  const double r = t / dt;
  const auto n = static_cast<std::size_t>(std::llround(r));
  if (std::abs(r - static_cast<double>(n)) > 1e-6)
    throw Error(ErrorCode::InvalidArgument, "time must be a whole number of cells");
  return n;
}

cplx direct_amplitude(const SystemSpec& spec, const NoiseRealization& w, double k, std::size_t f, double t,
                      const AmplitudeOptions& opt, bool inner) {
  if (w.samples.size() < spec.noise_couplings.size())
    throw Error(ErrorCode::InvalidArgument, "realization has fewer channels than the system");
  const std::size_t n = cells_for(t, w.dt);
  if (n > w.size()) throw Error(ErrorCode::TrajectoryTooShort, "trajectory shorter than t");
  const auto paths = build_paths(spec, k, f, opt.direction, opt.damped, w.dt, inner, !inner);
  std::vector<const double*> ptrs;
  for (const auto& s : w.samples) ptrs.push_back(s.data());
  return run_paths(paths, ptrs, w.dt, {n}).front();
}

struct Ensemble {
  std::vector<std::vector<Path>> paths;  // per direction index
  std::vector<int> dirs;
  Matrix3 F;
  double pref;
  double dt;
};

Ensemble prepare_ensemble(const SystemSpec& spec, double k, std::size_t f, double dt, const OracleOptions& opt) {
  Ensemble e;
  e.dirs = spec.directions();
  e.F = angular_polarization_tensor(opt.angular);
  e.pref = opt.gamma / (spec.constants.hbar * spec.constants.hbar);
  e.dt = dt;
  for (std::size_t j = 0; j < e.dirs.size(); ++j)
    e.paths.push_back(build_paths(spec, k, f, j, opt.damped, dt, true, true));
  double wmax = k * spec.constants.c;
  double dmax = 0.0;
  for (std::size_t a = 0; a < spec.dim(); ++a)
    for (std::size_t b = 0; b < spec.dim(); ++b) dmax = std::max(dmax, std::abs(bohr_frequency(spec, a, b)));
  wmax += dmax;
  if (dt > 2.0 * std::numbers::pi / wmax / 20.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "dt does not resolve the fastest Bohr frequency");
  return e;
}

// Probability after each checkpoint for one realization.
std::vector<double> realization_probability(const Ensemble& e, const NoiseSampler& sampler, std::size_t channels,
                                            std::uint64_t seed, std::uint64_t r,
                                            const std::vector<std::size_t>& checkpoints) {
  std::vector<std::vector<double>> w(channels, std::vector<double>(sampler.n_points()));
  std::vector<const double*> ptrs;
  for (std::size_t l = 0; l < channels; ++l) {
    sampler.draw(seed, r, l, w[l].data());
    ptrs.push_back(w[l].data());
  }
  std::vector<std::vector<cplx>> amp;
  for (const auto& p : e.paths) amp.push_back(run_paths(p, ptrs, e.dt, checkpoints));
  std::vector<double> out(checkpoints.size(), 0.0);
  for (std::size_t q = 0; q < checkpoints.size(); ++q) {
    double acc = 0.0;
    for (std::size_t j = 0; j < amp.size(); ++j)
      for (std::size_t jp = 0; jp < amp.size(); ++jp) {
        const double fw = e.F[e.dirs[j]][e.dirs[jp]];
        if (fw != 0.0) acc += fw * (amp[j][q] * std::conj(amp[jp][q])).real();
      }
    out[q] = e.pref * acc;
  }
  return out;
}

template <class F>
void for_each_realization(std::size_t n, bool parallel, F&& body) {
  const long count = static_cast<long>(n);
  std::vector<std::string> errors(n);
  std::vector<int> codes(n, -1);
  auto guarded = [&](long r) {
    try {
      body(static_cast<std::size_t>(r));
    } catch (const Error& ex) {
      errors[r] = ex.what();
      codes[r] = static_cast<int>(ex.code());
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long r = 0; r < count; ++r) guarded(r);
  } else {
    for (long r = 0; r < count; ++r) guarded(r);
  }
  for (std::size_t r = 0; r < n; ++r)
    if (codes[r] >= 0) throw Error(static_cast<ErrorCode>(codes[r]), errors[r]);
}

}  // namespace

NoiseSampler::NoiseSampler(const NoiseModel& model, std::size_t n_points, double dt) : n_(n_points), dt_(dt) {
  if (n_points == 0) throw Error(ErrorCode::InvalidArgument, "sampler needs at least one point");
  check_resolution(model, dt);
  std::size_t L = 2 * next_pow2(std::max<std::size_t>(n_points, 2));
  std::vector<double> eig;
  for (int attempt = 0;; ++attempt) {
    for (std::size_t j = 0; j <= L / 2; ++j) {
      const double om = 2.0 * std::numbers::pi * static_cast<double>(j) / (static_cast<double>(L) * dt);
      if (model.spectral_density(om) < -1e-9)
        throw Error(ErrorCode::InadmissibleNoise,
                    "spectral density is negative at omega=" + std::to_string(om));
    }
    FftwBuffer in(L), out(L);
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t lag = std::min(j, L - j);
      double c = model.smooth_correlation(static_cast<double>(lag) * dt);
      if (lag == 0) c += model.white_weight() / dt;
      in.data[j][0] = c;
      in.data[j][1] = 0.0;
    }
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_plan p = fftw_plan_dft_1d(static_cast<int>(L), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE);
      fftw_execute(p);
      fftw_destroy_plan(p);
    }
    eig.assign(L, 0.0);
    double pos = 0.0, neg = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      eig[j] = out.data[j][0];
      (eig[j] < 0.0 ? neg : pos) += std::abs(eig[j]);
    }
    if (neg <= 1e-10 * pos || attempt >= 3) break;
    L *= 2;
  }
  sqrt_eig_.resize(L);
  for (std::size_t j = 0; j < L; ++j) sqrt_eig_[j] = std::sqrt(std::max(eig[j], 0.0) / static_cast<double>(L));
  FftwBuffer a(L), b(L);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(L), a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

NoiseSampler::~NoiseSampler() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void NoiseSampler::draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t channel, double* out) const {
  const std::size_t L = sqrt_eig_.size();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(channel)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  FftwBuffer in(L), res(L);
  for (std::size_t j = 0; j < L; ++j) {
    in.data[j][0] = sqrt_eig_[j] * normal(rng);
    in.data[j][1] = sqrt_eig_[j] * normal(rng);
  }
  fftw_execute_dft(static_cast<fftw_plan>(plan_), in.data, res.data);
  for (std::size_t k = 0; k < n_; ++k) out[k] = res.data[k][0];
}

NoiseRealization sample_noise(const NoiseModel& model, double t_total, double dt, std::uint64_t seed,
                              std::size_t channels) {
  if (!(t_total > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_total must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(t_total / dt - 1e-9));
  NoiseSampler sampler(model, n, dt);
  NoiseRealization r;
  r.dt = dt;
  r.seed = seed;
  r.target = model;
  r.samples.assign(channels, std::vector<double>(n));
  for (std::size_t l = 0; l < channels; ++l) sampler.draw(seed, 0, l, r.samples[l].data());
  return r;
}

cplx amplitude_A1_direct(const SystemSpec& spec, const NoiseRealization& w, double k, std::size_t f, double t,
                         const AmplitudeOptions& opt) {
  return direct_amplitude(spec, w, k, f, t, opt, true);
}

cplx amplitude_A2_direct(const SystemSpec& spec, const NoiseRealization& w, double k, std::size_t f, double t,
                         const AmplitudeOptions& opt) {
  return direct_amplitude(spec, w, k, f, t, opt, false);
}

AmplitudeEstimate estimate_Pfi(const SystemSpec& spec, const NoiseModel& model, double k, std::size_t f, double t,
                               std::size_t n_samples, std::uint64_t seed, const OracleOptions& opt) {
  if (n_samples < 100) throw Error(ErrorCode::InvalidArgument, "estimate_Pfi needs at least 100 samples");
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil(t / opt.dt - 1e-9));
  const double dt = t / static_cast<double>(cells);
  const Ensemble e = prepare_ensemble(spec, k, f, dt, opt);
  const NoiseSampler sampler(model, cells, dt);
  const std::size_t channels = spec.noise_couplings.size();
  std::vector<double> p(n_samples);
  for_each_realization(n_samples, opt.parallel, [&](std::size_t r) {
    p[r] = realization_probability(e, sampler, channels, seed, r, {cells}).front();
  });
  return summarize(p);
}

AmplitudeEstimate estimate_rate(const SystemSpec& spec, const NoiseModel& model, double k, std::size_t f, double t,
                                double window, std::size_t n_samples, std::uint64_t seed,
                                const OracleOptions& opt) {
  if (n_samples < 100) throw Error(ErrorCode::InvalidArgument, "estimate_rate needs at least 100 samples");
  if (!(t > 0.0) || !(window > 0.0)) throw Error(ErrorCode::InvalidArgument, "t and window must be positive");
  const auto cells = static_cast<std::size_t>(std::ceil(t / opt.dt - 1e-9));
  const double dt = t / static_cast<double>(cells);
  const auto wcells = static_cast<std::size_t>(std::max(1.0, std::round(window / dt)));
  const double w_eff = static_cast<double>(wcells) * dt;
  const Ensemble e = prepare_ensemble(spec, k, f, dt, opt);
  const NoiseSampler sampler(model, cells + wcells, dt);
  const std::size_t channels = spec.noise_couplings.size();
  std::vector<double> rate(n_samples);
  for_each_realization(n_samples, opt.parallel, [&](std::size_t r) {
    const auto p = realization_probability(e, sampler, channels, seed, r, {cells, cells + wcells});
    rate[r] = k * k * (p[1] - p[0]) / w_eff;
  });
  return summarize(rate);
}

std::pair<AmplitudeEstimate, AmplitudeEstimate> estimate_mean_A1(const SystemSpec& spec, const NoiseModel& model,
                                                                 double k, std::size_t f, double t,
                                                                 std::size_t n_samples, std::uint64_t seed,
                                                                 const OracleOptions& opt) {
  const auto cells = static_cast<std::size_t>(std::ceil(t / opt.dt - 1e-9));
  const double dt = t / static_cast<double>(cells);
  const auto paths = build_paths(spec, k, f, 0, opt.damped, dt, true, false);
  const NoiseSampler sampler(model, cells, dt);
  const std::size_t channels = spec.noise_couplings.size();
  std::vector<double> re(n_samples), im(n_samples);
  for_each_realization(n_samples, opt.parallel, [&](std::size_t r) {
    std::vector<std::vector<double>> w(channels, std::vector<double>(cells));
    std::vector<const double*> ptrs;
    for (std::size_t l = 0; l < channels; ++l) {
      sampler.draw(seed, r, l, w[l].data());
      ptrs.push_back(w[l].data());
    }
    const cplx a = run_paths(paths, ptrs, dt, {cells}).front();
    re[r] = a.real();
    im[r] = a.imag();
  });
  return {summarize(re), summarize(im)};
}

std::vector<LagEstimate> empirical_autocovariance(const NoiseModel& model, double dt, std::size_t n_points,
                                                  std::size_t n_lags, std::size_t n_realizations,
                                                  std::uint64_t seed) {
  if (n_lags == 0 || n_lags >= n_points) throw Error(ErrorCode::InvalidArgument, "need 0 < n_lags < n_points");
  const NoiseSampler sampler(model, n_points, dt);
  std::vector<std::vector<double>> est(n_lags, std::vector<double>(n_realizations));
  for_each_realization(n_realizations, true, [&](std::size_t r) {
    std::vector<double> w(n_points);
    sampler.draw(seed, r, 0, w.data());
    for (std::size_t j = 0; j < n_lags; ++j) {
      std::vector<double> prod(n_points - j);
      for (std::size_t q = 0; q + j < n_points; ++q) prod[q] = w[q] * w[q + j];
      est[j][r] = pairwise_sum(prod) / static_cast<double>(n_points - j);
    }
  });
  std::vector<LagEstimate> out;
  for (std::size_t j = 0; j < n_lags; ++j) {
    const auto s = summarize(est[j]);
    const double lag = static_cast<double>(j) * dt;
    double target = model.smooth_correlation(lag);
    if (j == 0) target += model.white_weight() / dt;
    out.push_back({lag, s.mean, s.std_error, target});
  }
  return out;
}

std::vector<LagEstimate> empirical_spectral_density(const NoiseModel& model, double dt, std::size_t n_points,
                                                    const std::vector<double>& omegas,
                                                    std::size_t n_realizations, std::uint64_t seed) {
  const NoiseSampler sampler(model, n_points, dt);
  std::vector<std::vector<double>> est(omegas.size(), std::vector<double>(n_realizations));
  for_each_realization(n_realizations, true, [&](std::size_t r) {
    std::vector<double> w(n_points);
    sampler.draw(seed, r, 0, w.data());
    for (std::size_t q = 0; q < omegas.size(); ++q) {
      const cplx step = std::exp(I1 * omegas[q] * dt);
      cplx ph{1.0, 0.0};
      cplx acc{};
      for (std::size_t k = 0; k < n_points; ++k) {
        acc += w[k] * ph;
        ph *= step;
      }
      est[q][r] = dt / static_cast<double>(n_points) * std::norm(acc);
    }
  });
  std::vector<LagEstimate> out;
  for (std::size_t q = 0; q < omegas.size(); ++q) {
    const auto s = summarize(est[q]);
    out.push_back({omegas[q], s.mean, s.std_error, model.spectral_density(omegas[q])});
  }
  return out;
}

OracleComparison compare(double analytic, const AmplitudeEstimate& mc) {
  OracleComparison c;
  c.analytic = analytic;
  c.mc_mean = mc.mean;
  c.std_error = mc.std_error;
  c.z = mc.std_error > 0.0 ? (mc.mean - analytic) / mc.std_error : 0.0;
  return c;
}

}  // namespace nrad
