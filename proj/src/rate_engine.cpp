#include "nrad/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "nrad/error.hpp"
#include "nrad/quadrature.hpp"

namespace nrad {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr double kEdgeShare = 0.01;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Per-k view of the system: frequencies, radiation and noise matrices.
struct Blocks {
  const SystemSpec* spec;
  std::size_t n;
  std::size_t i;
  double omega;
  std::vector<int> dirs;
  std::vector<CMatrix> R;
  std::vector<const CMatrix*> N;

  double delta(std::size_t a, std::size_t b) const { return bohr_frequency(*spec, a, b); }
  double width(std::size_t a) const { return spec->widths[a]; }
};

Blocks prepare(const SystemSpec& spec, double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorCode::InvalidArgument, "wavenumber must be positive and finite");
  Blocks b{&spec, spec.dim(), spec.initial_state, k * spec.constants.c, spec.directions(), {}, {}};
  if (b.dirs.empty()) throw Error(ErrorCode::MissingDipoleData, "no radiation coupling along any axis");
  for (int d : b.dirs) b.R.push_back(radiation_matrix(spec, k, d));
  for (const auto& ch : spec.noise_couplings) b.N.push_back(&ch.op);
  return b;
}

double ground_energy(const SystemSpec& spec) {
  double e = spec.levels.front().energy;
  for (const auto& l : spec.levels) e = std::min(e, l.energy);
  return e;
}

// A zero width is allowed for the initial state and for ground levels,
// which cannot decay.
void require_width(const Blocks& b, std::size_t n) {
  if (n == b.i || b.width(n) > 0.0) return;
  if (b.spec->levels[n].energy <= ground_energy(*b.spec)) return;
  throw Error(ErrorCode::ZeroWidth, "intermediate level " + std::to_string(n) + " (" +
                                        b.spec->levels[n].label + ") has zero width");
}

void check_final(const SystemSpec& spec, std::size_t f) {
  if (f >= spec.dim()) throw Error(ErrorCode::IndexOutOfRange, "final state index out of range");
}

enum class Kernel { T1, T2, T3 };

// sum_{l,j,n,m} x_n conj(y_m) dT(n, m) with x, y chosen by the kernel type.
cplx assemble(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f, Kernel kind,
              RateMode mode, const NaiveWindow& naive) {
  spec.validate();
  check_final(spec, f);
  const Blocks b = prepare(spec, k);
  const std::size_t n = b.n;
  const std::size_t i = b.i;
  // Coefficients R_fn N_ni (inner-noise) and N_fn R_ni (outer-noise).
  auto inner = [&](std::size_t l, std::size_t j, std::size_t m) { return b.R[j](f, m) * (*b.N[l])(m, i); };
  auto outer = [&](std::size_t l, std::size_t j, std::size_t m) { return (*b.N[l])(f, m) * b.R[j](m, i); };
  const bool left_inner = kind != Kernel::T3;
  const bool right_inner = kind == Kernel::T1;

  std::vector<cplx> dT(n * n);
  std::vector<bool> have(n * n, false);
  auto kernel = [&](std::size_t a, std::size_t c) {
    const std::size_t idx = a * n + c;
    if (!have[idx]) {
      if (mode == RateMode::Regularized) {
        require_width(b, a);
        require_width(b, c);
      }
      KernelParams p;
      p.delta_fn = b.delta(f, a);
      p.delta_ni = b.delta(a, i);
      p.delta_fm = b.delta(f, c);
      p.delta_mi = b.delta(c, i);
      p.delta_fi = b.delta(f, i);
      p.delta_nm = b.delta(a, c);
      p.omega_k = b.omega;
      p.gamma_n = b.width(a);
      p.gamma_m = b.width(c);
      switch (kind) {
        case Kernel::T1: dT[idx] = dT1_dt_asymptotic(p, noise, mode, naive); break;
        case Kernel::T2: dT[idx] = dT2_dt_asymptotic(p, noise, mode, naive); break;
        case Kernel::T3: dT[idx] = dT3_dt_asymptotic(p, noise, mode, naive); break;
      }
      have[idx] = true;
    }
    return dT[idx];
  };

  std::vector<cplx> parts;
  for (std::size_t l = 0; l < b.N.size(); ++l)
    for (std::size_t j = 0; j < b.R.size(); ++j)
      for (std::size_t a = 0; a < n; ++a) {
        const cplx x = left_inner ? inner(l, j, a) : outer(l, j, a);
        if (x == cplx{}) continue;
        for (std::size_t c = 0; c < n; ++c) {
          const cplx y = right_inner ? inner(l, j, c) : outer(l, j, c);
          if (y == cplx{}) continue;
          parts.push_back(x * std::conj(y) * kernel(a, c));
        }
      }
  return pairwise_sum(parts);
}

// Regularized amplitude sum_n [R_fn N_ni / a_n - N_fn R_ni / b_n] for
// channel l and axis index j, plus the share carried by edge levels.
struct Amplitude {
  cplx total{};
  cplx edge{};
};

Amplitude regularized_amplitude(const Blocks& b, std::size_t f, std::size_t l, std::size_t j) {
  const auto& N = *b.N[l];
  const auto& R = b.R[j];
  std::vector<cplx> parts;
  std::vector<cplx> edge_parts;
  for (std::size_t n = 0; n < b.n; ++n) {
    const cplx x = R(f, n) * N(n, b.i);
    const cplx y = N(f, n) * R(n, b.i);
    if (x == cplx{} && y == cplx{}) continue;
    require_width(b, n);
    const double g = b.width(n);
    cplx term{};
    if (x != cplx{}) term += x / (I1 * (b.delta(f, n) + b.omega) - g);
    if (y != cplx{}) term -= y / (I1 * (b.delta(n, b.i) + b.omega) + g);
    parts.push_back(term);
    if (!b.spec->edge.empty() && b.spec->edge[n]) edge_parts.push_back(term);
  }
  return {pairwise_sum(parts), pairwise_sum(edge_parts)};
}

std::vector<std::size_t> final_set(const RateRequest& req) {
  if (!req.final_states.empty()) return req.final_states;
  std::vector<std::size_t> all(req.spec.dim());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = f;
  return all;
}

// Weight h_j(s) = sum_n [R_fn N_ni H1_n + N_fn R_ni H2_n] at zero width.
ExpSum naive_weight(const Blocks& b, std::size_t f, std::size_t l, std::size_t j, double t) {
  const auto& N = *b.N[l];
  const auto& R = b.R[j];
  ExpSum h;
  for (std::size_t n = 0; n < b.n; ++n) {
    const cplx x = R(f, n) * N(n, b.i);
    const cplx y = N(f, n) * R(n, b.i);
    if (x != cplx{}) h += weight_inner_noise(b.delta(f, n) + b.omega, b.delta(n, b.i), 0.0, t).scaled(x);
    if (y != cplx{}) h += weight_outer_noise(b.delta(f, n), b.delta(n, b.i) + b.omega, 0.0).scaled(y);
  }
  return h;
}

void add_warning(std::vector<std::string>* out, const std::string& w) {
  if (out && std::find(out->begin(), out->end(), w) == out->end()) out->push_back(w);
}

// Longest correlation time among non-white terms, 0 for white noise.
double longest_correlation(const NoiseModel& noise) {
  double out = 0.0;
  for (const auto& term : noise.terms()) {
    if (auto* e = std::get_if<Exponential>(&term.kind)) out = std::max(out, e->tau);
    else if (auto* g = std::get_if<GaussianCorr>(&term.kind)) out = std::max(out, g->tau);
    else if (auto* tb = std::get_if<Tabulated>(&term.kind)) out = std::max(out, tb->s.back());
  }
  return out;
}

double prefactor(const RateRequest& req) {
  const double hbar = req.spec.constants.hbar;
  return req.coupling.gamma / (hbar * hbar);
}

}  // namespace

Matrix3 angular_polarization_tensor(AngularMethod method) {
  Matrix3 out{};
  if (method == AngularMethod::DipoleIdentity) {
    for (int j = 0; j < 3; ++j) out[j][j] = 8.0 * std::numbers::pi / 3.0;
    return out;
  }
  constexpr int n_theta = 16;
  constexpr int n_phi = 32;
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  std::vector<double> acc(9 * n_theta * n_phi);
  std::size_t pos = 0;
  for (int a = 0; a < n_theta; ++a) {
    const double ct = x[a];
    const double st = std::sqrt(1.0 - ct * ct);
    for (int q = 0; q < n_phi; ++q) {
      const double phi = 2.0 * std::numbers::pi * q / n_phi;
      const double wt = w[a] * 2.0 * std::numbers::pi / n_phi;
      const std::array<double, 3> e1{ct * std::cos(phi), ct * std::sin(phi), -st};
      const std::array<double, 3> e2{-std::sin(phi), std::cos(phi), 0.0};
      for (int j = 0; j < 3; ++j)
        for (int jp = 0; jp < 3; ++jp) acc[pos++] = wt * (e1[j] * e1[jp] + e2[j] * e2[jp]);
    }
  }
  for (int j = 0; j < 3; ++j)
    for (int jp = 0; jp < 3; ++jp) {
      std::vector<double> col;
      col.reserve(n_theta * n_phi);
      for (std::size_t s = 0; s < acc.size() / 9; ++s) col.push_back(acc[s * 9 + j * 3 + jp]);
      out[j][jp] = pairwise_sum(col);
    }
  return out;
}

double angular_polarization_factor(AngularMethod method, int j, int jp) {
  if (j < 0 || j > 2 || jp < 0 || jp > 2) throw Error(ErrorCode::IndexOutOfRange, "axis must be 0, 1 or 2");
  return angular_polarization_tensor(method)[j][jp];
}

void RateRequest::validate() const {
  spec.validate();
  coupling.validate();
  if (k_grid.empty()) throw Error(ErrorCode::InvalidArgument, "k grid is empty");
  for (std::size_t q = 0; q < k_grid.size(); ++q) {
    if (!(k_grid[q] > 0.0) || !std::isfinite(k_grid[q]))
      throw Error(ErrorCode::InvalidArgument, "k grid must be strictly positive");
    if (q > 0 && !(k_grid[q] > k_grid[q - 1]))
      throw Error(ErrorCode::InvalidArgument, "k grid must be strictly ascending");
  }
  for (std::size_t f : final_states) check_final(spec, f);
  if (spec.noise_couplings.empty()) throw Error(ErrorCode::InvalidArgument, "system has no noise coupling");
  if (mode == RateMode::Naive && (!(naive.window > 0.0) || !(naive.t >= 0.0)))
    throw Error(ErrorCode::InvalidArgument, "naive mode needs t >= 0 and a positive window");
}

cplx rate_R11(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f, RateMode mode,
              const NaiveWindow& naive) {
  return assemble(spec, noise, k, f, Kernel::T1, mode, naive);
}

cplx rate_R12(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f, RateMode mode,
              const NaiveWindow& naive) {
  return assemble(spec, noise, k, f, Kernel::T2, mode, naive);
}

cplx rate_R22(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f, RateMode mode,
              const NaiveWindow& naive) {
  return assemble(spec, noise, k, f, Kernel::T3, mode, naive);
}

double naive_probability(const RateRequest& req, double k, std::size_t f, double t) {
  check_final(req.spec, f);
  const Blocks b = prepare(req.spec, k);
  const Matrix3 F = angular_polarization_tensor(req.angular);
  std::vector<double> parts;
  for (std::size_t l = 0; l < b.N.size(); ++l) {
    std::vector<ExpSum> h;
    for (std::size_t j = 0; j < b.R.size(); ++j) h.push_back(naive_weight(b, f, l, j, t));
    for (std::size_t j = 0; j < b.R.size(); ++j)
      for (std::size_t jp = 0; jp < b.R.size(); ++jp) {
        const double w = F[b.dirs[j]][b.dirs[jp]];
        if (w == 0.0 || h[j].terms.empty() || h[jp].terms.empty()) continue;
        parts.push_back(w * noise_covariance(h[j], h[jp], t, req.noise).real());
      }
  }
  return prefactor(req) * pairwise_sum(parts);
}

double emission_rate_to_final(const RateRequest& req, double k, std::size_t f,
                              std::vector<std::string>* warnings) {
  check_final(req.spec, f);
  const double jac = k * k;
  if (req.mode == RateMode::Naive) {
    const double p1 = naive_probability(req, k, f, req.naive.t + req.naive.window);
    const double p0 = naive_probability(req, k, f, req.naive.t);
    return jac * (p1 - p0) / req.naive.window;
  }
  const Blocks b = prepare(req.spec, k);
  const Matrix3 F = angular_polarization_tensor(req.angular);
  const double ft = req.noise.spectral_density(b.delta(f, b.i) + b.omega);
  std::vector<double> parts;
  for (std::size_t l = 0; l < b.N.size(); ++l) {
    std::vector<Amplitude> amp;
    for (std::size_t j = 0; j < b.R.size(); ++j) {
      amp.push_back(regularized_amplitude(b, f, l, j));
      const auto& a = amp.back();
      if (std::abs(a.edge) > kEdgeShare * std::abs(a.total) && a.edge != cplx{})
        add_warning(warnings, "edge levels carry more than 1% of the amplitude to final state " +
                                  std::to_string(f));
    }
    for (std::size_t j = 0; j < b.R.size(); ++j)
      for (std::size_t jp = 0; jp < b.R.size(); ++jp) {
        const double w = F[b.dirs[j]][b.dirs[jp]];
        if (w == 0.0) continue;
        parts.push_back(w * (amp[j].total * std::conj(amp[jp].total)).real());
      }
  }
  return jac * prefactor(req) * ft * pairwise_sum(parts);
}

double emission_rate_at_k(const RateRequest& req, double k, std::vector<std::string>* warnings) {
  if (req.spec.levels[req.spec.initial_state].energy > ground_energy(req.spec))
    add_warning(warnings, "NonGroundInitial: initial state is not the lowest level");
  if (req.mode == RateMode::Naive && req.naive.t < 10.0 * longest_correlation(req.noise))
    add_warning(warnings, "naive window starts before 10 noise correlation times; the windowed derivative is "
                          "not yet a rate");
  std::vector<double> parts;
  for (std::size_t f : final_set(req)) parts.push_back(emission_rate_to_final(req, k, f, warnings));
  return pairwise_sum(parts);
}

namespace {

EmissionSpectrum run_spectrum(const RateRequest& req, bool parallel) {
  req.validate();
  const std::size_t n = req.k_grid.size();
  std::vector<double> values(n, 0.0);
  std::vector<std::vector<std::string>> warn(n);
  std::vector<std::string> errors(n);
  std::vector<int> codes(n, -1);
  const auto body = [&](std::size_t q) {
    try {
      values[q] = emission_rate_at_k(req, req.k_grid[q], &warn[q]);
    } catch (const Error& e) {
      errors[q] = e.what();
      codes[q] = static_cast<int>(e.code());
    } catch (const std::exception& e) {
      errors[q] = e.what();
      codes[q] = static_cast<int>(ErrorCode::InvariantViolation);
    }
  };
  const long count = static_cast<long>(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long q = 0; q < count; ++q) body(static_cast<std::size_t>(q));
  } else {
    for (long q = 0; q < count; ++q) body(static_cast<std::size_t>(q));
  }

  std::ostringstream err;
  int first = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (codes[q] < 0) continue;
    if (first < 0) first = codes[q];
    err << "\n  k[" << q << "]=" << req.k_grid[q] << ": " << errors[q];
  }
  if (first >= 0)
    throw Error(static_cast<ErrorCode>(first), "spectrum failed at some wavenumbers:" + err.str());

  EmissionSpectrum out;
  out.mode = req.mode;
  out.units = unit_label(req.spec.constants);
  for (std::size_t q = 0; q < n; ++q) {
    out.points.push_back({req.k_grid[q], values[q]});
    for (const auto& w : warn[q]) add_warning(&out.warnings, w);
  }
  return out;
}

}  // namespace

EmissionSpectrum spectrum(const RateRequest& req) { return run_spectrum(req, true); }

EmissionSpectrum spectrum_serial(const RateRequest& req) { return run_spectrum(req, false); }

std::string unit_label(const PhysicalConstants& c) {
  if (c == PhysicalConstants::reduced()) return "reduced";
  if (c == PhysicalConstants::si()) return "SI";
  std::ostringstream out;
  out.precision(10);
  out << "custom(hbar=" << c.hbar << ";c=" << c.c << ";eps0=" << c.eps0 << ")";
  return out.str();
}

const char* to_string(RateMode mode) {
  return mode == RateMode::Regularized ? "regularized" : "naive";
}

}  // namespace nrad
