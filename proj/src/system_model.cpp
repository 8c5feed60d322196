#include "nrad/system_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "nrad/error.hpp"

namespace nrad {

bool CMatrix::is_hermitian(double rel_tol) const {
  const double scale = std::max(max_abs(), 1e-300);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = r; c < n_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > rel_tol * scale) return false;
  return true;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

void SystemSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); };
  const std::size_t n = dim();
  if (n == 0) fail("levels: system has no levels");
  for (std::size_t i = 1; i < n; ++i)
    if (levels[i].energy < levels[i - 1].energy) fail("levels: energies must be sorted ascending");
  if (widths.size() != n) fail("widths: expected one width per level");
  for (double w : widths)
    if (!(w >= 0.0) || !std::isfinite(w)) fail("widths: must be finite and non-negative");
  if (initial_state >= n) fail("initial: state index out of range");
  if (!edge.empty() && edge.size() != n) fail("edge: flag count differs from level count");
  for (std::size_t l = 0; l < noise_couplings.size(); ++l) {
    const auto& ch = noise_couplings[l];
    if (ch.op.size() != n) fail("noise_coupling " + std::to_string(l) + ": wrong dimension");
    if (!ch.op.is_hermitian(1e-12)) fail("noise_coupling " + std::to_string(l) + ": not Hermitian");
  }
  for (const auto& d : dipole) {
    if (d.direction < 0 || d.direction > 2) fail("dipole: direction must be 0, 1 or 2");
    if (d.p.size() != n) fail("dipole: wrong dimension");
    if (d.particle >= particles.size()) fail("dipole: particle index has no [particles] entry");
    if (!d.p.is_hermitian(1e-12)) fail("dipole: momentum matrix not Hermitian");
  }
  for (const auto& r : radiation) {
    if (r.direction < 0 || r.direction > 2) fail("radiation: direction must be 0, 1 or 2");
    if (r.m.size() != n) fail("radiation: wrong dimension");
  }
  for (const auto& p : particles)
    if (!(p.mass > 0.0)) fail("particles: masses must be positive");
  if (!(constants.hbar > 0.0 && constants.c > 0.0 && constants.eps0 > 0.0))
    fail("constants: hbar, c and eps0 must be positive");
}

std::vector<int> SystemSpec::directions() const {
  std::set<int> dirs;
  for (const auto& d : dipole) dirs.insert(d.direction);
  for (const auto& r : radiation) dirs.insert(r.direction);
  return {dirs.begin(), dirs.end()};
}

std::optional<std::size_t> SystemSpec::find_level(const std::string& label) const {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (levels[i].label == label) return i;
  return std::nullopt;
}

CouplingConstants CouplingConstants::qmupl(double lambda) {
  CouplingConstants c;
  c.gamma = lambda;
  return c;
}

void CouplingConstants::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvariantViolation, "coupling: gamma must be positive");
  if (csl && !(csl->lambda > 0.0 && csl->r_c > 0.0 && csl->m0 > 0.0))
    throw Error(ErrorCode::InvariantViolation, "coupling: CSL parameters must be positive");
}

double bohr_frequency(const SystemSpec& spec, std::size_t a, std::size_t b) {
  if (a >= spec.dim() || b >= spec.dim())
    throw Error(ErrorCode::IndexOutOfRange, "level index out of range");
  return (spec.levels[a].energy - spec.levels[b].energy) / spec.constants.hbar;
}

double alpha_k(const PhysicalConstants& constants, double k) {
  const double omega = k * constants.c;
  const double two_pi_cubed = 8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return std::sqrt(constants.hbar / (2.0 * constants.eps0 * omega * two_pi_cubed));
}

CMatrix reduced_radiation_matrix(const SystemSpec& spec, int direction) {
  const std::size_t n = spec.dim();
  CMatrix out(n);
  bool found = false;
  for (const auto& r : spec.radiation) {
    if (r.direction != direction) continue;
    found = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) out(a, b) += r.m(a, b);
  }
  if (found) return out;
  for (const auto& d : spec.dipole) {
    if (d.direction != direction) continue;
    found = true;
    const auto& part = spec.particles.at(d.particle);
    const double q_over_m = -part.charge / part.mass;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) out(a, b) += q_over_m * d.p(a, b);
  }
  if (!found)
    throw Error(ErrorCode::MissingDipoleData,
                "no dipole or radiation data along axis " + std::to_string(direction));
  return out;
}

CMatrix radiation_matrix(const SystemSpec& spec, double k, int direction) {
  CMatrix m = reduced_radiation_matrix(spec, direction);
  const double a = alpha_k(spec.constants, k);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) m(r, c) *= a;
  return m;
}

cplx radiation_element(const SystemSpec& spec, double k, std::size_t f, std::size_t n,
                       int direction) {
  if (f >= spec.dim() || n >= spec.dim())
    throw Error(ErrorCode::IndexOutOfRange, "level index out of range");
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "wavenumber must be positive");
  return radiation_matrix(spec, k, direction)(f, n);
}

SystemSpec builtin_harmonic_oscillator(double omega0, double mass, double charge,
                                       std::size_t n_levels, const PhysicalConstants& constants) {
  if (n_levels < 2) throw Error(ErrorCode::TooFewLevels, "oscillator needs at least 2 levels");
  if (!(omega0 > 0.0 && mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "oscillator frequency and mass must be positive");
  const double hbar = constants.hbar;
  SystemSpec s;
  s.constants = constants;
  s.particles = {{charge, mass}};
  s.widths.assign(n_levels, 0.0);
  s.edge.assign(n_levels, false);
  s.edge.back() = true;
  CMatrix q(n_levels), p(n_levels);
  const double q0 = std::sqrt(hbar / (2.0 * mass * omega0));
  const double p0 = std::sqrt(mass * omega0 * hbar / 2.0);
  for (std::size_t n = 0; n < n_levels; ++n) {
    s.levels.push_back({std::to_string(n), hbar * omega0 * (static_cast<double>(n) + 0.5)});
    if (n + 1 < n_levels) {
      const double r = std::sqrt(static_cast<double>(n + 1));
      // q = q0 (b + b^dag), p = i p0 (b^dag - b)
      q(n + 1, n) = q0 * r;
      q(n, n + 1) = q0 * r;
      p(n + 1, n) = cplx(0.0, p0 * r);
      p(n, n + 1) = cplx(0.0, -p0 * r);
    }
  }
  s.noise_couplings.push_back({q, "position"});
  s.dipole.push_back({0, 0, p});
  s.validate();
  return s;
}

SystemSpec builtin_harmonic_oscillator_3d(double omega0, double mass, double charge,
                                          std::size_t n_per_axis,
                                          const PhysicalConstants& constants) {
  if (n_per_axis < 2) throw Error(ErrorCode::TooFewLevels, "oscillator needs at least 2 levels per axis");
  if (!(omega0 > 0.0 && mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "oscillator frequency and mass must be positive");
  const double hbar = constants.hbar;
  struct State {
    std::array<std::size_t, 3> q;
    std::size_t total;
  };
  std::vector<State> states;
  for (std::size_t a = 0; a < n_per_axis; ++a)
    for (std::size_t b = 0; b < n_per_axis; ++b)
      for (std::size_t c = 0; c < n_per_axis; ++c) states.push_back({{a, b, c}, a + b + c});
  std::stable_sort(states.begin(), states.end(),
                   [](const State& x, const State& y) { return x.total < y.total; });
  const std::size_t n = states.size();
  SystemSpec s;
  s.constants = constants;
  s.particles = {{charge, mass}};
  s.widths.assign(n, 0.0);
  s.edge.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = states[i];
    s.levels.push_back({std::to_string(st.q[0]) + "," + std::to_string(st.q[1]) + "," +
                            std::to_string(st.q[2]),
                        hbar * omega0 * (static_cast<double>(st.total) + 1.5)});
    s.edge[i] = std::any_of(st.q.begin(), st.q.end(), [&](std::size_t v) { return v + 1 == n_per_axis; });
  }
  const double q0 = std::sqrt(hbar / (2.0 * mass * omega0));
  const double p0 = std::sqrt(mass * omega0 * hbar / 2.0);
  for (int axis = 0; axis < 3; ++axis) {
    CMatrix q(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto& lo = states[j].q;
        const auto& hi = states[i].q;
        bool others_equal = true;
        for (int o = 0; o < 3; ++o)
          if (o != axis && lo[o] != hi[o]) others_equal = false;
        if (!others_equal || hi[axis] != lo[axis] + 1) continue;
        const double r = std::sqrt(static_cast<double>(hi[axis]));
        q(i, j) = q0 * r;
        q(j, i) = q0 * r;
        p(i, j) = cplx(0.0, p0 * r);
        p(j, i) = cplx(0.0, -p0 * r);
      }
    }
    s.noise_couplings.push_back({q, "position"});
    s.dipole.push_back({axis, 0, p});
  }
  s.validate();
  return s;
}

SystemSpec builtin_two_level(double gap, double noise_element, double momentum_element, double width,
                             const PhysicalConstants& constants) {
  if (!(width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "width must be non-negative");
  SystemSpec s;
  s.constants = constants;
  s.particles = {{1.0, 1.0}};
  s.levels = {{"0", 0.0}, {"1", constants.hbar * gap}};
  s.widths = {0.0, width};
  CMatrix N(2), p(2);
  N(1, 0) = noise_element;
  N(0, 1) = noise_element;
  p(1, 0) = cplx(0.0, momentum_element);
  p(0, 1) = cplx(0.0, -momentum_element);
  s.noise_couplings.push_back({N, "position"});
  s.dipole.push_back({0, 0, p});
  s.validate();
  return s;
}

}  // namespace nrad
