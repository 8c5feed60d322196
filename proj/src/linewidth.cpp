#include "nrad/linewidth.hpp"

#include <cmath>
#include <numbers>

#include "nrad/error.hpp"
#include "nrad/quadrature.hpp"

namespace nrad {

void OscillatorState::validate() const {
  for (int q : quanta)
    if (q < 0) throw Error(ErrorCode::InvalidArgument, "oscillator quanta must be non-negative");
  if (!(omega0 > 0.0) || !(mass > 0.0))
    throw Error(ErrorCode::InvalidArgument, "oscillator frequency and mass must be positive");
}

double beta_constant(double charge, const PhysicalConstants& constants) {
  if (!(constants.eps0 > 0.0) || !(constants.c > 0.0))
    throw Error(ErrorCode::InvalidArgument, "constants must be positive");
  return charge * charge / (6.0 * std::numbers::pi * constants.eps0 * std::pow(constants.c, 3));
}

double oscillator_decay_rate(const OscillatorState& state, const PhysicalConstants& constants) {
  state.validate();
  return beta_constant(state.charge, constants) * state.omega0 * state.omega0 / (2.0 * state.mass);
}

double ho_energy_shift(const OscillatorState& state, const PhysicalConstants& constants) {
  const double lambda = oscillator_decay_rate(state, constants);
  const int total = state.quanta[0] + state.quanta[1] + state.quanta[2];
  return -constants.hbar * lambda * total;
}

double generic_linewidth(const SystemSpec& spec, std::size_t i) {
  spec.validate();
  if (i >= spec.dim()) throw Error(ErrorCode::IndexOutOfRange, "level index out of range");
  if (spec.dipole.empty()) throw Error(ErrorCode::MissingDipoleData, "linewidth needs dipole data");
  const auto& c = spec.constants;
  const double pref = 1.0 / (6.0 * std::numbers::pi * c.eps0 * std::pow(c.c, 3) * c.hbar);
  std::vector<double> parts;
  for (std::size_t n = 0; n < spec.dim(); ++n) {
    if (!(spec.levels[n].energy < spec.levels[i].energy)) continue;
    const double d_in = bohr_frequency(spec, i, n);
    for (int j = 0; j < 3; ++j) {
      cplx amp{};
      bool any = false;
      for (const auto& d : spec.dipole) {
        if (d.direction != j) continue;
        const auto& part = spec.particles.at(d.particle);
        amp += part.charge / part.mass * d.p(n, i);
        any = true;
      }
      if (any) parts.push_back(d_in * std::norm(amp));
    }
  }
  return pref * pairwise_sum(parts);
}

std::vector<double> generic_linewidths(const SystemSpec& spec) {
  std::vector<double> out(spec.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = generic_linewidth(spec, i);
  return out;
}

SystemSpec with_radiative_widths(SystemSpec spec) {
  spec.widths = generic_linewidths(spec);
  return spec;
}

}  // namespace nrad
