#pragma once

#include <array>
#include <vector>

#include "nrad/system_model.hpp"

namespace nrad {

struct OscillatorState {
  std::array<int, 3> quanta{0, 0, 0};
  double omega0 = 1.0;
  double mass = 1.0;
  double charge = 1.0;

  void validate() const;
};

/// beta = e^2 / (6 pi eps0 c^3).
double beta_constant(double charge, const PhysicalConstants& constants);

/// Lambda = beta w0^2 / (2 m).
double oscillator_decay_rate(const OscillatorState& state, const PhysicalConstants& constants);

/// Imaginary part of the radiative energy shift, -hbar Lambda (i1 + i2 + i3).
double ho_energy_shift(const OscillatorState& state, const PhysicalConstants& constants);

/// Gamma_i = -Im(dE_i) / hbar from the dipole matrix elements, summing
/// over all lower levels.
double generic_linewidth(const SystemSpec& spec, std::size_t i);
std::vector<double> generic_linewidths(const SystemSpec& spec);

/// Copy of `spec` with every width replaced by its radiative value.
SystemSpec with_radiative_widths(SystemSpec spec);

}  // namespace nrad
