#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "nrad/error.hpp"
#include "nrad/linewidth.hpp"

namespace {

std::array<int, 3> quanta_of(const std::string& label) {
  std::array<int, 3> q{};
  std::sscanf(label.c_str(), "%d,%d,%d", &q[0], &q[1], &q[2]);
  return q;
}

}  // namespace

TEST_CASE("beta constant in reduced and SI units") {
  CHECK(nrad::beta_constant(1.0, nrad::PhysicalConstants::reduced()) == doctest::Approx(1.0 / (6.0 * std::numbers::pi)));
  const auto si = nrad::PhysicalConstants::si();
  const double e = 1.602176634e-19;
  CHECK(nrad::beta_constant(e, si) ==
        doctest::Approx(e * e / (6.0 * std::numbers::pi * si.eps0 * std::pow(si.c, 3))).epsilon(1e-14));
}

TEST_CASE("oscillator energy shift and decay rate closed forms") {
  nrad::OscillatorState s;
  s.quanta = {1, 0, 0};
  s.charge = std::sqrt(6.0 * std::numbers::pi);  // beta = 1
  CHECK(nrad::ho_energy_shift(s, nrad::PhysicalConstants::reduced()) == doctest::Approx(-0.5));
  s.quanta = {2, 1, 3};
  s.omega0 = 1.7;
  s.mass = 0.4;
  const double lambda = 1.7 * 1.7 / (2.0 * 0.4);
  CHECK(nrad::oscillator_decay_rate(s, nrad::PhysicalConstants::reduced()) == doctest::Approx(lambda));
  CHECK(nrad::ho_energy_shift(s, nrad::PhysicalConstants::reduced()) == doctest::Approx(-6.0 * lambda));
  s.quanta = {-1, 0, 0};
  CHECK_THROWS_AS(nrad::ho_energy_shift(s, nrad::PhysicalConstants::reduced()), nrad::Error);
}

TEST_CASE("generic linewidth of the 3-D oscillator is Lambda times the quanta") {
  for (auto units : {nrad::PhysicalConstants::reduced(), nrad::PhysicalConstants{0.7, 3.0, 0.2}}) {
    const double w0 = 1.3, m = 0.8, e = 1.1;
    const auto spec = nrad::builtin_harmonic_oscillator_3d(w0, m, e, 5, units);
    nrad::OscillatorState st{{0, 0, 0}, w0, m, e};
    const double lambda = nrad::oscillator_decay_rate(st, units);
    for (std::size_t i = 0; i < spec.dim(); ++i) {
      const auto q = quanta_of(spec.levels[i].label);
      if (q[0] > 3 || q[1] > 3 || q[2] > 3) continue;
      const double width = nrad::generic_linewidth(spec, i);
      if (q == std::array<int, 3>{0, 0, 0}) {
        CHECK(width == 0.0);
      } else {
        CHECK(std::abs(width - lambda * (q[0] + q[1] + q[2])) <= 1e-12 * lambda * (q[0] + q[1] + q[2]));
      }
    }
  }
}

TEST_CASE("1-D oscillator in SI units with electron parameters") {
  const auto si = nrad::PhysicalConstants::si();
  const double w0 = 1e15;
  auto spec = nrad::builtin_harmonic_oscillator(w0, nrad::kElectronMassSI, -nrad::kElementaryChargeSI, 6, si);
  nrad::OscillatorState st{{0, 0, 0}, w0, nrad::kElectronMassSI, -nrad::kElementaryChargeSI};
  const double lambda = nrad::oscillator_decay_rate(st, si);
  for (std::size_t n = 1; n < 6; ++n)
    CHECK(nrad::generic_linewidth(spec, n) == doctest::Approx(lambda * n).epsilon(1e-12));
  auto widened = nrad::with_radiative_widths(spec);
  CHECK(widened.widths[3] == doctest::Approx(3.0 * lambda).epsilon(1e-12));
}

TEST_CASE("linewidth needs dipole data") {
  auto spec = nrad::builtin_two_level(1.0, 1.0, 1.0, 0.0);
  spec.dipole.clear();
  CHECK_THROWS_AS(nrad::generic_linewidth(spec, 1), nrad::Error);
  CHECK_THROWS_AS(nrad::generic_linewidth(nrad::builtin_two_level(1.0, 1.0, 1.0, 0.0), 5), nrad::Error);
}
