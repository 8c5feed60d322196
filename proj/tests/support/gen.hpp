#pragma once

// Small random generators for property tests. Every test seeds its own Gen
// so failures reproduce.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "nrad/noise_model.hpp"
#include "nrad/system_model.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::complex<double> complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }

  std::vector<double> energies(std::size_t n, double min_gap = 0.2) {
    std::vector<double> e{0.0};
    while (e.size() < n) e.push_back(e.back() + uniform(min_gap, 1.5));
    return e;
  }

  // Random Hermitian matrix of size n.
  nrad::CMatrix hermitian(std::size_t n, double r = 1.0) {
    nrad::CMatrix m(n);
    for (std::size_t a = 0; a < n; ++a) {
      m(a, a) = uniform(-r, r);
      for (std::size_t b = a + 1; b < n; ++b) {
        m(a, b) = complex(r);
        m(b, a) = std::conj(m(a, b));
      }
    }
    return m;
  }

  nrad::NoiseModel noise() {
    switch (integer(0, 3)) {
      case 0: return nrad::NoiseModel::white(uniform(0.2, 2.0));
      case 1: return nrad::NoiseModel::exponential(uniform(0.2, 2.0), uniform(0.2, 2.0));
      case 2: return nrad::NoiseModel::gaussian(uniform(0.2, 1.5), uniform(0.2, 2.0));
      default:
        return nrad::NoiseModel::exponential(uniform(0.2, 1.0)) + nrad::NoiseModel::white(uniform(0.1, 0.5));
    }
  }

  // Random n-level system: one noise channel, one particle with momentum
  // along x, every width positive.
  nrad::SystemSpec system(std::size_t n) {
    nrad::SystemSpec s;
    const auto e = energies(n);
    for (std::size_t a = 0; a < n; ++a) s.levels.push_back({std::to_string(a), e[a]});
    for (std::size_t a = 0; a < n; ++a) s.widths.push_back(uniform(0.05, 0.4));
    s.noise_couplings.push_back({hermitian(n), "position"});
    s.particles.push_back({1.0, 1.0});
    s.dipole.push_back({0, 0, hermitian(n)});
    s.initial_state = 0;
    return s;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen
