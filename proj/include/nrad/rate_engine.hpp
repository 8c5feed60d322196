#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "nrad/noise_model.hpp"
#include "nrad/system_model.hpp"
#include "nrad/time_kernels.hpp"

namespace nrad {

enum class AngularMethod { DipoleIdentity, SphereQuadrature };

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// sum over both polarizations and all photon directions of e_j e_j'.
/// DipoleIdentity gives (8 pi / 3) delta_jj' exactly.
Matrix3 angular_polarization_tensor(AngularMethod method);
double angular_polarization_factor(AngularMethod method, int j = 0, int jp = 0);

struct RateRequest {
  SystemSpec spec;
  CouplingConstants coupling;
  NoiseModel noise = NoiseModel::white();
  std::vector<double> k_grid;
  RateMode mode = RateMode::Regularized;
  /// Empty means every level.
  std::vector<std::size_t> final_states;
  NaiveWindow naive;
  AngularMethod angular = AngularMethod::DipoleIdentity;

  void validate() const;
};

struct SpectrumPoint {
  double k;
  double dGamma_dk;
};

struct EmissionSpectrum {
  std::vector<SpectrumPoint> points;
  RateMode mode = RateMode::Regularized;
  std::vector<std::string> warnings;
  std::string units;
  std::string jacobian = "k^2";
};

/// Sums over n, m, l and polarization axis j of the kernel-weighted matrix
/// element products. No gamma/hbar^2, angular factor or k^2 Jacobian.
cplx rate_R11(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f,
              RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});
cplx rate_R12(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f,
              RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});
cplx rate_R22(const SystemSpec& spec, const NoiseModel& noise, double k, std::size_t f,
              RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});

/// Noise-averaged transition probability to `f` at time t with all widths
/// set to zero, including gamma/hbar^2 and the angular factor.
double naive_probability(const RateRequest& req, double k, std::size_t f, double t);

/// dGamma/dk at one wavenumber. Warnings (edge truncation, non-ground
/// initial state) are appended when `warnings` is given.
double emission_rate_at_k(const RateRequest& req, double k,
                          std::vector<std::string>* warnings = nullptr);

/// Contribution of a single final state.
double emission_rate_to_final(const RateRequest& req, double k, std::size_t f,
                              std::vector<std::string>* warnings = nullptr);

/// OpenMP over the k grid.
EmissionSpectrum spectrum(const RateRequest& req);
/// Same result, single thread.
EmissionSpectrum spectrum_serial(const RateRequest& req);

std::string unit_label(const PhysicalConstants& c);
const char* to_string(RateMode mode);

}  // namespace nrad
