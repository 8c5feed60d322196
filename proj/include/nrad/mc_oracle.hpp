#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "nrad/noise_model.hpp"
#include "nrad/rate_engine.hpp"
#include "nrad/system_model.hpp"

namespace nrad {

/// Stationary Gaussian noise on a uniform grid by circulant embedding. The
/// eigenvalues are computed once; every draw costs one complex FFT.
class NoiseSampler {
 public:
  NoiseSampler(const NoiseModel& model, std::size_t n_points, double dt);
  ~NoiseSampler();
  NoiseSampler(const NoiseSampler&) = delete;
  NoiseSampler& operator=(const NoiseSampler&) = delete;

  std::size_t n_points() const { return n_; }
  std::size_t embedding_size() const { return sqrt_eig_.size(); }
  double dt() const { return dt_; }
  /// Fills out[0 .. n_points) using the stream (seed, stream, channel).
  /// Safe to call concurrently.
  void draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t channel, double* out) const;

 private:
  std::size_t n_;
  double dt_;
  std::vector<double> sqrt_eig_;
  void* plan_ = nullptr;
};

struct NoiseRealization {
  double dt = 0.0;
  /// samples[l][k] = w_l(k dt); the value is held constant on [k dt, (k+1) dt).
  std::vector<std::vector<double>> samples;
  std::uint64_t seed = 0;
  NoiseModel target;

  std::size_t size() const { return samples.empty() ? 0 : samples.front().size(); }
  double duration() const { return dt * static_cast<double>(size()); }
};

/// Throws InadmissibleNoise when f~ < 0 on the synthesis grid and
/// InvalidArgument when dt does not resolve the correlation time.
NoiseRealization sample_noise(const NoiseModel& model, double t_total, double dt, std::uint64_t seed,
                              std::size_t channels = 1);

struct AmplitudeOptions {
  /// Insert e^{-Gn (t1 - t2)} on the intermediate propagator.
  bool damped = true;
  /// Index into spec.directions().
  std::size_t direction = 0;
};

/// Radiation at the outer time, noise at the inner time, summed over
/// intermediate levels and noise channels.
cplx amplitude_A1_direct(const SystemSpec& spec, const NoiseRealization& w, double k, std::size_t f, double t,
                         const AmplitudeOptions& opt = {});
/// Noise at the outer time.
cplx amplitude_A2_direct(const SystemSpec& spec, const NoiseRealization& w, double k, std::size_t f, double t,
                         const AmplitudeOptions& opt = {});

struct AmplitudeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct OracleOptions {
  double gamma = 1.0;
  double dt = 0.05;
  bool damped = true;
  bool parallel = true;
  AngularMethod angular = AngularMethod::DipoleIdentity;
};

/// Mean of (gamma / hbar^2) sum_jj' F_jj' A_j A_j'^* at time t, A = A1 + A2.
AmplitudeEstimate estimate_Pfi(const SystemSpec& spec, const NoiseModel& model, double k, std::size_t f, double t,
                               std::size_t n_samples, std::uint64_t seed, const OracleOptions& opt = {});

/// k^2 [P(t + W) - P(t)] / W per realization; comparable with
/// emission_rate_to_final in Regularized mode once the transients are gone.
AmplitudeEstimate estimate_rate(const SystemSpec& spec, const NoiseModel& model, double k, std::size_t f, double t,
                                double window, std::size_t n_samples, std::uint64_t seed,
                                const OracleOptions& opt = {});

/// Mean of A1 alone (should vanish), real and imaginary parts.
std::pair<AmplitudeEstimate, AmplitudeEstimate> estimate_mean_A1(const SystemSpec& spec, const NoiseModel& model,
                                                                 double k, std::size_t f, double t,
                                                                 std::size_t n_samples, std::uint64_t seed,
                                                                 const OracleOptions& opt = {});

struct LagEstimate {
  double lag = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double target = 0.0;
};

/// Ensemble autocovariance at lags 0 .. n_lags-1 (in steps of dt).
std::vector<LagEstimate> empirical_autocovariance(const NoiseModel& model, double dt, std::size_t n_points,
                                                  std::size_t n_lags, std::size_t n_realizations,
                                                  std::uint64_t seed);

/// Ensemble periodogram dt/N |sum_k w_k e^{i w k dt}|^2 against f~(w).
std::vector<LagEstimate> empirical_spectral_density(const NoiseModel& model, double dt, std::size_t n_points,
                                                    const std::vector<double>& omegas,
                                                    std::size_t n_realizations, std::uint64_t seed);

struct OracleComparison {
  double analytic = 0.0;
  double mc_mean = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

OracleComparison compare(double analytic, const AmplitudeEstimate& mc);

}  // namespace nrad
