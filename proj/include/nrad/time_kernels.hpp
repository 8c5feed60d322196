#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "nrad/noise_model.hpp"

namespace nrad {

using cplx = std::complex<double>;

/// Frequency arguments of the second-order time kernels. Bohr frequencies
/// are Delta_ab = (E_a - E_b)/hbar; `delta_fi` may be left NaN and is then
/// derived as delta_fn + delta_ni.
struct KernelParams {
  double delta_fn = 0.0;
  double delta_ni = 0.0;
  double delta_fm = 0.0;
  double delta_mi = 0.0;
  double delta_fi = std::numeric_limits<double>::quiet_NaN();
  double delta_nm = 0.0;
  double omega_k = 0.0;
  double nu = 0.0;
  double gamma_n = 0.0;
  double gamma_m = 0.0;
  double t = 0.0;

  /// Delta_fi, checked against Delta_fn + Delta_ni (and Delta_fm + Delta_mi
  /// when m-frequencies are set) to 1e-12.
  double fi() const;
  void validate() const;
};

struct KernelValue {
  cplx value{};
  std::optional<cplx> derivative;
  bool asymptotic = false;
};

/// The two pieces of the second-order kernel T: the resonant term fires at
/// nu = Delta_fi + omega_k, the non-resonant one at nu = Delta_ni.
/// resonant + non_resonant = total. The non-resonant term still contains a
/// piece oscillating at the resonant frequency; `transient` is its part
/// carrying e^{[i(Dfn+wk) - Gn] t}, which is what the width suppresses.
struct KernelTerms {
  cplx resonant{};
  cplx non_resonant{};
  cplx transient{};
  cplx total{};
};

/// T(t) = \int_0^t dt1 \int_0^{t1} dt2 e^{i(Dfn+wk) t1} e^{i(Dni-nu) t2},
/// exact closed form.
KernelValue kernel_T_undamped(const KernelParams& p);
/// Same with the intermediate propagator decaying as e^{-Gn (t1 - t2)}.
KernelValue kernel_T_damped(const KernelParams& p);
/// Resonant / non-resonant split of T (damped when gamma_n > 0). The split
/// is singular at Delta_fn + omega_k = 0 where only `total` is meaningful.
KernelTerms kernel_T_terms(const KernelParams& p);

/// M(c, t) = \int_0^t e^{c x} f(x) dx. A White term contributes half its
/// weight (delta at the endpoint).
cplx noise_moment(cplx c, double t, const NoiseModel& noise);

/// I(a, b, t) = \int_0^t \int_0^t e^{a t1} e^{b t2} f(t1 - t2), with dI/dt in
/// `derivative`.
KernelValue I_abt(cplx a, cplx b, double t, const NoiseModel& noise);

enum class RateMode { Regularized, Naive };

/// Finite-time settings for the Gamma = 0 windowed derivative.
struct NaiveWindow {
  double t = 200.0;
  double window = 50.0;
};

/// Large-time d/dt of the fourth-order kernels with the delta_{l l'} factor
/// stripped. Regularized mode needs gamma_n, gamma_m > 0; Naive mode ignores
/// the widths and returns [T(t + W) - T(t)] / W at Gamma = 0.
cplx dT1_dt_asymptotic(const KernelParams& p, const NoiseModel& noise,
                       RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});
cplx dT2_dt_asymptotic(const KernelParams& p, const NoiseModel& noise,
                       RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});
cplx dT3_dt_asymptotic(const KernelParams& p, const NoiseModel& noise,
                       RateMode mode = RateMode::Regularized, const NaiveWindow& naive = {});

/// Noise weight of one amplitude: X(t) = \int_0^t h(s, t) w(s) ds with h a
/// sum of exponentials c_q e^{r_q s}.
struct ExpSum {
  struct Term {
    cplx coeff;
    cplx rate;
  };
  std::vector<Term> terms;

  ExpSum& operator+=(const ExpSum& o);
  ExpSum scaled(cplx c) const;
};

/// A1-type weight (noise at the inner time): h(s,t) = e^{b s} \int_s^t e^{a u} du
/// with a = i(Dfn + wk) - Gn, b = i Dni + Gn.
ExpSum weight_inner_noise(double delta_fn_wk, double delta_ni, double gamma_n, double t);
/// A2-type weight (noise at the outer time): h(s) = e^{(i Dfn - Gn) s}
/// \int_0^s e^{(i(Dni + wk) + Gn) u} du.
ExpSum weight_outer_noise(double delta_fn, double delta_ni_wk, double gamma_n);

/// E[X_h X_k^*] = sum c_q conj(d_r) I(r_q, conj(r'_r), t).
cplx noise_covariance(const ExpSum& h, const ExpSum& k, double t, const NoiseModel& noise);

/// Finite-time T1, T2, T3 (delta_{l l'} stripped) built from the weights.
cplx finite_time_T1(const KernelParams& p, const NoiseModel& noise, double t);
cplx finite_time_T2(const KernelParams& p, const NoiseModel& noise, double t);
cplx finite_time_T3(const KernelParams& p, const NoiseModel& noise, double t);

/// T_B = \int_0^t e^{i Omega t1} dt1 with Omega = Dfi + wk.
cplx kernel_T_B(double delta_fi_wk, double t);
/// Noise-averaged third-order kernel of C1 (delta_{l l'} stripped).
cplx kernel_T_C1(const KernelParams& p, const NoiseModel& noise);

struct MixedTermValue {
  cplx value{};
  /// Mean over [t, t + 2 pi W / Omega].
  cplx window_average{};
  /// |first term| + |second term| at t.
  double instantaneous_bound = 0.0;
};

/// Large-time d/dt of T_B^* T_C1; throws ResonantMixedTerm when
/// Delta_fi + omega_k = 0.
MixedTermValue mixed_dBC1_dt(const KernelParams& p, const NoiseModel& noise, double t,
                             double window_periods = 20.0);

}  // namespace nrad
