#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nrad {

/// Delta-correlated noise, f(s) = delta(s), f~(w) = 1.
struct White {};

/// f(s) = exp(-|s|/tau) / (2 tau), f~(w) = 1 / (1 + w^2 tau^2).
struct Exponential {
  double tau;
};

/// f(s) = exp(-s^2/tau^2) / (tau sqrt(pi)), f~(w) = exp(-w^2 tau^2 / 4).
struct GaussianCorr {
  double tau;
};

/// Correlation sampled on a strictly increasing grid. Stored as the even
/// half-table s >= 0 after symmetrization.
struct Tabulated {
  std::vector<double> s;
  std::vector<double> f;
};

using NoiseKind = std::variant<White, Exponential, GaussianCorr, Tabulated>;

struct NoiseTerm {
  NoiseKind kind;
  double scale = 1.0;
};

struct SpectralSample {
  double omega;
  double value;
};

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<SpectralSample> negative_points;
  std::vector<SpectralSample> samples;
};

/// Stationary noise statistics: correlation f(s) and spectral density
/// f~(w) = \int f(s) e^{i w s} ds. A model is a weighted sum of terms so a
/// narrow low-frequency spike can be layered on top of a base spectrum.
/// Immutable after construction.
class NoiseModel {
 public:
  static NoiseModel white(double scale = 1.0);
  static NoiseModel exponential(double tau, double scale = 1.0);
  static NoiseModel gaussian(double tau, double scale = 1.0);
  /// Accepts either a full table on s in [-S, S] or a half table starting at
  /// s = 0. Rejects asymmetry above 1e-9 relative to max|f|.
  static NoiseModel tabulated(std::vector<double> s, std::vector<double> f, double scale = 1.0);
  /// Two-column `s f(s)` text file, '#' comments.
  static NoiseModel load_tabulated(const std::filesystem::path& path, double scale = 1.0);

  NoiseModel operator+(const NoiseModel& other) const;
  NoiseModel scaled(double c) const;

  std::span<const NoiseTerm> terms() const { return terms_; }

  bool has_white() const;
  /// True when every term is White.
  bool is_white() const;
  /// Sum of White-term scales; the weight of the delta part of f.
  double white_weight() const;

  /// f(s) for the non-white part. Throws PointwiseUndefined if any term is
  /// White. Tabulated terms outside their support contribute 0 and set
  /// `out_of_support`.
  double correlation(double s, bool* out_of_support = nullptr) const;
  /// Same as `correlation` but skips White terms.
  double smooth_correlation(double s, bool* out_of_support = nullptr) const;

  double spectral_density(double omega) const;

  /// Beyond this lag the non-white correlation is below double precision
  /// relative to f(0) (or outside the tabulated support).
  double correlation_cutoff() const;
  /// Shortest correlation time among non-white terms; +inf for pure white.
  double correlation_time() const;

  std::string describe() const;

 private:
  std::vector<NoiseTerm> terms_;
};

/// scale * f(s) of a single non-white term.
double term_correlation(const NoiseTerm& term, double s, bool* out_of_support = nullptr);
double eval_correlation(const NoiseModel& model, double s, bool* out_of_support = nullptr);
double spectral_density(const NoiseModel& model, double omega);
AdmissibilityReport validate_admissible(const NoiseModel& model, std::span<const double> grid);

/// Trapezoidal cosine transform of an even half-table with endpoint halving
/// and a grid-halving Richardson check (1e-8 absolute).
double tabulated_transform(const Tabulated& table, double omega);

}  // namespace nrad
