#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nrad {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), data_(n * n) {}

  std::size_t size() const { return n_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  bool is_hermitian(double rel_tol) const;
  double max_abs() const;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

/// Constants of the active unit system. Reduced units have all three equal 1.
struct PhysicalConstants {
  double hbar = 1.0;
  double c = 1.0;
  double eps0 = 1.0;

  static PhysicalConstants reduced() { return {}; }
  static PhysicalConstants si() { return {1.054571817e-34, 299792458.0, 8.8541878128e-12}; }

  friend bool operator==(const PhysicalConstants&, const PhysicalConstants&) = default;
};

/// Electron charge and mass in SI.
inline constexpr double kElementaryChargeSI = 1.602176634e-19;
inline constexpr double kElectronMassSI = 9.1093837015e-31;

struct Level {
  std::string label;
  double energy = 0.0;
  friend bool operator==(const Level&, const Level&) = default;
};

struct Particle {
  double charge = 1.0;
  double mass = 1.0;
  friend bool operator==(const Particle&, const Particle&) = default;
};

/// One noise channel l: the operator <a|N_l|b> plus a free-form unit tag
/// (e.g. "position" for QMUPL, "density" for CSL-like couplings).
struct NoiseChannel {
  CMatrix op;
  std::string convention = "position";
  friend bool operator==(const NoiseChannel&, const NoiseChannel&) = default;
};

/// Momentum matrix <a|p_j|b> of one particle along one axis.
struct DipoleBlock {
  int direction = 0;
  std::size_t particle = 0;
  CMatrix p;
  friend bool operator==(const DipoleBlock&, const DipoleBlock&) = default;
};

/// User-supplied radiation matrix for one polarization axis, beyond dipole:
/// <a|R_k|b> = alpha_k * m(a, b).
struct RadiationBlock {
  int direction = 0;
  CMatrix m;
  friend bool operator==(const RadiationBlock&, const RadiationBlock&) = default;
};

struct SystemSpec {
  std::vector<Level> levels;
  std::vector<double> widths;
  std::vector<NoiseChannel> noise_couplings;
  std::vector<DipoleBlock> dipole;
  std::vector<RadiationBlock> radiation;
  std::vector<Particle> particles;
  PhysicalConstants constants;
  std::size_t initial_state = 0;
  /// Levels at the truncation edge of the basis.
  std::vector<bool> edge;

  std::size_t dim() const { return levels.size(); }
  /// Throws InvariantViolation naming the failed check.
  void validate() const;
  /// Axes (0..2) with radiation coupling data.
  std::vector<int> directions() const;
  std::optional<std::size_t> find_level(const std::string& label) const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

/// Noise coupling strength gamma and an optional collapse-model mapping.
struct CslMapping {
  double lambda;
  double r_c;
  double m0;
};

struct CouplingConstants {
  double gamma = 1.0;
  std::optional<CslMapping> csl;

  /// QMUPL-style mapping: gamma -> lambda, N_l -> position operators.
  static CouplingConstants qmupl(double lambda);
  void validate() const;
};

/// Delta_ab = (E_a - E_b) / hbar.
double bohr_frequency(const SystemSpec& spec, std::size_t a, std::size_t b);

/// alpha_k = sqrt(hbar / (2 eps0 omega_k (2 pi)^3)), omega_k = k c.
double alpha_k(const PhysicalConstants& constants, double k);

/// <f|R_k|n> along axis `direction` in dipole approximation.
cplx radiation_element(const SystemSpec& spec, double k, std::size_t f, std::size_t n, int direction);

/// The full matrix <a|R_k|b> along one axis.
CMatrix radiation_matrix(const SystemSpec& spec, double k, int direction);

/// k-independent part sum_j (-e_j/m_j) <a|p_j|b> (or the supplied radiation
/// block) so that R_k = alpha_k * reduced.
CMatrix reduced_radiation_matrix(const SystemSpec& spec, int direction);

/// 1-D oscillator along x: E_n = hbar w0 (n + 1/2), N = q, dipole along x.
SystemSpec builtin_harmonic_oscillator(double omega0, double mass, double charge,
                                       std::size_t n_levels,
                                       const PhysicalConstants& constants = {});

/// Isotropic 3-D oscillator on the product basis with `n_per_axis` quanta
/// per axis (0 .. n_per_axis-1). Labels are "i1,i2,i3"; levels sorted by
/// energy. Three noise channels N_l = q_l.
SystemSpec builtin_harmonic_oscillator_3d(double omega0, double mass, double charge,
                                          std::size_t n_per_axis,
                                          const PhysicalConstants& constants = {});

/// Two levels 0 (energy 0, initial) and 1 (energy hbar*gap), one noise
/// channel <1|N|0> = noise_element, dipole <1|p|0> = i*momentum_element
/// along x, width of level 1 `width`.
SystemSpec builtin_two_level(double gap, double noise_element, double momentum_element, double width,
                             const PhysicalConstants& constants = {});

SystemSpec load_system(const std::filesystem::path& path);
SystemSpec parse_system(const std::string& text, const std::string& origin = "<string>");
void save_system(const SystemSpec& spec, const std::filesystem::path& path);
std::string format_system(const SystemSpec& spec);

}  // namespace nrad
