#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nrad/noise_model.hpp"
#include "nrad/rate_engine.hpp"
#include "nrad/system_model.hpp"

namespace nrad::cli {

enum class Command { Spectrum, Compare, Linewidth, Oracle, ValidateNoise };

Command parse_command(const std::string& name);
const char* to_string(Command c);

struct GridConfig {
  double k_min = 0.5;
  double k_max = 3.0;
  std::size_t n_points = 64;
  bool log_spacing = false;

  std::vector<double> points() const;
};

struct OracleConfig {
  double k = 1.0;
  std::size_t final_state = 0;
  double t = 125.0;
  double window = 25.0;
  double dt = 0.05;
  std::size_t samples = 10000;
  bool damped = true;
};

/// Everything a run needs, resolved from the config file.
struct RunConfig {
  std::optional<Command> command;
  SystemSpec system;
  NoiseModel noise = NoiseModel::white();
  CouplingConstants coupling;
  GridConfig grid;
  RateMode mode = RateMode::Regularized;
  NaiveWindow naive;
  OracleConfig oracle;
  AngularMethod angular = AngularMethod::DipoleIdentity;
  std::vector<std::size_t> final_states;
  std::filesystem::path output = "noise_radiance";
  std::uint64_t seed = 1;
  bool svg = false;
  bool svg_log = false;
  /// Frequency grid for validate-noise.
  double admissibility_max = 50.0;
  std::size_t admissibility_points = 2001;
};

/// Throws Error(ParseError) naming the offending key and line. Relative
/// paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// %.17g, the format every CSV column uses.
std::string format_number(double v);

std::string spectrum_csv(const EmissionSpectrum& s);
std::string compare_csv(const EmissionSpectrum& regularized, const EmissionSpectrum& naive);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG with one polyline per series. With `log_y`, points
/// with y <= 0 are dropped.
std::string svg_plot(const std::vector<SvgSeries>& series, bool log_y, const std::string& title);

/// Entry point behind the executable. Exit codes: 0 ok, 2 validation
/// failure (config, admissibility), 1 runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nrad::cli
