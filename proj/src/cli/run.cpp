#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "nrad/cli.hpp"
#include "nrad/error.hpp"
#include "nrad/linewidth.hpp"
#include "nrad/mc_oracle.hpp"

namespace nrad::cli {

namespace {

bool is_validation(ErrorCode c) {
  return c == ErrorCode::ParseError || c == ErrorCode::InvalidArgument || c == ErrorCode::InvariantViolation ||
         c == ErrorCode::InadmissibleNoise;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const std::string& suffix) {
  return prefix.string() + suffix;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << content;
}

RateRequest make_request(const RunConfig& cfg, RateMode mode) {
  RateRequest req;
  req.spec = cfg.system;
  req.coupling = cfg.coupling;
  req.noise = cfg.noise;
  req.k_grid = cfg.grid.points();
  req.mode = mode;
  req.final_states = cfg.final_states;
  req.naive = cfg.naive;
  req.angular = cfg.angular;
  return req;
}

SvgSeries series_of(const EmissionSpectrum& s, const std::string& label) {
  SvgSeries out{label, {}, {}};
  for (const auto& p : s.points) {
    out.x.push_back(p.k);
    out.y.push_back(p.dGamma_dk);
  }
  return out;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const auto s = spectrum(make_request(cfg, cfg.mode));
  const auto csv = with_suffix(cfg.output, ".csv");
  write_file(csv, spectrum_csv(s));
  out << "wrote " << csv.string() << " (" << s.points.size() << " points)\n";
  if (cfg.svg) {
    const auto svg = with_suffix(cfg.output, ".svg");
    write_file(svg, svg_plot({series_of(s, to_string(s.mode))}, cfg.svg_log, "dGamma/dk"));
    out << "wrote " << svg.string() << '\n';
  }
  for (const auto& w : s.warnings) out << "warning: " << w << '\n';
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const auto reg = spectrum(make_request(cfg, RateMode::Regularized));
  const auto nai = spectrum(make_request(cfg, RateMode::Naive));
  const auto csv = with_suffix(cfg.output, "_compare.csv");
  write_file(csv, compare_csv(reg, nai));
  out << "wrote " << csv.string() << " (" << reg.points.size() << " points)\n";
  if (cfg.svg) {
    const auto svg = with_suffix(cfg.output, "_compare.svg");
    write_file(svg, svg_plot({series_of(reg, "regularized"), series_of(nai, "naive")}, cfg.svg_log,
                             "regularized vs naive dGamma/dk"));
    out << "wrote " << svg.string() << '\n';
  }
  return 0;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + '"';
}

int cmd_linewidth(const RunConfig& cfg, std::ostream& out) {
  const auto widths = generic_linewidths(cfg.system);
  std::ostringstream csv;
  csv << "# units=" << unit_label(cfg.system.constants) << '\n' << "index,label,energy,width\n";
  for (std::size_t i = 0; i < widths.size(); ++i)
    csv << i << ',' << csv_field(cfg.system.levels[i].label) << ',' << format_number(cfg.system.levels[i].energy) << ','
        << format_number(widths[i]) << '\n';
  out << csv.str();
  write_file(with_suffix(cfg.output, "_linewidth.csv"), csv.str());
  return 0;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const auto& o = cfg.oracle;
  OracleOptions opt;
  opt.gamma = cfg.coupling.gamma;
  opt.dt = o.dt;
  opt.damped = o.damped;
  opt.angular = cfg.angular;
  RateRequest req = make_request(cfg, RateMode::Regularized);
  req.k_grid = {o.k};
  std::ostringstream csv;
  csv << "# seed=" << cfg.seed << ", samples=" << o.samples << ", k=" << format_number(o.k)
      << ", final=" << o.final_state << '\n'
      << "quantity,analytic,mc_mean,std_error,z\n";
  OracleComparison c;
  std::string name;
  if (o.damped) {
    name = "rate";
    double gmin = 0.0;
    for (double g : cfg.system.widths)
      if (g > 0.0 && (gmin == 0.0 || g < gmin)) gmin = g;
    if (gmin > 0.0 && gmin * o.t < 10.0)
      out << "warning: oracle t = " << format_number(o.t) << " is under 10 / min width ("
          << format_number(10.0 / gmin) << "); transients have not died out\n";
    const double analytic = emission_rate_to_final(req, o.k, o.final_state);
    c = compare(analytic,
                estimate_rate(cfg.system, cfg.noise, o.k, o.final_state, o.t, o.window, o.samples, cfg.seed, opt));
  } else {
    name = "probability";
    const double analytic = naive_probability(req, o.k, o.final_state, o.t);
    c = compare(analytic, estimate_Pfi(cfg.system, cfg.noise, o.k, o.final_state, o.t, o.samples, cfg.seed, opt));
  }
  csv << name << ',' << format_number(c.analytic) << ',' << format_number(c.mc_mean) << ','
      << format_number(c.std_error) << ',' << format_number(c.z) << '\n';
  out << csv.str();
  write_file(with_suffix(cfg.output, "_oracle.csv"), csv.str());
  return 0;
}

int cmd_validate_noise(const RunConfig& cfg, std::ostream& out) {
  std::vector<double> grid(cfg.admissibility_points);
  for (std::size_t q = 0; q < grid.size(); ++q)
    grid[q] = cfg.admissibility_max * static_cast<double>(q) / static_cast<double>(grid.size() - 1);
  const auto rep = validate_admissible(cfg.noise, grid);
  std::ostringstream csv;
  csv << "# noise=" << cfg.noise.describe() << ", admissible=" << (rep.admissible ? "true" : "false") << '\n'
      << "omega,spectral_density\n";
  for (const auto& s : rep.samples) csv << format_number(s.omega) << ',' << format_number(s.value) << '\n';
  write_file(with_suffix(cfg.output, "_admissibility.csv"), csv.str());
  out << "noise " << cfg.noise.describe() << ": " << (rep.admissible ? "admissible" : "NOT admissible") << '\n';
  for (const auto& p : rep.negative_points)
    out << "  negative spectral density " << format_number(p.value) << " at omega=" << format_number(p.omega) << '\n';
  return rep.admissible ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon emission spectra of noise-driven bounded systems", "noise_radiance"};
  std::string command;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("command", command, "spectrum | compare | linewidth | oracle | validate-noise")->required();
  app.add_option("--config", config, "run configuration file")->required();
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  if (!threads) {
    if (const char* env = std::getenv("NOISE_RADIANCE_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end == env || *end != '\0' || v < 1) {
        err << "error: NOISE_RADIANCE_THREADS must be a positive integer\n";
        return 2;
      }
      threads = static_cast<int>(v);
    }
  }
  if (threads) omp_set_num_threads(*threads);

  try {
    const Command cmd = parse_command(command);
    RunConfig cfg = load_config(config);
    if (cfg.command && *cfg.command != cmd)
      throw Error(ErrorCode::ParseError, config + ": [run] command = " + to_string(*cfg.command) +
                                             " conflicts with the command line (" + command + ")");
    if (seed) cfg.seed = *seed;
    switch (cmd) {
      case Command::Spectrum: return cmd_spectrum(cfg, out);
      case Command::Compare: return cmd_compare(cfg, out);
      case Command::Linewidth: return cmd_linewidth(cfg, out);
      case Command::Oracle: return cmd_oracle(cfg, out);
      case Command::ValidateNoise: return cmd_validate_noise(cfg, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_validation(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace nrad::cli
