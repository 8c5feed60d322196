// Sectioned key = value run configuration. Grammar in docs/config_format.md.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nrad/cli.hpp"
#include "nrad/error.hpp"
#include "nrad/linewidth.hpp"

namespace nrad::cli {

namespace {

struct Entry {
  std::string value;
  int line;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"command", "output", "seed", "mode", "svg", "svg_scale", "angular", "final_states"}},
      {"system",
       {"builtin", "file", "omega0", "mass", "charge", "levels", "n_per_axis", "gap", "noise_element",
        "momentum_element", "width", "widths", "initial"}},
      {"constants", {"units", "hbar", "c", "eps0"}},
      {"noise", {"model", "tau", "scale", "file", "spike_scale", "spike_tau"}},
      {"coupling", {"gamma", "lambda"}},
      {"grid", {"k_min", "k_max", "n_points", "spacing"}},
      {"naive", {"t", "window"}},
      {"oracle", {"k", "final", "t", "window", "dt", "samples", "damped"}},
      {"validate", {"omega_max", "points"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

class Reader {
 public:
  Reader(const std::string& text, std::string origin) : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(line, "unterminated section header");
        section = trim(body.substr(1, body.size() - 2));
        if (!allowed_keys().count(section)) fail(line, "unknown section [" + section + "]");
        if (sections_.count(section)) fail(line, "duplicate section [" + section + "]");
        sections_[section];
        continue;
      }
      if (section.empty()) fail(line, "key outside of any section");
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(line, "expected `key = value`");
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) fail(line, "empty key");
      if (!allowed_keys().at(section).count(key)) fail(line, "unknown key '" + section + "." + key + "'");
      if (value.empty()) fail(line, "empty value for '" + section + "." + key + "'");
      auto& sec = sections_[section];
      if (sec.count(key)) fail(line, "duplicate key '" + section + "." + key + "'");
      sec[key] = {value, line};
    }
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw Error(ErrorCode::ParseError, origin_ + ":" + std::to_string(line) + ": " + what);
  }

  bool has(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key);
  }

  bool has_section(const std::string& sec) const { return sections_.count(sec) > 0; }

  const Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  std::string str(const std::string& sec, const std::string& key, const std::string& dflt) {
    const Entry* e = find(sec, key);
    return e ? e->value : dflt;
  }

  double num(const std::string& sec, const std::string& key, double dflt) {
    const Entry* e = find(sec, key);
    if (!e) return dflt;
    return parse_double(*e, sec + "." + key);
  }

  double positive(const std::string& sec, const std::string& key, double dflt) {
    const double v = num(sec, key, dflt);
    if (!(v > 0.0)) fail(line_of(sec, key), "'" + sec + "." + key + "' must be positive");
    return v;
  }

  std::uint64_t uint(const std::string& sec, const std::string& key, std::uint64_t dflt) {
    const Entry* e = find(sec, key);
    if (!e) return dflt;
    std::uint64_t v = 0;
    const auto& s = e->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(e->line, "'" + sec + "." + key + "' expects a non-negative integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& sec, const std::string& key, bool dflt) {
    const Entry* e = find(sec, key);
    if (!e) return dflt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(e->line, "'" + sec + "." + key + "' expects true or false");
  }

  std::vector<double> numbers(const std::string& sec, const std::string& key) {
    const Entry* e = find(sec, key);
    std::vector<double> out;
    if (!e) return out;
    std::istringstream in(e->value);
    std::string tok;
    while (in >> tok) out.push_back(parse_double({tok, e->line}, sec + "." + key));
    return out;
  }

  int line_of(const std::string& sec, const std::string& key) const {
    auto s = sections_.find(sec);
    if (s == sections_.end()) return 0;
    auto e = s->second.find(key);
    return e == s->second.end() ? 0 : e->second.line;
  }

  /// Every key must have been consumed by the current configuration.
  void check_all_used() const {
    for (const auto& [sec, keys] : sections_)
      for (const auto& [key, e] : keys)
        if (!e.used) fail(e.line, "key '" + sec + "." + key + "' does not apply to this configuration");
  }

 private:
  double parse_double(const Entry& e, const std::string& name) const {
    double v = 0.0;
    const auto& s = e.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      fail(e.line, "'" + name + "' expects a number, got '" + s + "'");
    return v;
  }

  std::string origin_;
  std::map<std::string, Section> sections_;
};

PhysicalConstants read_constants(Reader& r, const PhysicalConstants& base) {
  PhysicalConstants c = base;
  const std::string units = r.str("constants", "units", "");
  if (units == "reduced") c = PhysicalConstants::reduced();
  else if (units == "SI") c = PhysicalConstants::si();
  else if (!units.empty()) r.fail(r.line_of("constants", "units"), "units must be `reduced` or `SI`");
  c.hbar = r.positive("constants", "hbar", c.hbar);
  c.c = r.positive("constants", "c", c.c);
  c.eps0 = r.positive("constants", "eps0", c.eps0);
  return c;
}

void apply_widths(Reader& r, SystemSpec& s, const std::string& dflt) {
  const std::string mode = r.str("system", "widths", dflt);
  if (mode == "radiative") {
    s = with_radiative_widths(std::move(s));
  } else if (mode == "zero") {
    s.widths.assign(s.dim(), 0.0);
  } else if (mode == "file") {
    // keep what the system file says
  } else {
    auto w = r.numbers("system", "widths");
    if (w.size() != s.dim())
      r.fail(r.line_of("system", "widths"), "widths: expected `radiative`, `zero` or " +
                                                std::to_string(s.dim()) + " numbers");
    for (double v : w)
      if (v < 0.0) r.fail(r.line_of("system", "widths"), "widths must be non-negative");
    s.widths = w;
  }
}

SystemSpec read_system(Reader& r, const std::filesystem::path& base_dir) {
  const bool has_file = r.has("system", "file");
  const bool has_builtin = r.has("system", "builtin");
  if (has_file == has_builtin)
    r.fail(r.line_of("system", has_file ? "file" : "builtin"),
           "[system] needs exactly one of `builtin` or `file`");
  SystemSpec s;
  if (has_file) {
    auto path = std::filesystem::path(r.str("system", "file", ""));
    if (path.is_relative()) path = base_dir / path;
    s = load_system(path);
    if (r.has_section("constants")) s.constants = read_constants(r, s.constants);
    apply_widths(r, s, "file");
  } else {
    const auto c = read_constants(r, PhysicalConstants::reduced());
    const std::string kind = r.str("system", "builtin", "");
    if (kind == "oscillator") {
      const auto n = r.uint("system", "levels", 6);
      s = builtin_harmonic_oscillator(r.positive("system", "omega0", 1.0), r.positive("system", "mass", 1.0),
                                      r.num("system", "charge", 1.0), n, c);
      apply_widths(r, s, "radiative");
    } else if (kind == "oscillator3d") {
      const auto n = r.uint("system", "n_per_axis", 3);
      s = builtin_harmonic_oscillator_3d(r.positive("system", "omega0", 1.0), r.positive("system", "mass", 1.0),
                                         r.num("system", "charge", 1.0), n, c);
      apply_widths(r, s, "radiative");
    } else if (kind == "two_level") {
      s = builtin_two_level(r.num("system", "gap", 1.0), r.num("system", "noise_element", 1.0),
                            r.num("system", "momentum_element", 0.7), r.num("system", "width", 0.2), c);
    } else {
      r.fail(r.line_of("system", "builtin"),
             "unknown builtin '" + kind + "' (expected oscillator, oscillator3d or two_level)");
    }
  }
  if (const Entry* e = r.find("system", "initial")) {
    if (auto idx = s.find_level(e->value)) {
      s.initial_state = *idx;
    } else {
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
      if (ec != std::errc() || ptr != e->value.data() + e->value.size() || v >= s.dim())
        r.fail(e->line, "initial: no level '" + e->value + "'");
      s.initial_state = v;
    }
  }
  s.validate();
  return s;
}

NoiseModel read_noise(Reader& r, const std::filesystem::path& base_dir) {
  const std::string model = r.str("noise", "model", "white");
  const double scale = r.num("noise", "scale", 1.0);
  NoiseModel m;
  if (model == "white") {
    m = NoiseModel::white(scale);
  } else if (model == "exponential") {
    m = NoiseModel::exponential(r.positive("noise", "tau", 1.0), scale);
  } else if (model == "gaussian") {
    m = NoiseModel::gaussian(r.positive("noise", "tau", 1.0), scale);
  } else if (model == "tabulated") {
    if (!r.has("noise", "file")) r.fail(r.line_of("noise", "model"), "tabulated noise needs `file`");
    auto path = std::filesystem::path(r.str("noise", "file", ""));
    if (path.is_relative()) path = base_dir / path;
    m = NoiseModel::load_tabulated(path, scale);
  } else {
    r.fail(r.line_of("noise", "model"), "unknown noise model '" + model + "'");
  }
  if (r.has("noise", "spike_scale")) {
    const double a = r.num("noise", "spike_scale", 0.0);
    if (a < 0.0) r.fail(r.line_of("noise", "spike_scale"), "spike_scale must be non-negative");
    m = m + NoiseModel::gaussian(r.positive("noise", "spike_tau", 2000.0), a);
  }
  return m;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "spectrum") return Command::Spectrum;
  if (name == "compare") return Command::Compare;
  if (name == "linewidth") return Command::Linewidth;
  if (name == "oracle") return Command::Oracle;
  if (name == "validate-noise") return Command::ValidateNoise;
  throw Error(ErrorCode::ParseError, "unknown command '" + name + "'");
}

const char* to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::Compare: return "compare";
    case Command::Linewidth: return "linewidth";
    case Command::Oracle: return "oracle";
    case Command::ValidateNoise: return "validate-noise";
  }
  return "?";
}

std::vector<double> GridConfig::points() const {
  std::vector<double> k(n_points);
  if (n_points == 1) {
    k[0] = k_min;
    return k;
  }
  for (std::size_t q = 0; q < n_points; ++q) {
    const double u = static_cast<double>(q) / static_cast<double>(n_points - 1);
    k[q] = log_spacing ? k_min * std::pow(k_max / k_min, u) : k_min + (k_max - k_min) * u;
  }
  k.back() = k_max;
  return k;
}

RunConfig parse_config(const std::string& text, const std::string& origin, const std::filesystem::path& base_dir) {
  Reader r(text, origin);
  RunConfig cfg;
  if (const Entry* e = r.find("run", "command")) {
    try {
      cfg.command = parse_command(e->value);
    } catch (const Error&) {
      r.fail(e->line, "unknown command '" + e->value + "'");
    }
  }
  if (const Entry* e = r.find("run", "output")) cfg.output = e->value;
  cfg.seed = r.uint("run", "seed", cfg.seed);
  const std::string mode = r.str("run", "mode", "regularized");
  if (mode == "regularized") cfg.mode = RateMode::Regularized;
  else if (mode == "naive") cfg.mode = RateMode::Naive;
  else r.fail(r.line_of("run", "mode"), "mode must be `regularized` or `naive`");
  cfg.svg = r.boolean("run", "svg", false);
  const std::string scale = r.str("run", "svg_scale", "linear");
  if (scale != "linear" && scale != "log") r.fail(r.line_of("run", "svg_scale"), "svg_scale must be linear or log");
  cfg.svg_log = scale == "log";
  const std::string ang = r.str("run", "angular", "identity");
  if (ang == "identity") cfg.angular = AngularMethod::DipoleIdentity;
  else if (ang == "sphere") cfg.angular = AngularMethod::SphereQuadrature;
  else r.fail(r.line_of("run", "angular"), "angular must be `identity` or `sphere`");

  if (!r.has_section("system")) r.fail(0, "missing [system] section");
  try {
    cfg.system = read_system(r, base_dir);
    cfg.noise = read_noise(r, base_dir);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, origin + ": " + e.what());
  }
  for (double f : r.numbers("run", "final_states")) {
    if (f < 0.0 || f != std::floor(f) || f >= static_cast<double>(cfg.system.dim()))
      r.fail(r.line_of("run", "final_states"), "final_states: bad level index");
    cfg.final_states.push_back(static_cast<std::size_t>(f));
  }

  if (r.has("coupling", "lambda")) {
    if (r.has("coupling", "gamma")) r.fail(r.line_of("coupling", "gamma"), "give either gamma or lambda, not both");
    cfg.coupling = CouplingConstants::qmupl(r.positive("coupling", "lambda", 1.0));
  } else {
    cfg.coupling.gamma = r.positive("coupling", "gamma", 1.0);
  }

  cfg.grid.k_min = r.positive("grid", "k_min", cfg.grid.k_min);
  cfg.grid.k_max = r.positive("grid", "k_max", cfg.grid.k_max);
  cfg.grid.n_points = r.uint("grid", "n_points", cfg.grid.n_points);
  const std::string spacing = r.str("grid", "spacing", "linear");
  if (spacing != "linear" && spacing != "log") r.fail(r.line_of("grid", "spacing"), "spacing must be linear or log");
  cfg.grid.log_spacing = spacing == "log";
  if (cfg.grid.n_points < 1) r.fail(r.line_of("grid", "n_points"), "n_points must be >= 1");
  if (cfg.grid.n_points > 1 && !(cfg.grid.k_max > cfg.grid.k_min))
    r.fail(r.line_of("grid", "k_max"), "k_max must exceed k_min");

  cfg.naive.t = r.positive("naive", "t", cfg.naive.t);
  cfg.naive.window = r.positive("naive", "window", cfg.naive.window);

  cfg.oracle.k = r.positive("oracle", "k", cfg.oracle.k);
  cfg.oracle.final_state = r.uint("oracle", "final", cfg.oracle.final_state);
  if (cfg.oracle.final_state >= cfg.system.dim()) r.fail(r.line_of("oracle", "final"), "oracle.final out of range");
  cfg.oracle.t = r.positive("oracle", "t", cfg.oracle.t);
  cfg.oracle.window = r.positive("oracle", "window", cfg.oracle.window);
  cfg.oracle.dt = r.positive("oracle", "dt", cfg.oracle.dt);
  cfg.oracle.samples = r.uint("oracle", "samples", cfg.oracle.samples);
  if (cfg.oracle.samples < 100) r.fail(r.line_of("oracle", "samples"), "oracle.samples must be >= 100");
  cfg.oracle.damped = r.boolean("oracle", "damped", cfg.oracle.damped);

  cfg.admissibility_max = r.positive("validate", "omega_max", cfg.admissibility_max);
  cfg.admissibility_points = r.uint("validate", "points", cfg.admissibility_points);
  if (cfg.admissibility_points < 2) r.fail(r.line_of("validate", "points"), "validate.points must be >= 2");

  r.check_all_used();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

}  // namespace nrad::cli
