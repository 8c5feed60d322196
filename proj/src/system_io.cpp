// Plain-text system file reader/writer. Grammar in docs/system_format.md.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "nrad/error.hpp"
#include "nrad/system_model.hpp"

namespace nrad {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Parser {
 public:
  Parser(const std::string& origin) : origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, origin_ + ":" + std::to_string(line_) + ": " + what);
  }

  double number(const std::string& tok) const {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail("expected a number, got '" + tok + "'");
    return v;
  }

  std::size_t index(const std::string& tok) const {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("expected an index, got '" + tok + "'");
    return v;
  }

  SystemSpec parse(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    SystemSpec spec;
    spec.particles.clear();
    std::map<std::size_t, NoiseChannel> channels;
    std::vector<bool> edge;
    bool any_edge = false;
    bool have_widths = false;
    std::string initial_token;
    std::string section;
    CMatrix* current = nullptr;

    while (std::getline(in, raw)) {
      ++line_;
      const auto hash = raw.find('#');
      const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
      auto toks = tokenize(line);
      if (toks.empty()) continue;

      if (toks.front().front() == '[') {
        std::string header = line.substr(line.find('[') + 1);
        const auto close = header.find(']');
        if (close == std::string::npos) fail("unterminated section header");
        auto parts = tokenize(header.substr(0, close));
        if (parts.empty()) fail("empty section header");
        section = parts[0];
        current = nullptr;
        const std::size_t n = spec.levels.size();
        auto need_levels = [&] {
          if (n == 0) fail("[" + section + "] must come after [levels]");
        };
        if (section == "levels" || section == "widths" || section == "initial" ||
            section == "constants" || section == "particles") {
          if (parts.size() != 1) fail("[" + section + "] takes no arguments");
        } else if (section == "noise_coupling") {
          need_levels();
          if (parts.size() < 2 || parts.size() > 3) fail("expected [noise_coupling <l> [convention]]");
          const std::size_t l = index(parts[1]);
          if (channels.count(l)) fail("duplicate noise channel " + parts[1]);
          NoiseChannel ch{CMatrix(n), parts.size() == 3 ? parts[2] : "position"};
          current = &channels.emplace(l, std::move(ch)).first->second.op;
        } else if (section == "dipole") {
          need_levels();
          if (parts.size() < 2 || parts.size() > 3) fail("expected [dipole <direction> [particle]]");
          const std::size_t dir = index(parts[1]);
          if (dir > 2) fail("direction must be 0, 1 or 2");
          spec.dipole.push_back({static_cast<int>(dir), parts.size() == 3 ? index(parts[2]) : 0, CMatrix(n)});
          current = &spec.dipole.back().p;
        } else if (section == "radiation") {
          need_levels();
          if (parts.size() != 2) fail("expected [radiation <direction>]");
          const std::size_t dir = index(parts[1]);
          if (dir > 2) fail("direction must be 0, 1 or 2");
          spec.radiation.push_back({static_cast<int>(dir), CMatrix(n)});
          current = &spec.radiation.back().m;
        } else {
          fail("unknown section [" + section + "]");
        }
        continue;
      }

      if (section.empty()) fail("data before the first section header");
      if (section == "levels") {
        if (!spec.dipole.empty() || !spec.radiation.empty() || !channels.empty())
          fail("[levels] must precede matrix sections");
        if (toks.size() < 2 || toks.size() > 3) fail("expected `label energy [edge]`");
        spec.levels.push_back({toks[0], number(toks[1])});
        const bool is_edge = toks.size() == 3;
        if (is_edge && toks[2] != "edge") fail("unknown level flag '" + toks[2] + "'");
        any_edge = any_edge || is_edge;
        edge.push_back(is_edge);
      } else if (section == "widths") {
        have_widths = true;
        for (const auto& t : toks) spec.widths.push_back(number(t));
      } else if (section == "initial") {
        if (toks.size() != 1 || !initial_token.empty()) fail("[initial] takes one level index or label");
        initial_token = toks[0];
      } else if (section == "particles") {
        if (toks.size() != 2) fail("expected `charge mass`");
        spec.particles.push_back({number(toks[0]), number(toks[1])});
      } else if (section == "constants") {
        std::string joined;
        for (const auto& t : toks) joined += t + " ";
        const auto eq = joined.find('=');
        if (eq == std::string::npos) fail("expected `key = value`");
        auto key = tokenize(joined.substr(0, eq));
        auto val = tokenize(joined.substr(eq + 1));
        if (key.size() != 1 || val.size() != 1) fail("expected `key = value`");
        const double v = number(val[0]);
        if (key[0] == "hbar") spec.constants.hbar = v;
        else if (key[0] == "c") spec.constants.c = v;
        else if (key[0] == "eps0") spec.constants.eps0 = v;
        else fail("unknown constant '" + key[0] + "'");
      } else {
        if (toks.size() != 4) fail("expected `row col re im`");
        const std::size_t r = index(toks[0]);
        const std::size_t c = index(toks[1]);
        if (r >= current->size() || c >= current->size()) fail("matrix index out of range");
        (*current)(r, c) = cplx(number(toks[2]), number(toks[3]));
      }
    }

    line_ = 0;
    if (spec.levels.empty()) fail("missing [levels]");
    if (!have_widths) spec.widths.assign(spec.levels.size(), 0.0);
    if (spec.widths.size() != spec.levels.size())
      throw Error(ErrorCode::InvariantViolation, "widths: expected one width per level");
    if (any_edge) spec.edge = edge;
    if (spec.particles.empty()) spec.particles.push_back({1.0, 1.0});
    std::size_t expect = 0;
    for (auto& [l, ch] : channels) {
      if (l != expect++) throw Error(ErrorCode::InvariantViolation, "noise_coupling: channel indices must be 0, 1, ...");
      spec.noise_couplings.push_back(std::move(ch));
    }
    if (!initial_token.empty()) {
      if (auto idx = spec.find_level(initial_token)) {
        spec.initial_state = *idx;
      } else {
        spec.initial_state = index(initial_token);
      }
    }
    spec.validate();
    return spec;
  }

 private:
  std::string origin_;
  int line_ = 0;
};

void write_matrix(std::ostream& out, const CMatrix& m) {
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m.size(); ++c) {
      const cplx v = m(r, c);
      if (v == cplx{}) continue;
      out << r << ' ' << c << ' ' << fmt(v.real()) << ' ' << fmt(v.imag()) << '\n';
    }
}

}  // namespace

SystemSpec parse_system(const std::string& text, const std::string& origin) {
  return Parser(origin).parse(text);
}

SystemSpec load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open system file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str(), path.string());
}

std::string format_system(const SystemSpec& spec) {
  std::ostringstream out;
  out << "[constants]\n"
      << "hbar = " << fmt(spec.constants.hbar) << '\n'
      << "c = " << fmt(spec.constants.c) << '\n'
      << "eps0 = " << fmt(spec.constants.eps0) << "\n\n";
  out << "[particles]\n";
  for (const auto& p : spec.particles) out << fmt(p.charge) << ' ' << fmt(p.mass) << '\n';
  out << "\n[levels]\n";
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    out << spec.levels[i].label << ' ' << fmt(spec.levels[i].energy);
    if (!spec.edge.empty() && spec.edge[i]) out << " edge";
    out << '\n';
  }
  out << "\n[widths]\n";
  for (double w : spec.widths) out << fmt(w) << '\n';
  out << "\n[initial]\n" << spec.initial_state << '\n';
  for (std::size_t l = 0; l < spec.noise_couplings.size(); ++l) {
    out << "\n[noise_coupling " << l << ' ' << spec.noise_couplings[l].convention << "]\n";
    write_matrix(out, spec.noise_couplings[l].op);
  }
  for (const auto& d : spec.dipole) {
    out << "\n[dipole " << d.direction << ' ' << d.particle << "]\n";
    write_matrix(out, d.p);
  }
  for (const auto& r : spec.radiation) {
    out << "\n[radiation " << r.direction << "]\n";
    write_matrix(out, r.m);
  }
  return out.str();
}

void save_system(const SystemSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write system file " + path.string());
  out << format_system(spec);
}

}  // namespace nrad
