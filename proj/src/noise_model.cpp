#include "nrad/noise_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "nrad/error.hpp"

namespace nrad {

namespace {

constexpr double kAsymmetryTol = 1e-9;
constexpr double kRichardsonTol = 1e-8;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Cubic Lagrange interpolation on the even extension of a half table.
double interp_even(const Tabulated& t, double s, bool* out) {
  s = std::abs(s);
  const auto& xs = t.s;
  const auto& ys = t.f;
  const std::size_t n = xs.size();
  if (s > xs.back()) {
    if (out) *out = true;
    return 0.0;
  }
  if (n == 1) return ys[0];
  auto it = std::upper_bound(xs.begin(), xs.end(), s);
  std::size_t k = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (k >= n - 1) k = n - 2;
  if (n < 4) {
    const double w = (s - xs[k]) / (xs[k + 1] - xs[k]);
    return ys[k] * (1.0 - w) + ys[k + 1] * w;
  }
  // Stencil k-1 .. k+2; index -1 mirrors s_1 through the origin.
  std::array<double, 4> nx{}, ny{};
  long start = static_cast<long>(k) - 1;
  if (start + 3 > static_cast<long>(n) - 1) start = static_cast<long>(n) - 4;
  for (int j = 0; j < 4; ++j) {
    const long idx = start + j;
    if (idx < 0) {
      nx[j] = -xs[static_cast<std::size_t>(-idx)];
      ny[j] = ys[static_cast<std::size_t>(-idx)];
    } else {
      nx[j] = xs[static_cast<std::size_t>(idx)];
      ny[j] = ys[static_cast<std::size_t>(idx)];
    }
  }
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j)
      if (j != i) w *= (s - nx[j]) / (nx[i] - nx[j]);
    acc += w * ny[i];
  }
  return acc;
}

double kind_correlation(const NoiseKind& kind, double s, bool* out) {
  return std::visit(
      overloaded{
          [](const White&) -> double {
            throw Error(ErrorCode::PointwiseUndefined,
                        "white-noise correlation is a delta distribution");
          },
          [s](const Exponential& e) { return std::exp(-std::abs(s) / e.tau) / (2.0 * e.tau); },
          [s](const GaussianCorr& g) {
            return std::exp(-(s * s) / (g.tau * g.tau)) / (g.tau * std::sqrt(std::numbers::pi));
          },
          [s, out](const Tabulated& t) { return interp_even(t, s, out); },
      },
      kind);
}

double term_density(const NoiseKind& kind, double w) {
  return std::visit(overloaded{
                        [](const White&) { return 1.0; },
                        [w](const Exponential& e) { return 1.0 / (1.0 + w * w * e.tau * e.tau); },
                        [w](const GaussianCorr& g) { return std::exp(-w * w * g.tau * g.tau / 4.0); },
                        [w](const Tabulated& t) { return tabulated_transform(t, w); },
                    },
                    kind);
}

double trapezoid_cos(const std::vector<double>& xs, const std::vector<double>& ys, double w,
                     std::size_t stride) {
  double acc = 0.0;
  std::size_t prev = 0;
  for (std::size_t i = stride; i < xs.size(); i += stride) {
    const double h = xs[i] - xs[prev];
    acc += 0.5 * h * (ys[prev] * std::cos(w * xs[prev]) + ys[i] * std::cos(w * xs[i]));
    prev = i;
  }
  return 2.0 * acc;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
}

}  // namespace

double tabulated_transform(const Tabulated& table, double omega) {
  const auto& xs = table.s;
  const auto& ys = table.f;
  if (xs.size() < 2) return 0.0;
  const double fine = trapezoid_cos(xs, ys, omega, 1);
  // Richardson check needs the coarse grid to end on the same node.
  if (xs.size() >= 5 && (xs.size() - 1) % 2 == 0) {
    const double coarse = trapezoid_cos(xs, ys, omega, 2);
    const double est = std::abs(fine - coarse) / 3.0;
    if (est > kRichardsonTol) {
      std::ostringstream msg;
      msg << "trapezoid transform at omega=" << omega << " has Richardson error estimate " << est;
      throw Error(ErrorCode::QuadratureNonConvergent, msg.str());
    }
  }
  return fine;
}

NoiseModel NoiseModel::white(double scale) {
  NoiseModel m;
  m.terms_.push_back({White{}, scale});
  return m;
}

NoiseModel NoiseModel::exponential(double tau, double scale) {
  require_positive(tau, "exponential tau");
  NoiseModel m;
  m.terms_.push_back({Exponential{tau}, scale});
  return m;
}

NoiseModel NoiseModel::gaussian(double tau, double scale) {
  require_positive(tau, "gaussian tau");
  NoiseModel m;
  m.terms_.push_back({GaussianCorr{tau}, scale});
  return m;
}

NoiseModel NoiseModel::tabulated(std::vector<double> s, std::vector<double> f, double scale) {
  if (s.size() != f.size() || s.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "tabulated correlation needs >= 2 (s, f) pairs");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "tabulated s values must be strictly increasing");

  Tabulated half;
  if (s.front() >= 0.0) {
    if (s.front() != 0.0)
      throw Error(ErrorCode::InvalidArgument, "half table must start at s = 0");
    half.s = std::move(s);
    half.f = std::move(f);
  } else {
    Tabulated full{s, f};
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    const double smax = std::min(-s.front(), s.back());
    // Raw lookup on the full (not yet symmetric) table.
    auto lookup = [&full](double x) {
      auto it = std::lower_bound(full.s.begin(), full.s.end(), x);
      std::size_t k = static_cast<std::size_t>(it - full.s.begin());
      if (k < full.s.size() && full.s[k] == x) return full.f[k];
      if (k == 0) k = 1;
      if (k >= full.s.size()) k = full.s.size() - 1;
      const double w = (x - full.s[k - 1]) / (full.s[k] - full.s[k - 1]);
      return full.f[k - 1] * (1.0 - w) + full.f[k] * w;
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s[i]) > smax) continue;
      const double mirror = lookup(-s[i]);
      if (std::abs(mirror - f[i]) > kAsymmetryTol * std::max(fmax, 1e-300))
        throw Error(ErrorCode::InvariantViolation,
                    "tabulated correlation is not even at s=" + std::to_string(s[i]));
    }
    half.s.push_back(0.0);
    half.f.push_back(lookup(0.0));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] > 0.0 && s[i] <= smax) {
        half.s.push_back(s[i]);
        half.f.push_back(0.5 * (f[i] + lookup(-s[i])));
      }
    }
  }
  NoiseModel m;
  m.terms_.push_back({std::move(half), scale});
  return m;
}

NoiseModel NoiseModel::load_tabulated(const std::filesystem::path& path, double scale) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open correlation file " + path.string());
  std::vector<double> s, f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b))
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": expected two numbers `s f(s)`");
    std::string rest;
    if (ls >> rest)
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": trailing token '" + rest + "'");
    if (!s.empty() && !(a > s.back()))
      throw Error(ErrorCode::ParseError,
                  path.string() + ":" + std::to_string(lineno) + ": s must be strictly increasing");
    s.push_back(a);
    f.push_back(b);
  }
  return tabulated(std::move(s), std::move(f), scale);
}

NoiseModel NoiseModel::operator+(const NoiseModel& other) const {
  NoiseModel m = *this;
  m.terms_.insert(m.terms_.end(), other.terms_.begin(), other.terms_.end());
  return m;
}

NoiseModel NoiseModel::scaled(double c) const {
  NoiseModel m = *this;
  for (auto& t : m.terms_) t.scale *= c;
  return m;
}

bool NoiseModel::has_white() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const NoiseTerm& t) { return std::holds_alternative<White>(t.kind); });
}

bool NoiseModel::is_white() const {
  return !terms_.empty() &&
         std::all_of(terms_.begin(), terms_.end(),
                     [](const NoiseTerm& t) { return std::holds_alternative<White>(t.kind); });
}

double NoiseModel::white_weight() const {
  double w = 0.0;
  for (const auto& t : terms_)
    if (std::holds_alternative<White>(t.kind)) w += t.scale;
  return w;
}

double NoiseModel::correlation(double s, bool* out_of_support) const {
  if (has_white())
    throw Error(ErrorCode::PointwiseUndefined, "white-noise correlation is a delta distribution");
  return smooth_correlation(s, out_of_support);
}

double NoiseModel::smooth_correlation(double s, bool* out_of_support) const {
  if (out_of_support) *out_of_support = false;
  double acc = 0.0;
  for (const auto& t : terms_) {
    if (std::holds_alternative<White>(t.kind)) continue;
    acc += t.scale * kind_correlation(t.kind, s, out_of_support);
  }
  return acc;
}

double NoiseModel::spectral_density(double omega) const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.scale * term_density(t.kind, omega);
  return acc;
}

double NoiseModel::correlation_cutoff() const {
  double cut = 0.0;
  for (const auto& t : terms_) {
    cut = std::max(cut, std::visit(overloaded{
                                       [](const White&) { return 0.0; },
                                       [](const Exponential& e) { return 40.0 * e.tau; },
                                       [](const GaussianCorr& g) { return 6.5 * g.tau; },
                                       [](const Tabulated& tb) { return tb.s.back(); },
                                   },
                                   t.kind));
  }
  return cut;
}

double NoiseModel::correlation_time() const {
  double tc = std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) {
    tc = std::min(tc, std::visit(overloaded{
                                     [](const White&) { return std::numeric_limits<double>::infinity(); },
                                     [](const Exponential& e) { return e.tau; },
                                     [](const GaussianCorr& g) { return g.tau; },
                                     [](const Tabulated& tb) {
                                       const double f0 = std::abs(tb.f.front());
                                       for (std::size_t i = 0; i < tb.s.size(); ++i)
                                         if (std::abs(tb.f[i]) < f0 / std::numbers::e)
                                           return std::max(tb.s[i], tb.s[1]);
                                       return tb.s.back();
                                     },
                                 },
                                 t.kind));
  }
  return tc;
}

std::string NoiseModel::describe() const {
  std::ostringstream out;
  out.precision(10);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out << '+';
    const auto& t = terms_[i];
    std::visit(overloaded{
                   [&out](const White&) { out << "white"; },
                   [&out](const Exponential& e) { out << "exponential(tau=" << e.tau; },
                   [&out](const GaussianCorr& g) { out << "gaussian(tau=" << g.tau; },
                   [&out](const Tabulated& tb) { out << "tabulated(n=" << tb.s.size(); },
               },
               t.kind);
    const bool white = std::holds_alternative<White>(t.kind);
    if (t.scale != 1.0) out << (white ? "(scale=" : ",scale=") << t.scale;
    if (!white) out << ')';
    else if (t.scale != 1.0) out << ')';
  }
  return out.str();
}

double term_correlation(const NoiseTerm& term, double s, bool* out_of_support) {
  return term.scale * kind_correlation(term.kind, s, out_of_support);
}

double eval_correlation(const NoiseModel& model, double s, bool* out_of_support) {
  return model.correlation(s, out_of_support);
}

double spectral_density(const NoiseModel& model, double omega) {
  return model.spectral_density(omega);
}

AdmissibilityReport validate_admissible(const NoiseModel& model, std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "admissibility grid is empty");
  AdmissibilityReport rep;
  rep.samples.reserve(grid.size());
  for (double w : grid) {
    const double v = model.spectral_density(w);
    rep.samples.push_back({w, v});
    if (v < -1e-9 || !std::isfinite(v)) {
      rep.negative_points.push_back({w, v});
      rep.admissible = false;
    }
  }
  return rep;
}

}  // namespace nrad
