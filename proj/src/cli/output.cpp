#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "nrad/cli.hpp"
#include "nrad/error.hpp"

namespace nrad::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void header(std::ostringstream& out, const std::string& mode, const EmissionSpectrum& s) {
  out << "# mode=" << mode << ", units=" << s.units << ", jacobian=" << s.jacobian << '\n';
  for (const auto& w : s.warnings) out << "# warning: " << w << '\n';
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string spectrum_csv(const EmissionSpectrum& s) {
  std::ostringstream out;
  header(out, to_string(s.mode), s);
  out << "k,dGamma_dk\n";
  for (const auto& p : s.points) out << format_number(p.k) << ',' << format_number(p.dGamma_dk) << '\n';
  return out.str();
}

std::string compare_csv(const EmissionSpectrum& regularized, const EmissionSpectrum& naive) {
  if (regularized.points.size() != naive.points.size())
    throw Error(ErrorCode::InvariantViolation, "compare: spectra have different grids");
  EmissionSpectrum meta = regularized;
  for (const auto& w : naive.warnings)
    if (std::find(meta.warnings.begin(), meta.warnings.end(), w) == meta.warnings.end()) meta.warnings.push_back(w);
  std::ostringstream out;
  header(out, "compare", meta);
  out << "k,regularized,naive,difference\n";
  for (std::size_t q = 0; q < naive.points.size(); ++q) {
    const double r = regularized.points[q].dGamma_dk;
    const double n = naive.points[q].dGamma_dk;
    out << format_number(regularized.points[q].k) << ',' << format_number(r) << ',' << format_number(n) << ','
        << format_number(n - r) << '\n';
  }
  return out.str();
}

std::string svg_plot(const std::vector<SvgSeries>& series, bool log_y, const std::string& title) {
  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t q = 0; q < s.x.size(); ++q) {
      if (log_y && !(s.y[q] > 0.0)) continue;
      x0 = std::min(x0, s.x[q]);
      x1 = std::max(x1, s.x[q]);
      y0 = std::min(y0, ty(s.y[q]));
      y1 = std::max(y1, ty(s.y[q]));
    }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const double pw = kWidth - 2.0 * kMargin;
  const double ph = kHeight - 2.0 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kHeight - kMargin - (ty(y) - y0) / (y1 - y0) * ph; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\" font-size=\"10\">" << coord(x0)
      << "</text>\n"
      << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"end\" font-size=\"10\">" << coord(x1) << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\" font-size=\"10\">"
      << (log_y ? "1e" : "") << coord(y0) << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin << "\" text-anchor=\"end\" font-size=\"10\">"
      << (log_y ? "1e" : "") << coord(y1) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kColors[s % 4];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t q = 0; q < ser.x.size(); ++q) {
      if (log_y && !(ser.y[q] > 0.0)) continue;
      if (!first) out << ' ';
      out << coord(px(ser.x[q])) << ',' << coord(py(ser.y[q]));
      first = false;
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin + 14.0 * static_cast<double>(s)
        << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace nrad::cli
