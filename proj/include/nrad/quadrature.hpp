#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "nrad/error.hpp"

namespace nrad {

using cplx = std::complex<double>;

/// Pairwise (tree) summation. The result depends only on the element order,
/// never on how the values were produced.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.empty()) return T{};
  if (v.size() <= 8) {
    T acc{};
    for (const auto& x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
  int max_intervals = 50000;
  /// Throw QuadratureNonConvergent when the tolerance is not met.
  bool throw_on_failure = true;
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (positive half, centre last).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cplx& x) { return std::abs(x); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const T f1 = f(c - dx);
    const T f2 = f(c + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of a real or complex
/// integrand over the intervals delimited by `breakpoints` (ascending).
template <class T, class F>
QuadResult<T> integrate(F&& f, std::span<const double> breakpoints,
                        const QuadOptions& opt = {}) {
  QuadResult<T> out;
  if (breakpoints.size() < 2) return out;
  std::priority_queue<detail::Panel<T>> heap;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i])
      heap.push(detail::gk15<T>(f, breakpoints[i], breakpoints[i + 1]));
  }
  if (heap.empty()) return out;

  auto totals = [&heap]() {
    // Final sum runs over panels in abscissa order.
    auto copy = heap;
    std::vector<detail::Panel<T>> panels;
    panels.reserve(copy.size());
    while (!copy.empty()) {
      panels.push_back(copy.top());
      copy.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    std::vector<T> vals;
    std::vector<double> errs;
    vals.reserve(panels.size());
    errs.reserve(panels.size());
    for (const auto& p : panels) {
      vals.push_back(p.value);
      errs.push_back(p.error);
    }
    return std::pair<T, double>(pairwise_sum(vals), pairwise_sum(errs));
  };

  T value{};
  double error = 0.0;
  double err_sum = 0.0;
  T val_sum{};
  {
    auto copy = heap;
    while (!copy.empty()) {
      val_sum += copy.top().value;
      err_sum += copy.top().error;
      copy.pop();
    }
  }
  int n = static_cast<int>(heap.size());
  while (true) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(val_sum));
    if (err_sum <= tol) break;
    if (n >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      heap.push(worst);
      break;
    }
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    val_sum += left.value + right.value - worst.value;
    err_sum += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  std::tie(value, error) = totals();
  out.value = value;
  out.error = error;
  out.intervals = n;
  if (!out.converged && opt.throw_on_failure) {
    throw Error(ErrorCode::QuadratureNonConvergent,
                "adaptive quadrature stopped at " + std::to_string(n) +
                    " intervals with error estimate " + std::to_string(error));
  }
  return out;
}

template <class T, class F>
QuadResult<T> integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const std::array<double, 2> bp{a, b};
  return integrate<T>(std::forward<F>(f), std::span<const double>(bp), opt);
}

/// Splits [a, b] into panels no longer than `max_len` so that oscillatory
/// integrands start from a resolved partition.
std::vector<double> uniform_breakpoints(double a, double b, double max_len);

}  // namespace nrad
