#include "nrad/quadrature.hpp"

namespace nrad {

std::vector<double> uniform_breakpoints(double a, double b, double max_len) {
  std::vector<double> bp;
  if (!(b > a)) {
    bp = {a, a};
    return bp;
  }
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_len)));
  bp.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) bp.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  bp.back() = b;
  return bp;
}

}  // namespace nrad
