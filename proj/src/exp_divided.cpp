#include "nrad/exp_divided.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nrad {

cplx phi1(cplx z) {
  if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
  // expm1 on the real part keeps precision when Im z = 0.
  if (z.imag() == 0.0) return std::expm1(z.real()) / z.real();
  return (std::exp(z) - 1.0) / z;
}

cplx exp_integral(cplx z, double t) { return t * phi1(z * t); }

cplx exp_divided(cplx z0, cplx z1) { return std::exp(z0) * phi1(z1 - z0); }

cplx exp_divided(cplx z0, cplx z1, cplx z2) {
  const double d01 = std::abs(z1 - z0);
  const double d02 = std::abs(z2 - z0);
  const double d12 = std::abs(z2 - z1);
  const double spread = std::max({d01, d02, d12});
  if (spread < 1.0) {
    // e^m sum_k h_k(z - m) / (k + 2)!, h_k the complete homogeneous polynomial.
    const cplx m = (z0 + z1 + z2) / 3.0;
    const cplx x = z0 - m, y = z1 - m, w = z2 - m;
    // h_1 = x + y + w = 0, so stop on the bound |h_k| <= C(k+2, 2) r^k
    // rather than on a single small term.
    const double r = std::max({std::abs(x), std::abs(y), std::abs(w)});
    cplx h3 = 1.0, h2 = 1.0, wpow = 1.0;  // h_k(x,y,w), h_k(y,w), w^k
    cplx sum = 0.5;
    double fact = 2.0;
    double rpow = 1.0;
    for (int k = 1; k < 60; ++k) {
      wpow *= w;
      h2 = y * h2 + wpow;
      h3 = x * h3 + h2;
      fact *= static_cast<double>(k + 2);
      rpow *= r;
      sum += h3 / fact;
      if (0.5 * (k + 2) * (k + 1) * rpow / fact < 1e-18) break;
    }
    return std::exp(m) * sum;
  }
  // Put the most separated pair at the ends.
  std::array<cplx, 3> z{z0, z1, z2};
  if (d01 >= d02 && d01 >= d12) z = {z0, z2, z1};
  else if (d12 >= d01 && d12 >= d02) z = {z1, z0, z2};
  return (exp_divided(z[1], z[2]) - exp_divided(z[0], z[1])) / (z[2] - z[0]);
}

cplx simplex_exp_integral(cplx a, cplx b, double t) {
  return t * t * exp_divided(cplx(0.0), a * t, (a + b) * t);
}

}  // namespace nrad
