#pragma once

#include <complex>

namespace nrad {

using cplx = std::complex<double>;

/// (e^z - 1) / z with a 4th-order Taylor branch for |z| < 1e-4.
cplx phi1(cplx z);

/// \int_0^t e^{z u} du = (e^{z t} - 1) / z, finite at z = 0.
cplx exp_integral(cplx z, double t);

/// Divided differences of exp. All are finite for coincident nodes.
cplx exp_divided(cplx z0, cplx z1);
cplx exp_divided(cplx z0, cplx z1, cplx z2);

/// \int_{0 <= t2 <= t1 <= t} e^{a t1 + b t2} dt2 dt1.
cplx simplex_exp_integral(cplx a, cplx b, double t);

}  // namespace nrad
