#ifndef QNLS_PCF_HPP
#define QNLS_PCF_HPP

#include <utility>

#include "qnls/quadrature.hpp"

namespace qnls {

// Gamma function for complex argument, Lanczos approximation with reflection
// for Re z < 1/2. Relative accuracy ~1e-13 on the tested range.
cd gamma_complex(cd z);

enum class PcfMethod { series, ode, asymptotic };

struct PcfValue {
    cd value;
    cd derivative;
    PcfMethod method = PcfMethod::series;
};

// Parabolic cylinder function D_nu(xi) for complex order and argument,
// solving  D'' + (nu + 1/2 - xi^2/4) D = 0  with D_nu ~ xi^nu e^{-xi^2/4}
// as xi -> +inf.  Method by region:
//   |xi| <= 5   Kummer-series representation
//   |xi| >= 12  compound asymptotic expansion with sector-dependent
//               connection coefficient
//   in between  Taylor-series ODE marching along the ray, started from
//               whichever end makes the wanted solution non-recessive
// Documented envelope |nu| <= 10, |xi| <= 100.
PcfValue pcf_D(cd nu, cd xi);

PcfValue pcf_D_series(cd nu, cd xi);
PcfValue pcf_D_asymptotic(cd nu, cd xi);
// Independent oracle: march the Weber equation from xi=0 with the
// closed-form seeds D_nu(0), D_nu'(0). Reliable for |xi| <= 5.
PcfValue pcf_D_ode_from_origin(cd nu, cd xi);

// Second derivative evaluated termwise from the series/asymptotic
// representation (not by finite differences, not via the Weber equation).
cd pcf_D_second(cd nu, cd xi);

// Residuals of  D' + (xi/2) D - nu D_{nu-1}  and  D' - (xi/2) D + D_{nu+1}.
std::pair<cd, cd> recurrence_residuals(cd nu, cd xi);

// The two scalar branches whose rank-one combination realizes the
// operator-indexed function: (orthogonal branch D_0, parallel branch D_nu).
std::pair<cd, cd> operator_indexed_D(cd nu, cd xi);

}  // namespace qnls

#endif
