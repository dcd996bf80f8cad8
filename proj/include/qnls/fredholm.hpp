#ifndef QNLS_FREDHOLM_HPP
#define QNLS_FREDHOLM_HPP

#include <Eigen/Dense>

#include "qnls/fields.hpp"
#include "qnls/quadrature.hpp"
#include "qnls/thermo.hpp"

namespace qnls {

struct KernelConfig {
    FieldSet fields;
    ThermoState thermo;
    double x = 0.0;
    double t = 1.0;
    double eps_reg = 0.01;
    // +-i0 realized as contour shifts by eta = pv_offset_factor * (local node
    // spacing). The deformation is exact for the analytic integrand; the
    // factor trades Lorentzian resolvability (wants eta large) against the
    // e^{2 t eta L} growth of the continued dispersion factor (wants eta
    // small). Two spacings is the measured sweet spot: the growth exponent
    // then stays fixed along the t-scaled grids.
    double pv_offset_factor = 2.0;
    double tail_tol = 1e-16;
    double theta_scale = 1.0;  // multiplies the Fermi weight in the kernel
    int order = 16;
    int min_panels = 24;
    int forced_panels = 0;  // 0 = auto-size from the oscillation rule
};

// E_-(lambda|u) on the u-grid:
//   (1/2pi) Z(u,lambda) Z(l,l) sqrt(theta/N_eps) e^{(phiA+phiD-psi-tau)/2}
Eigen::VectorXcd E_minus(const KernelConfig& cfg, double lambda, const QuadGrid& ugrid);

// E_+ = E * E_-, with the double-integral factor E evaluated through the
// +-i0 prescription (regularized Gaussian smearing, principal-value poles).
// swap_i0 flips the two prescriptions (diagnostic only).
Eigen::VectorXcd E_plus(const KernelConfig& cfg, double lambda, const QuadGrid& ugrid,
                        bool swap_i0 = false);

// Pointwise kernel value by the direct route: the u-integral of
// (E+(l)E-(m) - E-(l)E+(m)) over (l-m), diagonal by the analytic limit with
// numerically differentiated E's. Slow; used as the cross-check of the
// assembled path.
cd kernel_V(const KernelConfig& cfg, double lambda, double mu);

struct DetResult {
    cd det = 1.0;
    cd logdet = 0.0;
    cd det_kt = 1.0;   // det(I - K_T/2pi), time independent
    int n_nodes = 0;
    int panels = 0;
    double eta = 0.0;  // contour shift actually used
};

// Kernel matrix of the assembled (swapped) representation on the
// oscillation-resolving grid; fills the grid actually used.
Eigen::MatrixXcd assemble_V_matrix(const KernelConfig& cfg, QuadGrid* grid_out = nullptr,
                                   double* eta_out = nullptr);

// Nystrom determinant of I + V on the oscillation-resolving grid. The kernel
// is assembled in the swapped representation
//   V(l,m) = C(l) C(m) \int g(xi) W(xi,l) W(xi,m)
//              [ e^{-phiD}/((xi-l-i0)(xi-m-i0)) + e^{-phiA}/((xi-l+i0)(xi-m+i0)) ] dxi
// which reduces to two rank-n Gram products on the two shifted lines.
DetResult det_V(const KernelConfig& cfg);

// det(I - K_T/2pi) alone (no x,t dependence)
cd det_KT(const KernelConfig& cfg);

// central finite difference of ln det(I+V) in x
cd logdet_derivative_x(const KernelConfig& cfg, double dx);

// node count demanded by the phase rule (<= pi/2 of dispersion phase per node)
int oscillation_nodes(const KernelConfig& cfg);

}  // namespace qnls

#endif
