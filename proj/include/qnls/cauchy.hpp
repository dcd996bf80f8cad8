#ifndef QNLS_CAUCHY_HPP
#define QNLS_CAUCHY_HPP

#include <functional>

#include <Eigen/Dense>

#include "qnls/quadrature.hpp"

namespace qnls {

// Cauchy integral  (-1/2pi i) \int f(mu)/(mu - z) dmu  over the discretized
// contour. Far from the contour plain quadrature is used. Within two local
// node spacings the singular part is subtracted: the value f* interpolated at
// the nearest contour point is removed and  \int dmu/(mu-z)  is summed
// analytically panel by panel, so boundary values may be taken at offsets
// z = mu_0 +- i*delta with delta far below the node spacing.
cd cauchy_eval(const std::vector<cd>& fvals, const QuadGrid& grid, cd z);

// \int dmu/(mu - z) over the whole contour, analytic per panel.
cd contour_log_sum(const QuadGrid& grid, cd z);

// det( delta_ij + sqrt(w_i w_j) K(u_i,u_j) )
cd nystrom_det(const std::function<cd(cd, cd)>& kernel, const QuadGrid& grid);
cd nystrom_det(const Eigen::MatrixXcd& kernel_values, const QuadGrid& grid);

}  // namespace qnls

#endif
