#ifndef QNLS_RANKONE_HPP
#define QNLS_RANKONE_HPP

#include <Eigen/Dense>

#include "qnls/fields.hpp"
#include "qnls/quadrature.hpp"
#include "qnls/thermo.hpp"

namespace qnls {

// Regularized basis vectors on an auxiliary u-grid:
//   |1> = d_eps(u-l) Z(u,l) / sqrt(N_eps Z(l,l)),   <1| = sqrt(Z(l,l)/N_eps) Z(v,l)
//   |2> = sqrt(Z(l,l)/N_eps) Z(u,l),                <2| = d_eps(v-l) Z(v,l) / sqrt(N_eps Z(l,l))
// with d_eps a Gaussian of mass 1 and N_eps = \int Z^2(u,l) d_eps(u-l) du,
// so that <1|1> = <2|2> = 1 and (|1><1|)^T = |2><2| hold by construction.
struct RegVectors {
    QuadGrid ugrid;
    double lambda = 0.0;
    double eps_reg = 0.0;
    cd n_eps = 0.0;      // N_eps(lambda)
    cd z_diag = 0.0;     // Z(lambda,lambda)
    Eigen::VectorXcd ket1, bra1, ket2, bra2;

    const Eigen::VectorXcd& ket(int j) const { return j == 1 ? ket1 : ket2; }
    const Eigen::VectorXcd& bra(int k) const { return k == 1 ? bra1 : bra2; }
    cd inner(int k) const;  // <k|k> by quadrature
};

double gaussian_delta(double x, double eps);

// u-grid: the lambda-side grid plus a refined window around lambda wide
// enough to capture the Gaussian to ~1e-16.
QuadGrid make_ugrid(double T, double tail_tol, double lambda, double eps_reg,
                    int panels = 48, int order = 16, int window_panels = 24);

RegVectors make_vectors(const FieldSet& fs, double lambda, double eps_reg,
                        const QuadGrid& ugrid);
RegVectors make_vectors(const FieldSet& fs, double lambda, double eps_reg);

// Identity-plus-finite-rank block operator: block (j,k) is
// i*delta_jk + coeff(j,k) |j><k|.
struct BlockRankOne {
    Eigen::Matrix2cd numeric;  // the 2x2 image matrix G; coeff = G - I
    const RegVectors* vec = nullptr;

    cd coeff(int j, int k) const {
        return numeric(j - 1, k - 1) - (j == k ? 1.0 : 0.0);
    }
    // dense 2m x 2m realization with symmetric sqrt(w_i w_j) weighting
    Eigen::MatrixXcd dense() const;
    // one m x m block
    Eigen::MatrixXcd dense_block(int j, int k) const;
    cd analytic_det() const;  // det(I2 + (G-I2) diag(<1|1>,<2|2>)) = det G
};

// G -> \hat G = i*delta_jk + |j>(G_jk - delta_jk)<k|
BlockRankOne rep_hat(const Eigen::Matrix2cd& G, const RegVectors& vec);

// dispersion phase tau = i t lambda^2 - i x lambda
inline cd tau_phase(cd lambda, double x, double t) {
    return iu * t * lambda * lambda - iu * x * lambda;
}

// Regularized jump operator at real lambda: the numeric part of the four
// rank-one blocks, with Fermi weight, Z(l,l) and the field exponents exactly
// as they multiply |j><k|.
BlockRankOne jump_G(const FieldSet& fs, const ThermoState& th, double lambda,
                    double x, double t, const RegVectors& vec);

struct QuasidetReport {
    double res_block22 = 0.0;   // G22 - G21 G11^{-1} G12 - (G11^T)^{-1}
    double res_block11 = 0.0;   // G11 - G12 G22^{-1} G21 - (G22^T)^{-1}
    double res_g22invT = 0.0;   // closed form of (G22^T)^{-1} vs dense inverse
    double det_g11 = 0.0, det_g22 = 0.0;
    double max_residual() const;
};

QuasidetReport quasidet_check(const BlockRankOne& G);

}  // namespace qnls

#endif
