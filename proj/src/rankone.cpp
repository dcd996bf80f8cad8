#include "qnls/rankone.hpp"

#include <cmath>

#include "qnls/errors.hpp"

namespace qnls {

double gaussian_delta(double x, double eps) {
    return std::exp(-x * x / (4.0 * eps)) / (2.0 * std::sqrt(pi * eps));
}

QuadGrid make_ugrid(double T, double tail_tol, double lambda, double eps_reg,
                    int panels, int order, int window_panels) {
    const double L = fermi_halfwidth(T, tail_tol);
    const double w = 14.0 * std::sqrt(eps_reg);  // Gaussian below 1e-16 outside
    const double lo = std::min(-L, lambda - 2.0 * w);
    const double hi = std::max(L, lambda + 2.0 * w);
    std::vector<double> edges;
    auto push_range = [&](double a, double b, int np) {
        for (int i = 0; i < np; ++i) edges.push_back(a + (b - a) * i / np);
    };
    const double wl = std::max(lo, lambda - w);
    const double wr = std::min(hi, lambda + w);
    if (wl > lo) push_range(lo, wl, std::max(4, panels / 2));
    push_range(wl, wr, window_panels);
    if (hi > wr) push_range(wr, hi, std::max(4, panels / 2));
    edges.push_back(hi);
    return gauss_on_edges(edges, order);
}

RegVectors make_vectors(const FieldSet& fs, double lambda, double eps_reg,
                        const QuadGrid& ugrid) {
    if (!(eps_reg > 0.0)) throw ConfigError("make_vectors: eps_reg must be positive");
    RegVectors v;
    v.ugrid = ugrid;
    v.lambda = lambda;
    v.eps_reg = eps_reg;
    const int m = ugrid.size();
    Eigen::VectorXcd zl(m), del(m);
    for (int i = 0; i < m; ++i) {
        const double u = ugrid.nodes[i].real();
        zl(i) = fs.Z(cd(u), cd(lambda));
        del(i) = gaussian_delta(u - lambda, eps_reg);
    }
    cd neps = 0.0;
    for (int i = 0; i < m; ++i) neps += ugrid.weights[i] * zl(i) * zl(i) * del(i);
    v.n_eps = neps;
    v.z_diag = fs.Z(cd(lambda), cd(lambda));
    if (std::abs(neps) < 1e-12 * std::abs(v.z_diag * v.z_diag) || std::abs(neps) < 1e-300)
        throw NumericalError("make_vectors: degenerate regularization, N_eps ~ 0 at lambda=" +
                             std::to_string(lambda));
    const cd a = 1.0 / std::sqrt(v.n_eps * v.z_diag);   // |1>, <2| scale
    const cd b = std::sqrt(v.z_diag / v.n_eps);         // <1|, |2> scale
    v.ket1 = (del.array() * zl.array()).matrix() * a;
    v.bra1 = zl * b;
    v.ket2 = zl * b;
    v.bra2 = (del.array() * zl.array()).matrix() * a;
    return v;
}

RegVectors make_vectors(const FieldSet& fs, double lambda, double eps_reg) {
    return make_vectors(fs, lambda, eps_reg,
                        make_ugrid(1.0, 1e-16, lambda, eps_reg));
}

cd RegVectors::inner(int k) const {
    cd s = 0.0;
    const Eigen::VectorXcd& kt = ket(k);
    const Eigen::VectorXcd& br = bra(k);
    for (int i = 0; i < ugrid.size(); ++i) s += ugrid.weights[i] * br(i) * kt(i);
    return s;
}

Eigen::MatrixXcd BlockRankOne::dense_block(int j, int k) const {
    const int m = vec->ugrid.size();
    Eigen::VectorXcd sw(m);
    for (int i = 0; i < m; ++i) sw(i) = std::sqrt(vec->ugrid.weights[i]);
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(m, m);
    if (j == k) B.setIdentity();
    const cd g = coeff(j, k);
    if (g != cd(0.0)) {
        for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s)
                B(r, s) += g * sw(r) * vec->ket(j)(r) * vec->bra(k)(s) * sw(s);
    }
    return B;
}

Eigen::MatrixXcd BlockRankOne::dense() const {
    const int m = vec->ugrid.size();
    Eigen::MatrixXcd A(2 * m, 2 * m);
    A.topLeftCorner(m, m) = dense_block(1, 1);
    A.topRightCorner(m, m) = dense_block(1, 2);
    A.bottomLeftCorner(m, m) = dense_block(2, 1);
    A.bottomRightCorner(m, m) = dense_block(2, 2);
    return A;
}

cd BlockRankOne::analytic_det() const {
    Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
    const cd n1 = vec->inner(1), n2 = vec->inner(2);
    M(0, 0) += coeff(1, 1) * n1;
    M(0, 1) += coeff(1, 2) * n2;
    M(1, 0) += coeff(2, 1) * n1;
    M(1, 1) += coeff(2, 2) * n2;
    return M.determinant();
}

BlockRankOne rep_hat(const Eigen::Matrix2cd& G, const RegVectors& vec) {
    BlockRankOne op;
    op.numeric = G;
    op.vec = &vec;
    return op;
}

BlockRankOne jump_G(const FieldSet& fs, const ThermoState& th, double lambda,
                    double x, double t, const RegVectors& vec) {
    const double theta = th.theta_at(cd(lambda)).real();
    const cd Z0 = vec.z_diag;
    const cd epsiD = fs.exp_phiD(cd(lambda));
    const cd epsiA = fs.exp_phiA(cd(lambda));
    const cd epsi = fs.exp_psi(cd(lambda));
    const cd etau = std::exp(tau_phase(cd(lambda), x, t));
    Eigen::Matrix2cd G;
    G(0, 0) = 1.0 - theta * Z0 * epsiD;
    G(0, 1) = 2.0 * pi * iu * (theta - 1.0) * Z0 * epsi * etau;
    G(1, 0) = -iu / (2.0 * pi) * theta * Z0 * epsiA * epsiD / (epsi * etau);
    G(1, 1) = 1.0 - theta * Z0 * epsiA;
    return rep_hat(G, vec);
}

double QuasidetReport::max_residual() const {
    return std::max({res_block22, res_block11, res_g22invT});
}

QuasidetReport quasidet_check(const BlockRankOne& G) {
    QuasidetReport rep;
    const Eigen::MatrixXcd G11 = G.dense_block(1, 1);
    const Eigen::MatrixXcd G12 = G.dense_block(1, 2);
    const Eigen::MatrixXcd G21 = G.dense_block(2, 1);
    const Eigen::MatrixXcd G22 = G.dense_block(2, 2);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu11(G11), lu22(G22);
    rep.det_g11 = std::abs(lu11.determinant());
    rep.det_g22 = std::abs(lu22.determinant());
    if (rep.det_g11 < 1e-12 || rep.det_g22 < 1e-12)
        throw SingularityError("quasidet_check: singular diagonal block, |det G11|=" +
                               std::to_string(rep.det_g11) + " |det G22|=" +
                               std::to_string(rep.det_g22));
    const Eigen::MatrixXcd invT11 = G11.transpose().partialPivLu().inverse();
    const Eigen::MatrixXcd invT22 = G22.transpose().partialPivLu().inverse();
    rep.res_block22 = (G22 - G21 * lu11.solve(G12) - invT11).norm();
    rep.res_block11 = (G11 - G12 * lu22.solve(G21) - invT22).norm();
    // closed form: G22 = i - a|2><2|  =>  (G22^T)^{-1} = i + a/(1-a) |1><1|
    const cd a = -G.coeff(2, 2);
    BlockRankOne cf;
    cf.vec = G.vec;
    cf.numeric = Eigen::Matrix2cd::Identity();
    cf.numeric(0, 0) = 1.0 + a / (1.0 - a);
    rep.res_g22invT = (cf.dense_block(1, 1) - invT22).norm();
    return rep;
}

}  // namespace qnls
