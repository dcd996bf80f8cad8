#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "qnls/errors.hpp"
#include "qnls/rankone.hpp"

using namespace qnls;

namespace {

// coarse auxiliary grid: fast enough for dense 2m x 2m work in unit tests
QuadGrid test_ugrid(double lambda, double eps) {
    return make_ugrid(1.0, 1e-16, lambda, eps, 12, 8, 10);
}

}  // namespace

TEST_CASE("make_vectors: normalization <1|1> = <2|2> = 1") {
    FieldSet fs = test::valid_fields();
    const double lambda = 0.4, eps = 0.01;
    RegVectors v = make_vectors(fs, lambda, eps, test_ugrid(lambda, eps));
    CHECK(std::abs(v.inner(1) - 1.0) < 1e-10);
    CHECK(std::abs(v.inner(2) - 1.0) < 1e-10);
}

TEST_CASE("make_vectors: zero fields give N_eps ~ Z(l,l)^2 = 4") {
    FieldSet fs = test::zero_fields(50.0);
    const double lambda = 0.0, eps = 0.01;
    RegVectors v = make_vectors(fs, lambda, eps, test_ugrid(lambda, eps));
    CHECK(std::abs(v.z_diag - 2.0) < 1e-12);
    CHECK(std::abs(v.n_eps - 4.0) < 1e-4);  // corrections O(eps/c^2)
    // narrower coupling: visible but controlled deviation
    FieldSet fs2 = test::zero_fields(2.0);
    RegVectors v2 = make_vectors(fs2, lambda, eps, test_ugrid(lambda, eps));
    CHECK(std::abs(v2.n_eps - 4.0) < 0.05);
    CHECK(std::abs(v2.inner(1) - 1.0) < 1e-10);
}

TEST_CASE("make_vectors: bra1 shape independent of eps_reg") {
    FieldSet fs = test::valid_fields();
    const double lambda = 0.7;
    QuadGrid ug = test_ugrid(lambda, 0.01);
    RegVectors a = make_vectors(fs, lambda, 0.01, ug);
    RegVectors b = make_vectors(fs, lambda, 0.001, ug);
    // <1| = sqrt(Z/N_eps) Z(v,l): only the overall normalization moves
    const cd ratio = a.bra1(0) / b.bra1(0);
    for (int i = 0; i < ug.size(); i += 17)
        CHECK(std::abs(a.bra1(i) / b.bra1(i) - ratio) < 1e-10 * std::abs(ratio));
}

TEST_CASE("make_vectors: transpose pairing is exact by construction") {
    FieldSet fs = test::valid_fields();
    RegVectors v = make_vectors(fs, -0.3, 0.01, test_ugrid(-0.3, 0.01));
    for (int i = 0; i < v.ugrid.size(); i += 29)
        for (int j = 0; j < v.ugrid.size(); j += 31) {
            // (|1><1|)(i,j) == (|2><2|)(j,i)
            CHECK(std::abs(v.ket1(i) * v.bra1(j) - v.ket2(j) * v.bra2(i)) < 1e-16);
        }
}

TEST_CASE("rep_hat: identity maps to identity") {
    FieldSet fs = test::valid_fields();
    RegVectors v = make_vectors(fs, 0.1, 0.01, test_ugrid(0.1, 0.01));
    BlockRankOne op = rep_hat(Eigen::Matrix2cd::Identity(), v);
    const int m = v.ugrid.size();
    CHECK((op.dense() - Eigen::MatrixXcd::Identity(2 * m, 2 * m)).norm() == 0.0);
}

TEST_CASE("rep_hat: composition and inverse in the dense realization") {
    FieldSet fs = test::valid_fields();
    RegVectors v = make_vectors(fs, 0.1, 0.01, test_ugrid(0.1, 0.01));
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rnd = [&] {
        Eigen::Matrix2cd G;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) G(r, c) = cd(U(rng), U(rng));
        return G;
    };
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::Matrix2cd G = rnd(), H = rnd();
        const Eigen::MatrixXcd lhs = rep_hat(G, v).dense() * rep_hat(H, v).dense();
        const Eigen::MatrixXcd rhs = rep_hat(G * H, v).dense();
        CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
        // rep(G) rep(G^-1) = identity
        const Eigen::MatrixXcd prod =
            rep_hat(G, v).dense() * rep_hat(G.inverse(), v).dense();
        const int m = v.ugrid.size();
        CHECK((prod - Eigen::MatrixXcd::Identity(2 * m, 2 * m)).norm() < 1e-10);
    }
}

TEST_CASE("rep_hat: determinant preservation det rep(G) = det G") {
    FieldSet fs = test::valid_fields();
    RegVectors v = make_vectors(fs, 0.25, 0.01, test_ugrid(0.25, 0.01));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Matrix2cd G;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) G(r, c) = cd(U(rng), U(rng));
        BlockRankOne op = rep_hat(G, v);
        const cd dg = G.determinant();
        const cd dense_det =
            Eigen::PartialPivLU<Eigen::MatrixXcd>(op.dense()).determinant();
        CHECK(std::abs(dense_det - dg) < 1e-8 * std::abs(dg));
        CHECK(std::abs(op.analytic_det() - dg) < 1e-9 * std::abs(dg));
    }
}

TEST_CASE("jump_G: theta = 0 leaves an upper-triangular jump") {
    FieldSet fs = test::valid_fields();
    // T small and h<0 so theta ~ 0 on the grid
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 0.05}, 32, 8);
    RegVectors v = make_vectors(fs, 0.0, 0.01, test_ugrid(0.0, 0.01));
    BlockRankOne G = jump_G(fs, th, 0.0, 0.3, 0.7, v);
    CHECK(std::abs(G.coeff(1, 1)) < 1e-8);
    CHECK(std::abs(G.coeff(2, 1)) < 1e-8);
    CHECK(std::abs(G.coeff(2, 2)) < 1e-8);
    CHECK(std::abs(G.coeff(1, 2)) > 1e-2);  // 2pi i (theta-1) Z e^{psi+tau} |1><2|
    const cd expected =
        2.0 * pi * iu * (0.0 - 1.0) * v.z_diag * fs.exp_psi(cd(0.0)) *
        std::exp(tau_phase(cd(0.0), 0.3, 0.7));
    CHECK(std::abs(G.coeff(1, 2) - expected) < 1e-6 * std::abs(expected));
}

TEST_CASE("jump_G: diagonal determinants match the closed forms") {
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 1.0}, 48, 12);
    const double lambda = 0.6;
    RegVectors v = make_vectors(fs, lambda, 0.01, test_ugrid(lambda, 0.01));
    BlockRankOne G = jump_G(fs, th, lambda, 1.0, 2.0, v);
    const double theta = th.theta_at(cd(lambda)).real();
    // det G11 = 1 + coeff * <1|1> should equal 1 - theta (1 + e^{-phi})
    const cd det11 = 1.0 + G.coeff(1, 1) * v.inner(1);
    CHECK(std::abs(det11 - det_G11_22(fs, theta, cd(lambda), 11)) < 1e-10);
    const cd det22 = 1.0 + G.coeff(2, 2) * v.inner(2);
    CHECK(std::abs(det22 - det_G11_22(fs, theta, cd(lambda), 22)) < 1e-10);
}

TEST_CASE("jump_G: x = t = 0 removes the dispersion phase") {
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 1.0}, 32, 8);
    RegVectors v = make_vectors(fs, 0.2, 0.01, test_ugrid(0.2, 0.01));
    BlockRankOne a = jump_G(fs, th, 0.2, 0.0, 0.0, v);
    const cd tauless = 2.0 * pi * iu * (th.theta_at(cd(0.2)).real() - 1.0) * v.z_diag *
                       fs.exp_psi(cd(0.2));
    CHECK(std::abs(a.coeff(1, 2) - tauless) < 1e-12 * std::abs(tauless));
}

TEST_CASE("quasidet identities and the closed-form transpose inverse") {
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 1.0}, 48, 12);
    const double lambda = 0.45;
    RegVectors v = make_vectors(fs, lambda, 0.01, test_ugrid(lambda, 0.01));
    BlockRankOne G = jump_G(fs, th, lambda, 0.8, 1.6, v);
    QuasidetReport rep = quasidet_check(G);
    CHECK(rep.res_block22 < 1e-8);
    CHECK(rep.res_block11 < 1e-8);
    CHECK(rep.res_g22invT < 1e-8);
}

TEST_CASE("quasidet: theta = 0 degenerate case") {
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 0.05}, 32, 8);
    RegVectors v = make_vectors(fs, 0.0, 0.01, test_ugrid(0.0, 0.01));
    QuasidetReport rep = quasidet_check(jump_G(fs, th, 0.0, 0.5, 1.0, v));
    CHECK(rep.max_residual() < 1e-8);
}

TEST_CASE("jump determinant product formula across the saddle") {
    // assembled from the closed forms: det = (1-theta(1+e^{phi sgn(l-l0)}))^{sgn(l0-l)}
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 1.0}, 48, 12);
    const double l0 = 0.3;
    for (double lambda : {-0.8, 1.2}) {
        const double theta = th.theta_at(cd(lambda)).real();
        const cd d11 = det_G11_22(fs, theta, cd(lambda), 11);
        const cd d22 = det_G11_22(fs, theta, cd(lambda), 22);
        const cd assembled = lambda < l0 ? d11 : 1.0 / d22;
        const double s = lambda < l0 ? 1.0 : -1.0;
        const cd ephi = std::pow(fs.exp_phi(cd(lambda)), -s);
        const cd direct = std::pow(1.0 - theta * (1.0 + ephi), s);
        CHECK(std::abs(assembled - direct) < 1e-12);
    }
}
