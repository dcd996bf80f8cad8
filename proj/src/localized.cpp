#include "qnls/localized.hpp"

#include <cmath>

#include "qnls/errors.hpp"
#include "qnls/pcf.hpp"

namespace qnls {

Sector sector_of(cd xi) {
    double a = std::arg(xi);  // (-pi, pi]
    if (a >= 0.0) {
        if (a < 0.5 * pi) return Sector::I;
        if (a < 0.75 * pi) return Sector::II;
        return Sector::III;
    }
    if (a < -0.5 * pi) return Sector::IV;
    if (a < -0.25 * pi) return Sector::V;
    return Sector::VI;
}

ModelScalars model_scalars(const FieldSet& fs, const ThermoState& th, cd split,
                           double x, double t, bool positive_mode,
                           std::optional<std::pair<double, double>> roots) {
    ModelScalars ms;
    ms.split = split;
    ms.x = x;
    ms.t = t;
    ms.theta0 = th.theta_at(split);
    ms.Z0 = fs.Z(split, split);
    const cd ephiD = fs.exp_phiD(split);
    const cd ephiA = fs.exp_phiA(split);
    const cd epsi = fs.exp_psi(split);
    const cd dG11 = 1.0 - ms.theta0 * ms.Z0 * ephiD;
    const cd dG22 = 1.0 - ms.theta0 * ms.Z0 * ephiA;
    if (std::abs(dG11) < 1e-8 || std::abs(dG22) < 1e-8)
        throw AssumptionError("model_scalars: diagonal jump determinant vanishes at the "
                              "saddle point (a root sits on the saddle)");
    ms.f1 = -ms.theta0 * ms.Z0 * ephiD;
    ms.f2 = ms.theta0 * ms.Z0 * ephiA / dG22;
    ms.s = std::log((1.0 + ms.f1) / (1.0 + ms.f2)) / (2.0 * pi);
    ms.nu = iu * ms.s;
    ms.q0 = ms.Z0 * ms.theta0 * ephiD * ephiA / (epsi * 2.0 * pi * iu * dG11);
    ms.p0 = 2.0 * pi * iu * (ms.theta0 - 1.0) * ms.Z0 * epsi / dG11;
    ms.qt0 = ms.Z0 * ms.theta0 * ephiD * ephiA / (epsi * 2.0 * pi * iu * dG22);
    ms.pt0 = 2.0 * pi * iu * (ms.theta0 - 1.0) * ms.Z0 * epsi / dG22;
    if (positive_mode) {
        if (!roots)
            throw ConfigError("model_scalars: positive mode needs the pair of real roots");
        const cd r = (split - roots->second) / (split - roots->first);
        ms.q0 *= r;
        ms.qt0 *= r;
        ms.p0 /= r;
        ms.pt0 /= r;
    }
    const double l0 = x / (2.0 * t);
    const cd up = std::pow(2.0 * t, ms.nu) * std::exp(-0.5 * iu * pi * ms.nu + iu * t * l0 * l0);
    ms.q0p = ms.q0 * up;
    ms.qt0p = ms.qt0 * up;
    ms.p0p = ms.p0 / up;
    ms.pt0p = ms.pt0 / up;
    ms.gamma_tilde = 2.0 * pi * ms.Z0 * (ms.theta0 - 1.0) * gamma_complex(ms.nu) *
                     std::exp(0.5 * iu * pi * ms.nu + 0.75 * iu * pi);
    return ms;
}

Kappas kappas(const ModelScalars& ms, double t) {
    if (std::abs(ms.pt0p) < 1e-300)
        throw NumericalError("kappas: degenerate model, pt0' = 0");
    Kappas k;
    // k21+ = -sqrt(pi/t) e^{-i pi/4} / (pt0' Gamma(nu)); written through
    // Gamma(nu+1) = nu Gamma(nu) so the nu -> 0 limit stays finite
    k.k21_plus = -std::sqrt(pi / t) * std::exp(-0.25 * iu * pi) * ms.nu /
                 (ms.pt0p * gamma_complex(ms.nu + 1.0));
    // k12+ = i nu / (2t k21+)
    k.k12_plus = -iu * std::exp(0.25 * iu * pi) * ms.pt0p * gamma_complex(ms.nu + 1.0) /
                 (2.0 * std::sqrt(pi * t));
    const cd f2sq = (1.0 + ms.f2) * (1.0 + ms.f2);
    k.k12_minus = k.k12_plus / f2sq;
    k.k21_minus = k.k21_plus * f2sq;
    return k;
}

Eigen::Matrix2cd sector_ell(const ModelScalars& ms, Sector sec) {
    const cd nu = ms.nu;
    const double t = ms.t;
    const Kappas k = kappas(ms, t);
    const bool plus = (sec == Sector::I || sec == Sector::II || sec == Sector::VI);
    const cd k12 = plus ? k.k12_plus : k.k12_minus;
    const cd k21 = plus ? k.k21_plus : k.k21_minus;
    const cd spt = std::sqrt(pi / t);
    // the two off-diagonal building blocks of the printed matrices
    cd off12, off21;  // sqrt(pi/t) e^{-i pi/4}/(k21 G(nu)),  sqrt(pi/t) e^{i pi/4}/(k12 G(-nu))
    if (std::abs(nu) > 1e-8) {
        off12 = spt * std::exp(-0.25 * iu * pi) / (k21 * gamma_complex(nu));
        off21 = spt * std::exp(0.25 * iu * pi) / (k12 * gamma_complex(-nu));
    } else {
        // nu ~ 0: k21 ~ nu and Gamma(nu) ~ 1/nu make the printed quotients
        // 0/0; regroup through the reflection formula, which collapses them to
        //   1/(k21+ G(nu)) block -> -pt0',   1/(k12+ G(-nu)) block -> -2i sin(pi nu)/pt0'
        const cd f2sq = (1.0 + ms.f2) * (1.0 + ms.f2);
        off12 = -ms.pt0p * (plus ? cd(1.0) : 1.0 / f2sq);
        off21 = -2.0 * iu * std::sin(pi * nu) / ms.pt0p * (plus ? cd(1.0) : f2sq);
    }
    Eigen::Matrix2cd L = Eigen::Matrix2cd::Identity();
    switch (sec) {
        case Sector::I:
            L(0, 1) = off12;
            L(1, 1) = std::exp(0.5 * iu * pi * nu);
            break;
        case Sector::II:
            L(0, 0) = std::exp(2.0 * iu * pi * nu);
            L(0, 1) = off12;
            L(1, 0) = std::exp(1.5 * iu * pi * nu) * off21;
            L(1, 1) = std::exp(0.5 * iu * pi * nu);
            break;
        case Sector::III:
            L(0, 1) = std::exp(2.0 * iu * pi * nu) * off12;
            L(1, 0) = std::exp(-0.5 * iu * pi * nu) * off21;
            L(1, 1) = std::exp(2.5 * iu * pi * nu);
            break;
        case Sector::IV:
            L(1, 0) = std::exp(-0.5 * iu * pi * nu) * off21;
            L(1, 1) = std::exp(0.5 * iu * pi * nu);
            break;
        case Sector::V:
        case Sector::VI:
            L(1, 1) = std::exp(0.5 * iu * pi * nu);
            break;
    }
    return L;
}

double SectorJumpReport::max_residual() const {
    double m = std::max(identity_residual, nu_invariance);
    for (double r : residuals) m = std::max(m, r);
    return m;
}

SectorJumpReport verify_sector_jumps(const ModelScalars& ms, double t) {
    SectorJumpReport rep;
    const Eigen::Matrix2cd lI = sector_ell(ms, Sector::I);
    const Eigen::Matrix2cd lII = sector_ell(ms, Sector::II);
    const Eigen::Matrix2cd lIII = sector_ell(ms, Sector::III);
    const Eigen::Matrix2cd lIV = sector_ell(ms, Sector::IV);
    const Eigen::Matrix2cd lV = sector_ell(ms, Sector::V);
    const Eigen::Matrix2cd lVI = sector_ell(ms, Sector::VI);
    Eigen::Matrix2cd mp = Eigen::Matrix2cd::Identity();   // m'_+
    mp(1, 0) = ms.q0p;
    Eigen::Matrix2cd nm = Eigen::Matrix2cd::Identity();   // n'_-
    nm(1, 0) = ms.qt0p;
    Eigen::Matrix2cd mm = Eigen::Matrix2cd::Identity();   // m'_-
    mm(0, 1) = ms.p0p;
    Eigen::Matrix2cd np = Eigen::Matrix2cd::Identity();   // n'_+
    np(0, 1) = ms.pt0p;
    Eigen::Matrix2cd kp = Eigen::Matrix2cd::Identity();
    kp(0, 0) = 1.0 + ms.f1;
    kp(1, 1) = 1.0 / (1.0 + ms.f1);
    Eigen::Matrix2cd km = Eigen::Matrix2cd::Identity();
    km(0, 0) = 1.0 + ms.f2;
    km(1, 1) = 1.0 / (1.0 + ms.f2);
    rep.residuals[0] = (lVI - lI * np).norm();
    rep.residuals[1] = (lII - lI * mp).norm();
    rep.residuals[2] = (lIV - lIII * mm).norm();
    rep.residuals[3] = (lIV - lV * nm).norm();
    rep.residuals[4] = (lVI - km * lV * km.inverse()).norm();
    rep.residuals[5] = (lII - km * lIII * kp.inverse()).norm();
    rep.identity_residual =
        std::max(std::abs(ms.pt0p * ms.q0p - (1.0 - std::exp(2.0 * iu * pi * ms.nu))),
                 std::abs(ms.qt0p * ms.p0p - (1.0 - std::exp(2.0 * iu * pi * ms.nu))));
    const Kappas k = kappas(ms, t);
    rep.nu_invariance = std::abs(-2.0 * iu * t * k.k12_plus * k.k21_plus +
                                 2.0 * iu * t * k.k12_minus * k.k21_minus);
    return rep;
}

Eigen::Matrix2cd beta_parallel(const ModelScalars& ms, cd k12, cd k21, cd xi, double t) {
    Eigen::Matrix2cd B;
    const double s2t = std::sqrt(2.0 * t);
    B(0, 0) = pcf_D(ms.nu, xi).value;
    B(0, 1) = k12 * s2t * std::exp(0.25 * iu * pi) * pcf_D(-ms.nu - 1.0, iu * xi).value;
    B(1, 0) = k21 * s2t * std::exp(-0.25 * iu * pi) * pcf_D(ms.nu - 1.0, xi).value;
    B(1, 1) = pcf_D(-ms.nu, iu * xi).value;
    return B;
}

}  // namespace qnls
