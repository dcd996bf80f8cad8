#ifndef QNLS_LOCALIZED_HPP
#define QNLS_LOCALIZED_HPP

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "qnls/fields.hpp"
#include "qnls/thermo.hpp"

namespace qnls {

// Scalar data of the saddle-point model problem at the split point
// (the saddle, or its shifted version).
struct ModelScalars {
    cd split;          // evaluation point (real saddle or complex shifted one)
    double x = 0.0, t = 0.0;
    cd theta0, Z0;     // Fermi weight and Z(split,split)
    cd f1, f2;         // diagonal-jump coefficients left/right of the split
    cd s;              // (1/2pi) ln[(1+f1)/(1+f2)]
    cd nu;             // i s
    cd q0, p0, qt0, pt0;      // triangular-factor scalars
    cd q0p, p0p, qt0p, pt0p;  // primed versions carrying (2t)^{+-nu}, e^{+-i t l0^2}
    cd gamma_tilde;           // 2pi Z0 (theta0-1) Gamma(nu) e^{i pi nu/2 + 3 i pi/4}
};

enum class Sector { I = 1, II, III, IV, V, VI };

Sector sector_of(cd xi);

struct Kappas {
    cd k12_plus, k21_plus;   // sectors I, II, VI
    cd k12_minus, k21_minus; // sectors III, IV, V
};

// positive_mode rescales the four triangular scalars by the ratio
// (split-L2)/(split-L1) pattern used on the deformed contour; the products
// q p and the identity  pt' q' = qt' p' = 1 - e^{2 pi i nu}  are preserved.
ModelScalars model_scalars(const FieldSet& fs, const ThermoState& th, cd split,
                           double x, double t, bool positive_mode = false,
                           std::optional<std::pair<double, double>> roots = std::nullopt);

Kappas kappas(const ModelScalars& ms, double t);

// piecewise-constant right factor of the model solution in each sector
Eigen::Matrix2cd sector_ell(const ModelScalars& ms, Sector sec);

struct SectorJumpReport {
    // residuals of ell_VI - ell_I n'_+, ell_II - ell_I m'_+,
    // ell_IV - ell_III m'_-, ell_IV - ell_V n'_-, and the two conjugation
    // relations on the rays toward the original real axis
    std::array<double, 6> residuals{};
    double identity_residual = 0.0;  // pt' q' - (1 - e^{2 pi i nu})
    double nu_invariance = 0.0;      // -2it k12 k21 across sectors
    double max_residual() const;
};

SectorJumpReport verify_sector_jumps(const ModelScalars& ms, double t);

// PCF matrix of the model solution:
//   [ D_nu(xi)                          k12 sqrt(2t) e^{+i pi/4} D_{-nu-1}(i xi) ]
//   [ k21 sqrt(2t) e^{-i pi/4} D_{nu-1}(xi)                      D_{-nu}(i xi)   ]
Eigen::Matrix2cd beta_parallel(const ModelScalars& ms, cd k12, cd k21, cd xi, double t);

}  // namespace qnls

#endif
