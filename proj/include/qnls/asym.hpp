#ifndef QNLS_ASYM_HPP
#define QNLS_ASYM_HPP

#include <optional>
#include <string>

#include "qnls/fields.hpp"
#include "qnls/scalar_rhp.hpp"
#include "qnls/thermo.hpp"

namespace qnls {

struct SaddleData {
    double lambda0 = 0.0;  // x / 2t
    cd Lambda;             // root of  L = lambda0 + (i/2t) psi'(L)
    cd t_s;                // t - (i/2) psi''(Lambda)
    cd nu;                 // nu evaluated at Lambda
    double residual = 0.0;
};

struct AsymptoticResult {
    cd exp_exponent;       // psi + tau at the base point plus the signed integral
    cd power_exponent;     // -(nu+1)^2/2  (h<0)  or  -nu^2/2  (h>0)
    double log_scale = 0.0;        // ln(2t)
    bool constant_undetermined = true;
    cd phase_tau;          // i t L^2 - i x L at the base point
    cd psi_value;          // psi at the base point
    cd integral_part;      // the signed exponent integral alone
    cd scalar_prefactor = 0.0;  // h>0: (L2-L1) p1(L1) e^{tau(L1)}
    cd Lambda;             // shifted saddle used
    cd nu;                 // exponent parameter used
    std::string remainder_order;
};

enum class LeadingMode { plain, shifted };

// Newton/fixed-point solution of the shifted saddle equation.
SaddleData shifted_saddle(const FieldSet& fs, const ThermoState& th, double x, double t,
                          double tol = 1e-13);

// 3-term expansion of the shifted saddle in powers of i/2t (series check).
cd shifted_saddle_series3(const FieldSet& fs, double lambda0, double t);

// nu at a (possibly complex) point, branch anchored at theta -> 0.
cd nu_at(const FieldSet& fs, const ThermoState& th, cd Lambda);

// The signed exponent integral
//   (1/2pi) \int w(l) sign(split - l) ln(1 - theta(l)(1+e^{phi(l) sign(l-split)})) dl
// with w = x - 2 l t (+ i psi'(l) when with_psi) over the real axis, complex
// split points handled by the straight-connector rule.
cd signed_exponent_integral(const FieldSet& fs, const ThermoState& th, cd split,
                            double x, double t, bool with_psi,
                            int half_panels = 64, int order = 16);
// Same on the deformed contour (h>0), signs taken on real parts.
cd signed_exponent_integral_on_contour(const FieldSet& fs, const ThermoState& th,
                                       const Contour& gamma, cd split, double x, double t,
                                       bool with_psi, int panels_per_segment = 24,
                                       int order = 16);

// Leading log-determinant: plain = modulus-weighted real-axis integral;
// shifted = psi-corrected integrand split at the shifted saddle, plus the
// -(nu^2/2) ln(2t) power term.
cd logdet_leading(const FieldSet& fs, const ThermoState& th, double x, double t,
                  LeadingMode mode);

AsymptoticResult assemble_B_neg(const FieldSet& fs, const ThermoState& th, double x,
                                double t);
AsymptoticResult assemble_B_pos(const FieldSet& fs, const ThermoState& th, double x,
                                double t);

// tr b'_11 truncated expansion: -nu + (i/2t)(nu' nu)'(ln 2t + 1) - (i/2t)(nu psi')'
// (the unknown trace term of order 1/t is omitted).
cd b11_trace_expansion(const FieldSet& fs, const ThermoState& th, double x, double t);

struct NlsResidualReport {
    double leading_balance = 0.0;  // |z0 e0 z0 - i nu z0| / |i nu z0|
    double residual_rel = 0.0;     // stencil residual over the dominant term
    double dominant = 0.0;
};

// Scalar-reduced check of the non-Abelian evolution equations on the leading
// amplitudes; plain mode uses an (x,t) stencil, shifted mode evaluates the
// transformed equation at a fixed Lambda frame (psi-free at this order;
// Lambda defaults to the shifted saddle of the given lambda0, t).
NlsResidualReport nls_residual_diag(const FieldSet& fs, const ThermoState& th,
                                    double lambda0, double t,
                                    double step_x = 1e-3, double step_t = 1e-3,
                                    LeadingMode mode = LeadingMode::plain,
                                    std::optional<cd> Lambda_frame = std::nullopt);

// Independent simplified zero-field implementation (h<0 or h>0 by sign_h).
AsymptoticResult free_fermion_simple(const ThermoState& th, double x, double t,
                                     int sign_h);
// General pipeline with zero fields; checks agreement with the simplified
// implementation to 1e-14 on the reported quantities.
AsymptoticResult free_fermion_reduce(const ThermoState& th, double x, double t,
                                     int sign_h);

// Roots of 1 - theta (1 + e^{-phi}) on the real axis; exactly two for h>0
// (ordered), none for h<0. Also verifies the e^{+phi} root pair sits left of
// lambda0 when requested.
std::optional<std::pair<double, double>> find_capital_lambdas(
    const FieldSet& fs, const ThermoState& th,
    std::optional<double> check_left_of = std::nullopt);

}  // namespace qnls

#endif
