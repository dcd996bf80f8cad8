#ifndef QNLS_FIELDS_HPP
#define QNLS_FIELDS_HPP

#include <string>
#include <vector>

#include "qnls/quadrature.hpp"

namespace qnls {

// h(lambda,mu) = (lambda - mu + ic) / (ic)
cd h_fn(cd lambda, cd mu, double c);

// One auxiliary field F, stored so that e^{F} is available without branch
// bookkeeping and F itself carries the branch anchored at lambda -> +inf.
//
//   Rational:  e^{F} = P/Q with deg P = deg Q and no zeros/poles in the
//              analyticity strip |Im lambda| < c/2.  F is assembled from
//              principal logs of the root factors; since every root lies
//              outside the strip, each log is holomorphic inside it and
//              F(+inf) is the principal log of the limit value.
//   PolyLog:   F is the polynomial itself (covers the affine special case
//              F = a*lambda + b; e^{F} need not be rational).
class LogField {
  public:
    enum class Kind { Rational, PolyLog };

    static LogField rational(std::vector<cd> num_coeffs, std::vector<cd> den_coeffs);
    static LogField affine(cd a, cd b);
    static LogField poly(std::vector<cd> coeffs);  // F = sum coeffs[k] lambda^k
    static LogField zero() { return affine(0.0, 0.0); }

    Kind kind() const { return kind_; }
    cd exp_at(cd lambda) const;   // e^{F(lambda)}
    cd log_at(cd lambda) const;   // F(lambda), anchored branch
    cd deriv(cd lambda, int order) const;  // F', F'', F''' (order 1..3)

    // smallest |Im| over zeros and poles (infinity for PolyLog)
    double strip_clearance() const;
    bool bounded_at_infinity() const;

    const std::vector<cd>& zeros() const { return zeros_; }
    const std::vector<cd>& poles() const { return poles_; }
    const std::vector<cd>& num_coeffs() const { return num_; }
    const std::vector<cd>& den_coeffs() const { return den_; }
    const std::vector<cd>& poly_coeffs() const { return pcoef_; }

  private:
    Kind kind_ = Kind::PolyLog;
    // rational representation
    std::vector<cd> num_, den_;   // ascending coefficients
    std::vector<cd> zeros_, poles_;
    cd lead_ratio_ = 1.0;
    // polynomial-log representation
    std::vector<cd> pcoef_;
};

struct FieldSet {
    LogField psi = LogField::zero();
    LogField phiA = LogField::zero();
    LogField phiD = LogField::zero();
    double c = 1.0;

    bool is_zero() const;  // all three fields identically zero

    cd exp_psi(cd l) const { return psi.exp_at(l); }
    cd exp_phiA(cd l) const { return phiA.exp_at(l); }
    cd exp_phiD(cd l) const { return phiD.exp_at(l); }
    cd exp_phi(cd l) const { return phiA.exp_at(l) / phiD.exp_at(l); }  // e^{phiA-phiD}
    cd psi_at(cd l) const { return psi.log_at(l); }
    cd phi_at(cd l) const { return phiA.log_at(l) - phiD.log_at(l); }
    cd psi_d(cd l, int order) const { return psi.deriv(l, order); }

    // Z(lambda,mu) = e^{-phiD(lambda)}/h(mu,lambda) + e^{-phiA(lambda)}/h(lambda,mu)
    cd Z(cd lambda, cd mu) const;
};

struct FieldValidationReport {
    bool ok = true;
    double max_im_psi = 0.0;       // on real samples
    double max_unimodularity = 0.0;  // | |e^phi| - 1 | on real samples
    double strip_clearance = 0.0;  // min |Im root| across all fields
    std::string message;
};

// Checks the symmetric properties (psi real on the axis, e^{phi} unimodular
// on the axis) on n_samples real points and the strip clearance of all
// zeros/poles. Throws ConfigError when strict and violated.
FieldValidationReport validate_field_set(const FieldSet& fs, int n_samples = 1000,
                                         bool strict = true);

// 1 - theta*(1 + e^{-phi}) for which=11,  1 - theta*(1 + e^{+phi}) for which=22
cd det_G11_22(const FieldSet& fs, double theta, cd lambda, int which);

// JSON (de)serialization of one field spec:
//   {"kind":"rational","num":[[re,im],...],"den":[[re,im],...]}
//   {"kind":"affine_log","a":[re,im],"b":[re,im]}
//   {"kind":"poly_log","coeffs":[[re,im],...]}
LogField field_from_json(const std::string& json_text);
std::string field_to_json(const LogField& f);

}  // namespace qnls

#endif
