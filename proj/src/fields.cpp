#include "qnls/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <json.hpp>

#include "qnls/errors.hpp"

namespace qnls {

cd h_fn(cd lambda, cd mu, double c) {
    if (!(c > 0.0)) throw ConfigError("h_fn: c must be positive");
    return (lambda - mu + iu * c) / (iu * c);
}

namespace {

cd polyval(const std::vector<cd>& a, cd x) {
    cd r = 0.0;
    for (size_t k = a.size(); k-- > 0;) r = r * x + a[k];
    return r;
}

std::vector<cd> polyder(const std::vector<cd>& a) {
    std::vector<cd> d;
    for (size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<double>(k) * a[k]);
    return d;
}

std::vector<cd> poly_roots(const std::vector<cd>& a) {
    // strip trailing (numerically) zero leading coefficients
    std::vector<cd> c = a;
    while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg <= 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cd> r(deg);
    for (int i = 0; i < deg; ++i) r[i] = es.eigenvalues()(i);
    return r;
}

}  // namespace

LogField LogField::rational(std::vector<cd> num, std::vector<cd> den) {
    while (num.size() > 1 && std::abs(num.back()) < 1e-300) num.pop_back();
    while (den.size() > 1 && std::abs(den.back()) < 1e-300) den.pop_back();
    if (num.empty() || den.empty())
        throw ConfigError("LogField: empty polynomial");
    if (num.size() != den.size())
        throw ConfigError("LogField: numerator and denominator degree must match "
                          "(boundedness at infinity)");
    LogField f;
    f.kind_ = Kind::Rational;
    f.num_ = std::move(num);
    f.den_ = std::move(den);
    f.zeros_ = poly_roots(f.num_);
    f.poles_ = poly_roots(f.den_);
    f.lead_ratio_ = f.num_.back() / f.den_.back();
    return f;
}

LogField LogField::affine(cd a, cd b) { return poly({b, a}); }

LogField LogField::poly(std::vector<cd> coeffs) {
    LogField f;
    f.kind_ = Kind::PolyLog;
    f.pcoef_ = std::move(coeffs);
    if (f.pcoef_.empty()) f.pcoef_.push_back(0.0);
    return f;
}

cd LogField::exp_at(cd l) const {
    if (kind_ == Kind::PolyLog) return std::exp(polyval(pcoef_, l));
    return polyval(num_, l) / polyval(den_, l);
}

cd LogField::log_at(cd l) const {
    if (kind_ == Kind::PolyLog) return polyval(pcoef_, l);
    // principal log of each root factor: the cut of log(l - r) is the
    // horizontal ray going left from r, which stays outside the strip as
    // long as the roots do
    cd s = std::log(lead_ratio_);
    for (const cd& z : zeros_) s += std::log(l - z);
    for (const cd& p : poles_) s -= std::log(l - p);
    return s;
}

cd LogField::deriv(cd l, int order) const {
    if (order < 1 || order > 3) throw ConfigError("LogField::deriv: order must be 1..3");
    if (kind_ == Kind::PolyLog) {
        std::vector<cd> d = pcoef_;
        for (int k = 0; k < order; ++k) d = polyder(d);
        return polyval(d, l);
    }
    cd s = 0.0;
    const double sign[4] = {0.0, 1.0, -1.0, 2.0};
    for (const cd& z : zeros_) {
        const cd d = l - z;
        s += sign[order] / (order == 1 ? d : order == 2 ? d * d : d * d * d);
    }
    for (const cd& p : poles_) {
        const cd d = l - p;
        s -= sign[order] / (order == 1 ? d : order == 2 ? d * d : d * d * d);
    }
    return s;
}

double LogField::strip_clearance() const {
    if (kind_ == Kind::PolyLog) return std::numeric_limits<double>::infinity();
    double m = std::numeric_limits<double>::infinity();
    for (const cd& z : zeros_) m = std::min(m, std::abs(z.imag()));
    for (const cd& p : poles_) m = std::min(m, std::abs(p.imag()));
    return m;
}

bool LogField::bounded_at_infinity() const {
    if (kind_ == Kind::Rational) return true;
    // polynomial logs are bounded only when constant
    for (size_t k = 1; k < pcoef_.size(); ++k)
        if (std::abs(pcoef_[k]) > 0.0) return false;
    return true;
}

bool FieldSet::is_zero() const {
    auto zero = [](const LogField& f) {
        if (f.kind() == LogField::Kind::Rational) return false;
        return std::abs(f.log_at(0.0)) == 0.0 && std::abs(f.deriv(0.0, 1)) == 0.0;
    };
    return zero(psi) && zero(phiA) && zero(phiD);
}

cd FieldSet::Z(cd lambda, cd mu) const {
    const cd hml = h_fn(mu, lambda, c);
    const cd hlm = h_fn(lambda, mu, c);
    const double tiny = 1e-13;
    if (std::abs(hml) < tiny || std::abs(hlm) < tiny)
        throw SingularityError("Z: argument difference hits the pole lambda-mu = +-ic");
    return 1.0 / (phiD.exp_at(lambda) * hml) + 1.0 / (phiA.exp_at(lambda) * hlm);
}

FieldValidationReport validate_field_set(const FieldSet& fs, int n_samples, bool strict) {
    FieldValidationReport rep;
    const double L = 8.0 * std::max(1.0, fs.c);
    for (int i = 0; i < n_samples; ++i) {
        const double x = -L + 2.0 * L * i / (n_samples - 1);
        rep.max_im_psi = std::max(rep.max_im_psi, std::abs(fs.psi_at(cd(x)).imag()));
        rep.max_unimodularity =
            std::max(rep.max_unimodularity, std::abs(std::abs(fs.exp_phi(cd(x))) - 1.0));
    }
    rep.strip_clearance = std::min({fs.psi.strip_clearance(), fs.phiA.strip_clearance(),
                                    fs.phiD.strip_clearance()});
    const bool strip_ok = rep.strip_clearance >= 0.5 * fs.c - 1e-12;
    const bool bounded = fs.psi.bounded_at_infinity() && fs.phiA.bounded_at_infinity() &&
                         fs.phiD.bounded_at_infinity();
    rep.ok = rep.max_im_psi < 1e-10 && rep.max_unimodularity < 1e-10 && strip_ok && bounded;
    if (!rep.ok) {
        rep.message = "field set invalid:";
        if (rep.max_im_psi >= 1e-10) rep.message += " psi not real on the axis;";
        if (rep.max_unimodularity >= 1e-10) rep.message += " e^phi not unimodular on the axis;";
        if (!strip_ok) rep.message += " zeros/poles inside the strip |Im| < c/2;";
        if (!bounded) rep.message += " field unbounded at infinity;";
        if (strict) throw ConfigError("validate_field_set: " + rep.message);
    }
    return rep;
}

cd det_G11_22(const FieldSet& fs, double theta, cd lambda, int which) {
    const cd ephi = fs.exp_phi(lambda);
    if (which == 11) return 1.0 - theta * (1.0 + 1.0 / ephi);
    if (which == 22) return 1.0 - theta * (1.0 + ephi);
    throw ConfigError("det_G11_22: which must be 11 or 22");
}

namespace {

cd json_to_cd(const nlohmann::json& j) {
    if (j.is_number()) return cd(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2)
        return cd(j[0].get<double>(), j[1].get<double>());
    throw ConfigError("field spec: complex numbers must be [re, im] pairs");
}

std::vector<cd> json_to_cvec(const nlohmann::json& j) {
    std::vector<cd> v;
    for (const auto& e : j) v.push_back(json_to_cd(e));
    return v;
}

nlohmann::json cd_to_json(cd z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

LogField field_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational")
        return LogField::rational(json_to_cvec(j.at("num")), json_to_cvec(j.at("den")));
    if (kind == "affine_log")
        return LogField::affine(json_to_cd(j.at("a")), json_to_cd(j.at("b")));
    if (kind == "poly_log") return LogField::poly(json_to_cvec(j.at("coeffs")));
    throw ConfigError("field spec: unknown kind '" + kind + "'");
}

std::string field_to_json(const LogField& f) {
    nlohmann::json j;
    if (f.kind() == LogField::Kind::Rational) {
        j["kind"] = "rational";
        j["num"] = nlohmann::json::array();
        for (const cd& v : f.num_coeffs()) j["num"].push_back(cd_to_json(v));
        j["den"] = nlohmann::json::array();
        for (const cd& v : f.den_coeffs()) j["den"].push_back(cd_to_json(v));
    } else {
        j["kind"] = "poly_log";
        j["coeffs"] = nlohmann::json::array();
        for (const cd& v : f.poly_coeffs()) j["coeffs"].push_back(cd_to_json(v));
    }
    return j.dump();
}

}  // namespace qnls
