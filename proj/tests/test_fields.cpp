#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qnls/asym.hpp"
#include "qnls/errors.hpp"
#include "qnls/fields.hpp"
#include "qnls/thermo.hpp"

using namespace qnls;
using qnls::test::poly_from_roots;

TEST_CASE("h_fn special values") {
    CHECK(std::abs(h_fn(cd(0.7), cd(0.7), 2.0) - 1.0) == 0.0);
    CHECK(std::abs(h_fn(cd(0.0, 2.0), cd(0.0), 2.0) - 2.0) < 1e-15);   // l-m = ic
    CHECK(std::abs(h_fn(cd(0.0, -2.0), cd(0.0), 2.0) - 0.0) < 1e-15);  // l-m = -ic
}

TEST_CASE("eval_field: constant field has zero log everywhere") {
    LogField f = LogField::zero();
    CHECK(std::abs(f.log_at(cd(1.3, 0.2))) == 0.0);
    CHECK(std::abs(f.exp_at(cd(-2.0)) - 1.0) == 0.0);
}

TEST_CASE("eval_field: branch anchored at +infinity") {
    FieldSet fs = test::valid_fields();
    // psi -> log(1) = 0 at the right end
    CHECK(std::abs(fs.psi_at(cd(1e6))) < 1e-5);
    // real on the real axis
    for (double x : {-5.0, -1.1, 0.0, 0.3, 4.0})
        CHECK(std::abs(fs.psi_at(cd(x)).imag()) < 1e-12);
    // log actually inverts exp
    const cd l(0.37, 0.2);
    CHECK(std::abs(std::exp(fs.psi_at(l)) - fs.exp_psi(l)) < 1e-12);
}

TEST_CASE("unimodular phi model on the real axis") {
    // (l-3i)/(l+3i) with a wide strip: |e^phi| = 1 on the axis
    LogField phi = LogField::rational(poly_from_roots(1.0, {cd(0, 3)}),
                                      poly_from_roots(1.0, {cd(0, -3)}));
    for (double x : {-7.0, -0.5, 0.01, 2.0, 11.0})
        CHECK(std::abs(std::abs(phi.exp_at(cd(x))) - 1.0) < 1e-14);
}

TEST_CASE("validator rejects a psi that is not real on the axis") {
    FieldSet fs;
    fs.c = 4.0;
    fs.psi = LogField::rational(poly_from_roots(1.0, {cd(0, 3)}),
                                poly_from_roots(1.0, {cd(0, -3)}));
    // direct evaluation shows a nonzero imaginary part on the axis
    CHECK(std::abs(fs.psi_at(cd(1.0)).imag()) > 0.1);
    CHECK_THROWS_AS(validate_field_set(fs), ConfigError);
    FieldValidationReport rep = validate_field_set(fs, 200, false);
    CHECK_FALSE(rep.ok);
    CHECK(rep.max_im_psi > 0.1);
}

TEST_CASE("validator rejects roots inside the strip and unbounded logs") {
    FieldSet fs = test::valid_fields(8.0);  // strip |Im|<4 but roots at 2i..3.5i
    CHECK_THROWS_AS(validate_field_set(fs), ConfigError);
    FieldSet affine = test::zero_fields();
    affine.psi = LogField::affine(cd(1.0), cd(0.0));  // unbounded at infinity
    CHECK_THROWS_AS(validate_field_set(affine), ConfigError);
}

TEST_CASE("validator accepts the reference set") {
    FieldSet fs = test::valid_fields();
    FieldValidationReport rep = validate_field_set(fs);
    CHECK(rep.ok);
    CHECK(rep.max_im_psi < 1e-10);
    CHECK(rep.max_unimodularity < 1e-10);
    CHECK(rep.strip_clearance >= 1.0);
}

TEST_CASE("field derivatives: affine special case") {
    LogField f = LogField::affine(cd(0.0, 0.5), cd(2.0));
    CHECK(std::abs(f.deriv(cd(3.0), 1) - cd(0.0, 0.5)) == 0.0);
    CHECK(std::abs(f.deriv(cd(3.0), 2)) == 0.0);
}

TEST_CASE("field derivatives: rational model against finite differences") {
    // e^psi = (l-3i)/(l+3i): psi'(0) = 1/(-3i) - 1/(3i) = 2i/3
    LogField f = LogField::rational(poly_from_roots(1.0, {cd(0, 3)}),
                                    poly_from_roots(1.0, {cd(0, -3)}));
    CHECK(std::abs(f.deriv(cd(0.0), 1) - cd(0.0, 2.0 / 3.0)) < 1e-14);
    const double h = 1e-5;
    const cd fd1 = (f.log_at(cd(h)) - f.log_at(cd(-h))) / (2.0 * h);
    CHECK(std::abs(f.deriv(cd(0.0), 1) - fd1) < 1e-8 * std::abs(fd1));
    const cd fd2 = (f.log_at(cd(h)) - 2.0 * f.log_at(cd(0.0)) + f.log_at(cd(-h))) / (h * h);
    CHECK(std::abs(f.deriv(cd(0.0), 2) - fd2) < 1e-5);
}

TEST_CASE("Z function: zero fields") {
    FieldSet fs = test::zero_fields(2.0);
    CHECK(std::abs(fs.Z(cd(0.4), cd(0.4)) - 2.0) < 1e-15);
    // lorentzian profile at separated arguments: 2c^2/(c^2+(l-m)^2)
    const cd z = fs.Z(cd(1.0), cd(0.0));
    CHECK(std::abs(z - 2.0 * 4.0 / (4.0 + 1.0)) < 1e-14);
    // pole guard when the argument difference hits +-ic
    CHECK_THROWS_AS(fs.Z(cd(0.0, 2.0), cd(0.0)), SingularityError);
}

TEST_CASE("Z diagonal identity Z(l,l) = e^{-phiD} + e^{-phiA}") {
    FieldSet fs = test::valid_fields();
    for (double x : {-2.0, 0.0, 0.9, 3.3}) {
        const cd lhs = fs.Z(cd(x), cd(x));
        const cd rhs = 1.0 / fs.exp_phiD(cd(x)) + 1.0 / fs.exp_phiA(cd(x));
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("Z(l,l) theta e^{phiD} = theta (1 + e^{-phi}) identity") {
    FieldSet fs = test::valid_fields();
    const double theta = 0.31;
    for (double x : {-1.0, 0.2, 2.4}) {
        const cd lhs = fs.Z(cd(x), cd(x)) * theta * fs.exp_phiD(cd(x));
        const cd rhs = theta * (1.0 + 1.0 / fs.exp_phi(cd(x)));
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
}

TEST_CASE("det_G11_22 special values") {
    FieldSet zero = test::zero_fields();
    CHECK(std::abs(det_G11_22(zero, 0.3, cd(0.1), 11) - (1.0 - 0.6)) < 1e-14);
    CHECK(std::abs(det_G11_22(zero, 0.0, cd(0.1), 22) - 1.0) == 0.0);
    // phi = i pi: which=11 gives 1 - theta (1 + e^{-i pi}) = 1
    FieldSet fs = test::zero_fields();
    fs.phiA = LogField::affine(cd(0.0), cd(0.0, pi));
    CHECK(std::abs(det_G11_22(fs, 0.5, cd(0.0), 11) - 1.0) < 1e-14);
}

TEST_CASE("det_G11 * det_G22 real on the axis when phi is unimodular") {
    FieldSet fs = test::valid_fields();
    for (double x : {-3.0, -0.4, 0.6, 1.7}) {
        const cd prod = det_G11_22(fs, 0.27, cd(x), 11) * det_G11_22(fs, 0.27, cd(x), 22);
        CHECK(std::abs(prod.imag()) < 1e-10);
    }
}

TEST_CASE("capital roots: none for h<0 with theta < 1/2") {
    FieldSet fs = test::valid_fields();
    ThermoState th = solve_thermo(ThermoParams{2.0, -1.0, 1.0}, 48, 12);
    auto roots = find_capital_lambdas(fs, th);
    CHECK_FALSE(roots.has_value());
}

TEST_CASE("capital roots: zero fields reduce to the Fermi points") {
    FieldSet fs = test::zero_fields(1.0);
    ThermoState th = solve_thermo(ThermoParams{1.0, 1.0, 1.0}, 64, 16);
    auto roots = find_capital_lambdas(fs, th);
    REQUIRE(roots.has_value());
    REQUIRE(th.q_roots.size() == 2);
    CHECK(roots->first == doctest::Approx(th.q_roots[0]).epsilon(1e-7));
    CHECK(roots->second == doctest::Approx(th.q_roots[1]).epsilon(1e-7));
    CHECK(roots->first < roots->second);
}

TEST_CASE("capital roots: interlacing check against the saddle") {
    FieldSet fs = test::phi_zero_fields(1.0);
    ThermoState th = solve_thermo(ThermoParams{1.0, 1.0, 1.0}, 64, 16);
    auto roots = find_capital_lambdas(fs, th, 2.5);
    REQUIRE(roots.has_value());
    CHECK(roots->second < 2.5);
    CHECK_THROWS_AS(find_capital_lambdas(fs, th, 0.0), AssumptionError);
}

TEST_CASE("field JSON round trip") {
    FieldSet fs = test::valid_fields();
    LogField back = field_from_json(field_to_json(fs.phiA));
    for (double x : {-1.2, 0.0, 2.2}) {
        CHECK(std::abs(back.exp_at(cd(x)) - fs.phiA.exp_at(cd(x))) < 1e-12);
        CHECK(std::abs(back.log_at(cd(x)) - fs.phiA.log_at(cd(x))) < 1e-12);
    }
    LogField aff = field_from_json(R"({"kind":"affine_log","a":[0,1],"b":[0.5,0]})");
    CHECK(std::abs(aff.log_at(cd(2.0)) - cd(0.5, 2.0)) < 1e-15);
    CHECK_THROWS_AS(field_from_json(R"({"kind":"nope"})"), ConfigError);
}

TEST_CASE("degree mismatch rejected") {
    CHECK_THROWS_AS(LogField::rational({cd(1.0), cd(1.0)}, {cd(1.0)}), ConfigError);
}
