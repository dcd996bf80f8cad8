#ifndef QNLS_TEST_FIXTURES_HPP
#define QNLS_TEST_FIXTURES_HPP

#include <vector>

#include "qnls/fields.hpp"

namespace qnls::test {

inline std::vector<cd> poly_from_roots(cd lead, const std::vector<cd>& roots) {
    std::vector<cd> c{lead};
    for (const cd& r : roots) {
        c.push_back(0.0);
        for (size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
        c[0] = -r * c[0];
    }
    return c;
}

// valid field set for c = 2 (analyticity strip |Im| < 1):
//   e^psi  = (l^2+4)/(l^2+6.25)          real positive on the axis
//   e^phiD = (l^2+9)/(l^2+12.25)         real positive on the axis
//   e^phi  = (l-2i)(l+3i) / ((l+2i)(l-3i))   unimodular, zero net winding
inline FieldSet valid_fields(double c = 2.0) {
    FieldSet fs;
    fs.c = c;
    fs.psi = LogField::rational(poly_from_roots(1.0, {cd(0, 2), cd(0, -2)}),
                                poly_from_roots(1.0, {cd(0, 2.5), cd(0, -2.5)}));
    fs.phiD = LogField::rational(poly_from_roots(1.0, {cd(0, 3), cd(0, -3)}),
                                 poly_from_roots(1.0, {cd(0, 3.5), cd(0, -3.5)}));
    // e^phiA = e^phi * e^phiD
    fs.phiA = LogField::rational(
        poly_from_roots(1.0, {cd(0, -2), cd(0, 3), cd(0, 3), cd(0, -3)}),
        poly_from_roots(1.0, {cd(0, 2), cd(0, -3), cd(0, 3.5), cd(0, -3.5)}));
    return fs;
}

// phi = phiA - phiD = 0 identically, psi and phiD nontrivial; for h > 0 the
// diagonal-determinant roots then coincide with the Fermi points
inline FieldSet phi_zero_fields(double c = 2.0, cd psi_slope = cd(0.0)) {
    FieldSet fs;
    fs.c = c;
    if (std::abs(psi_slope) > 0.0) {
        fs.psi = LogField::affine(psi_slope, 0.0);
    } else {
        fs.psi = LogField::rational(poly_from_roots(1.0, {cd(0, 2), cd(0, -2)}),
                                    poly_from_roots(1.0, {cd(0, 2.5), cd(0, -2.5)}));
    }
    fs.phiD = LogField::rational(poly_from_roots(1.0, {cd(0, 3), cd(0, -3)}),
                                 poly_from_roots(1.0, {cd(0, 3.5), cd(0, -3.5)}));
    fs.phiA = fs.phiD;
    return fs;
}

inline FieldSet zero_fields(double c = 2.0) {
    FieldSet fs;
    fs.c = c;
    return fs;
}

}  // namespace qnls::test

#endif
