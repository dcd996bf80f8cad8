#ifndef QNLS_SCALAR_RHP_HPP
#define QNLS_SCALAR_RHP_HPP

#include <optional>
#include <string>
#include <vector>

#include "qnls/fields.hpp"
#include "qnls/quadrature.hpp"
#include "qnls/thermo.hpp"

namespace qnls {

// Piecewise jump contour: the real line, or (when the diagonal jump
// determinants have real roots L1 < L2 < lambda0) the deformed path with a
// semicircular detour above L1 and below L2.
struct Contour {
    struct Segment {
        enum class Kind { Line, Arc } kind = Kind::Line;
        cd start, end;       // for Line
        cd center;           // for Arc
        double radius = 0.0;
        double theta0 = 0.0, theta1 = 0.0;
    };
    std::vector<Segment> segments;
    int orientation = +1;
    double detour_radius = 0.0;

    QuadGrid discretize(int panels_per_segment, int order) const;
    std::string to_json() const;
    static Contour from_json(const std::string& text);

    static Contour real_line(double half_width);
    // detour above L1, below L2; both roots assumed < lambda0
    static Contour deformed(double L1, double L2, double lambda0,
                            double half_width, double radius);
};

struct DeltaExpansion {
    cd delta0 = 0.0;
    cd delta1 = 0.0;
};

// Determinant of the piecewise diagonal jump at a contour point:
//   ( 1 - theta(mu) (1 + e^{phi(mu) sign(mu - split)}) )^{sign(split - mu)}
// with Re mu replacing mu inside the signs on deformed contours.
cd jump_det(const FieldSet& fs, const ThermoState& th, cd mu, cd split_point);

// ln of the jump determinant sampled along the grid with a continuous branch
// (unwrap threshold pi), anchored to -> 0 at the right end; throws when the
// zero-index condition fails or the value crosses zero on the contour.
std::vector<cd> log_jump_on_grid(const FieldSet& fs, const ThermoState& th,
                                 const QuadGrid& grid, cd split_point,
                                 double* index_defect = nullptr);

// Delta(lambda) = exp( -(1/2pi i) \int ln(jump)/(mu-lambda) dmu )
cd delta_solution(const FieldSet& fs, const ThermoState& th, const QuadGrid& grid,
                  cd split_point, cd lambda);

// Coefficients of  Delta = exp(Delta0/lambda + Delta1/lambda^2 + ...):
//   Delta0 = (1/2pi i) \int sign(split-mu) ln(1 - theta (1+e^{phi sign(mu-split)})) dmu
//   Delta1 =  same with a mu weight.
// For complex split points the integral runs along the real axis split at
// Re(split) plus a straight connector Re(split) -> split on each side.
DeltaExpansion delta_coeffs(const FieldSet& fs, const ThermoState& th,
                            const QuadGrid& grid, cd split_point);
// Same on a deformed contour (h>0), split at real lambda0 or complex split.
DeltaExpansion delta_coeffs_on_contour(const FieldSet& fs, const ThermoState& th,
                                       const Contour& contour, cd split_point,
                                       int panels_per_segment = 24, int order = 16);

}  // namespace qnls

#endif
