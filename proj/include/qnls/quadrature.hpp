#ifndef QNLS_QUADRATURE_HPP
#define QNLS_QUADRATURE_HPP

#include <complex>
#include <vector>

namespace qnls {

using cd = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline const cd iu{0.0, 1.0};  // imaginary unit

// Gauss-Legendre rule on [-1,1]; nodes ascending.
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w);

// Composite quadrature grid. Nodes/weights may be complex (straight segments
// between complex endpoints, circular arcs). For a straight segment the
// weights sum to (b - a).
struct QuadGrid {
    std::vector<cd> nodes;
    std::vector<cd> weights;
    std::vector<cd> panel_edges;  // breakpoints, panels*order nodes total
    int order = 0;

    int size() const { return static_cast<int>(nodes.size()); }
    cd weight_sum() const;
    // representative spacing near node i (distance to nearest neighbour)
    double local_spacing(int i) const;
    double min_spacing() const;
    // appends another grid's panels (used to assemble piecewise contours)
    void append(const QuadGrid& g);
};

// Composite Gauss-Legendre rule on the straight segment a -> b.
QuadGrid gauss_panels(cd a, cd b, int panels, int order);

// Composite rule over consecutive real breakpoints (one panel per interval).
QuadGrid gauss_on_edges(const std::vector<double>& edges, int order);

// Circular arc  center + r*e^{i theta},  theta from theta0 to theta1.
QuadGrid gauss_arc(cd center, double radius, double theta0, double theta1,
                   int panels, int order);

// Half-width L with exp(-L^2/T) < tail_tol.
double fermi_halfwidth(double T, double tail_tol);

// Real grid [center-L, center+L] truncated where the Fermi weight falls
// below tail_tol.
QuadGrid truncated_fermi_grid(double T, double center, double tail_tol,
                              int panels = 64, int order = 16);

}  // namespace qnls

#endif
