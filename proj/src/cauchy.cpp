#include "qnls/cauchy.hpp"

#include <cmath>
#include <limits>

#include "qnls/errors.hpp"

namespace qnls {

cd contour_log_sum(const QuadGrid& grid, cd z) {
    // Panels are short enough that each subtends an angle < pi at any z off
    // the contour, so the principal branch is correct per panel.
    cd s = 0.0;
    for (size_t p = 0; p + 1 < grid.panel_edges.size(); ++p)
        s += std::log((grid.panel_edges[p + 1] - z) / (grid.panel_edges[p] - z));
    return s;
}

namespace {

// barycentric Lagrange interpolation of f over the nodes of one panel
cd panel_interpolate(const QuadGrid& g, const std::vector<cd>& f, int panel, cd z) {
    const int n = g.order;
    const int off = panel * n;
    cd num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
        cd d = z - g.nodes[off + k];
        if (std::abs(d) < 1e-300) return f[off + k];
        // weights for Gauss nodes: (-1)^k sin-free generic form is fine at
        // this size; build from products lazily
        cd wk = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != k) wk /= (g.nodes[off + k] - g.nodes[off + j]);
        num += wk / d * f[off + k];
        den += wk / d;
    }
    return num / den;
}

}  // namespace

cd cauchy_eval(const std::vector<cd>& fvals, const QuadGrid& grid, cd z) {
    if (static_cast<int>(fvals.size()) != grid.size())
        throw ConfigError("cauchy_eval: sample count does not match grid");
    // nearest node
    int imin = 0;
    double dmin = std::numeric_limits<double>::max();
    for (int i = 0; i < grid.size(); ++i) {
        const double d = std::abs(grid.nodes[i] - z);
        if (d < dmin) { dmin = d; imin = i; }
    }
    const double spacing = grid.local_spacing(imin);
    if (dmin < 1e-13 * std::max(1.0, std::abs(z)))
        throw AccuracyError("cauchy_eval: z lies on a contour node, distance " +
                            std::to_string(dmin));
    const cd norm = -1.0 / (2.0 * pi * iu);
    if (dmin > 2.0 * spacing) {
        cd s = 0.0;
        for (int i = 0; i < grid.size(); ++i)
            s += grid.weights[i] * fvals[i] / (grid.nodes[i] - z);
        return norm * s;
    }
    // near-contour: subtract the value at the closest contour point
    const int panel = imin / grid.order;
    const cd fstar = panel_interpolate(grid, fvals, panel, z);
    cd s = 0.0;
    for (int i = 0; i < grid.size(); ++i)
        s += grid.weights[i] * (fvals[i] - fstar) / (grid.nodes[i] - z);
    s += fstar * contour_log_sum(grid, z);
    return norm * s;
}

cd nystrom_det(const Eigen::MatrixXcd& K, const QuadGrid& grid) {
    const int n = grid.size();
    if (K.rows() != n || K.cols() != n)
        throw ConfigError("nystrom_det: kernel matrix does not match grid");
    Eigen::VectorXcd sw(n);
    for (int i = 0; i < n; ++i) sw(i) = std::sqrt(grid.weights[i]);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cd v = K(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("nystrom_det: non-finite kernel value at node pair (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
            A(i, j) += sw(i) * v * sw(j);
        }
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).determinant();
}

cd nystrom_det(const std::function<cd(cd, cd)>& kernel, const QuadGrid& grid) {
    const int n = grid.size();
    Eigen::MatrixXcd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = kernel(grid.nodes[i], grid.nodes[j]);
    return nystrom_det(K, grid);
}

}  // namespace qnls
