#include "qnls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qnls/errors.hpp"

namespace qnls {

void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, Newton on P_n
        double z = std::cos(pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

cd QuadGrid::weight_sum() const {
    cd s = 0.0;
    for (const cd& v : weights) s += v;
    return s;
}

double QuadGrid::local_spacing(int i) const {
    const int n = size();
    if (n < 2) return 0.0;
    double d = std::numeric_limits<double>::max();
    if (i > 0) d = std::min(d, std::abs(nodes[i] - nodes[i - 1]));
    if (i + 1 < n) d = std::min(d, std::abs(nodes[i + 1] - nodes[i]));
    return d;
}

double QuadGrid::min_spacing() const {
    double d = std::numeric_limits<double>::max();
    for (int i = 1; i < size(); ++i) d = std::min(d, std::abs(nodes[i] - nodes[i - 1]));
    return d;
}

void QuadGrid::append(const QuadGrid& g) {
    nodes.insert(nodes.end(), g.nodes.begin(), g.nodes.end());
    weights.insert(weights.end(), g.weights.begin(), g.weights.end());
    if (!panel_edges.empty() && !g.panel_edges.empty() &&
        std::abs(panel_edges.back() - g.panel_edges.front()) < 1e-14)
        panel_edges.insert(panel_edges.end(), g.panel_edges.begin() + 1, g.panel_edges.end());
    else
        panel_edges.insert(panel_edges.end(), g.panel_edges.begin(), g.panel_edges.end());
    order = std::max(order, g.order);
}

QuadGrid gauss_panels(cd a, cd b, int panels, int order) {
    if (panels < 1) throw ConfigError("gauss_panels: panels must be >= 1");
    if (order < 2) throw ConfigError("gauss_panels: order must be >= 2");
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    QuadGrid g;
    g.order = order;
    g.nodes.reserve(static_cast<size_t>(panels) * order);
    g.weights.reserve(static_cast<size_t>(panels) * order);
    const cd step = (b - a) / static_cast<double>(panels);
    for (int p = 0; p <= panels; ++p) g.panel_edges.push_back(a + step * static_cast<double>(p));
    for (int p = 0; p < panels; ++p) {
        const cd lo = g.panel_edges[p];
        const cd half = 0.5 * step;
        const cd mid = lo + half;
        for (int k = 0; k < order; ++k) {
            g.nodes.push_back(mid + half * x[k]);
            g.weights.push_back(half * w[k]);
        }
    }
    return g;
}

QuadGrid gauss_on_edges(const std::vector<double>& edges, int order) {
    if (edges.size() < 2) throw ConfigError("gauss_on_edges: need at least two breakpoints");
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    QuadGrid g;
    g.order = order;
    for (double e : edges) g.panel_edges.push_back(e);
    for (size_t p = 0; p + 1 < edges.size(); ++p) {
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        const double mid = 0.5 * (edges[p + 1] + edges[p]);
        for (int k = 0; k < order; ++k) {
            g.nodes.push_back(mid + half * x[k]);
            g.weights.push_back(half * w[k]);
        }
    }
    return g;
}

QuadGrid gauss_arc(cd center, double radius, double theta0, double theta1,
                   int panels, int order) {
    if (panels < 1 || order < 2) throw ConfigError("gauss_arc: invalid panel/order counts");
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    QuadGrid g;
    g.order = order;
    const double step = (theta1 - theta0) / panels;
    for (int p = 0; p <= panels; ++p)
        g.panel_edges.push_back(center + radius * std::exp(iu * (theta0 + step * p)));
    for (int p = 0; p < panels; ++p) {
        const double lo = theta0 + step * p;
        for (int k = 0; k < order; ++k) {
            const double th = lo + 0.5 * step * (x[k] + 1.0);
            const cd z = center + radius * std::exp(iu * th);
            g.nodes.push_back(z);
            // d mu = i r e^{i th} d th
            g.weights.push_back(iu * radius * std::exp(iu * th) * (0.5 * step * w[k]));
        }
    }
    return g;
}

double fermi_halfwidth(double T, double tail_tol) {
    if (!(T > 0.0)) throw ConfigError("fermi_halfwidth: T must be positive");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw ConfigError("fermi_halfwidth: tail_tol must lie in (0,1)");
    return std::sqrt(T * std::log(1.0 / tail_tol));
}

QuadGrid truncated_fermi_grid(double T, double center, double tail_tol,
                              int panels, int order) {
    const double L = fermi_halfwidth(T, tail_tol);
    return gauss_panels(center - L, center + L, panels, order);
}

}  // namespace qnls
