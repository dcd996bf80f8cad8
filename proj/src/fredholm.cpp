#include "qnls/fredholm.hpp"

#include <cmath>

#include "qnls/cauchy.hpp"
#include "qnls/errors.hpp"
#include "qnls/rankone.hpp"

namespace qnls {

namespace {

double grid_halfwidth(const KernelConfig& cfg) {
    return fermi_halfwidth(cfg.thermo.params.T, cfg.tail_tol) + 1.0;
}

// local Gaussian window quadrature around a real center; five panels keep
// the Gaussian (std sqrt(2 eps)) at >= 4 nodes per width for every order used
QuadGrid gaussian_window(double center, double eps_reg, int order) {
    const double w = 14.0 * std::sqrt(eps_reg);
    return gauss_panels(cd(center - w), cd(center + w), 5, order);
}

// N_eps(xi) = \int Z^2(w,xi) d_eps(w-xi) dw  (w real, xi possibly complex)
cd n_eps_at(const FieldSet& fs, cd xi, double eps_reg, int order = 16) {
    QuadGrid win = gaussian_window(xi.real(), eps_reg, order);
    cd s = 0.0;
    for (int k = 0; k < win.size(); ++k) {
        const cd w = win.nodes[k];
        const cd z = fs.Z(w, xi);
        const cd d = w - xi;
        const cd g = std::exp(-d * d / (4.0 * eps_reg)) / (2.0 * std::sqrt(pi * eps_reg));
        s += win.weights[k] * z * z * g;
    }
    return s;
}

// W(xi,l) = \int d_eps(w-xi) Z(w,xi) Z(w,l) dw
cd w_moment(const FieldSet& fs, cd xi, cd l, double eps_reg, int order = 16) {
    QuadGrid win = gaussian_window(xi.real(), eps_reg, order);
    cd s = 0.0;
    for (int k = 0; k < win.size(); ++k) {
        const cd w = win.nodes[k];
        const cd d = w - xi;
        const cd g = std::exp(-d * d / (4.0 * eps_reg)) / (2.0 * std::sqrt(pi * eps_reg));
        s += win.weights[k] * g * fs.Z(w, xi) * fs.Z(w, l);
    }
    return s;
}

// prefactor of E_-:
// C(l) = (1/2pi) Z(l,l) sqrt(theta(l)/N_eps(l)) e^{(phiA+phiD-psi-tau)(l)/2}
cd e_minus_prefactor(const KernelConfig& cfg, double lambda) {
    const FieldSet& fs = cfg.fields;
    const cd l(lambda);
    const cd neps = n_eps_at(fs, l, cfg.eps_reg, cfg.order);
    const double theta = cfg.theta_scale * cfg.thermo.theta_at(l).real();
    const cd half = 0.5 * (fs.phiA.log_at(l) + fs.phiD.log_at(l) - fs.psi_at(l) -
                           tau_phase(l, cfg.x, cfg.t));
    return fs.Z(l, l) * std::sqrt(theta / neps) * std::exp(half) / (2.0 * pi);
}

}  // namespace

Eigen::VectorXcd E_minus(const KernelConfig& cfg, double lambda, const QuadGrid& ugrid) {
    const cd C = e_minus_prefactor(cfg, lambda);
    Eigen::VectorXcd out(ugrid.size());
    for (int i = 0; i < ugrid.size(); ++i)
        out(i) = C * cfg.fields.Z(ugrid.nodes[i], cd(lambda));
    return out;
}

namespace {

// the double-integral factor E(lambda|u); poles xi = lambda -+ i0 handled by
// shifting the xi-window off the axis by -+eta
cd e_factor(const KernelConfig& cfg, double lambda, double u, bool swap_i0) {
    const FieldSet& fs = cfg.fields;
    const double w = 14.0 * std::sqrt(cfg.eps_reg);
    const QuadGrid base = gauss_panels(cd(u - w), cd(u + w), 12, cfg.order);
    // the window is local (no global dispersion growth), so the offset can
    // sit many spacings off the line where the Lorentzian is fully resolved
    double eta = std::max(16.0, cfg.pv_offset_factor) *
                 base.local_spacing(base.size() / 2);
    // keep the pole, if inside the window, resolved on the shifted line
    cd total = 0.0;
    for (int side = 0; side < 2; ++side) {
        // side 0: e^{-phiD}/(xi-l-i0) -> shift down; side 1: e^{-phiA}, up
        double sgn = side == 0 ? -1.0 : 1.0;
        if (swap_i0) sgn = -sgn;
        cd acc = 0.0;
        for (int k = 0; k < base.size(); ++k) {
            const cd xi = base.nodes[k] + iu * sgn * eta;
            const cd du = u - xi;
            const cd deps =
                std::exp(-du * du / (4.0 * cfg.eps_reg)) / (2.0 * std::sqrt(pi * cfg.eps_reg));
            const cd g = std::exp(fs.psi_at(xi) + tau_phase(xi, cfg.x, cfg.t)) /
                         (n_eps_at(fs, xi, cfg.eps_reg, cfg.order) * fs.Z(xi, xi));
            const cd efield = side == 0 ? 1.0 / fs.exp_phiD(xi) : 1.0 / fs.exp_phiA(xi);
            acc += base.weights[k] * deps * fs.Z(cd(u), xi) * g *
                   w_moment(fs, xi, cd(lambda), cfg.eps_reg, cfg.order) * efield /
                   (xi - lambda);
        }
        total += acc;
    }
    return total / fs.Z(cd(u), cd(lambda));
}

}  // namespace

Eigen::VectorXcd E_plus(const KernelConfig& cfg, double lambda, const QuadGrid& ugrid,
                        bool swap_i0) {
    Eigen::VectorXcd em = E_minus(cfg, lambda, ugrid);
    Eigen::VectorXcd out(ugrid.size());
    for (int i = 0; i < ugrid.size(); ++i)
        out(i) = e_factor(cfg, lambda, ugrid.nodes[i].real(), swap_i0) * em(i);
    return out;
}

namespace {

QuadGrid kernel_ugrid(const KernelConfig& cfg, double lambda, double mu) {
    const double L = grid_halfwidth(cfg);
    const double w = 14.0 * std::sqrt(cfg.eps_reg);
    std::vector<double> marks{-L, L, lambda - w, lambda + w, mu - w, mu + w};
    std::sort(marks.begin(), marks.end());
    std::vector<double> edges;
    for (double m : marks)
        if (edges.empty() || m - edges.back() > 1e-12) edges.push_back(m);
    QuadGrid g;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        const double len = edges[i + 1] - edges[i];
        const int np = std::max(4, static_cast<int>(std::ceil(len / (0.2 * w))));
        g.append(gauss_panels(cd(edges[i]), cd(edges[i + 1]), std::min(np, 64), cfg.order));
    }
    return g;
}

cd kernel_numerator(const KernelConfig& cfg, double lambda, double mu,
                    const QuadGrid& ug) {
    Eigen::VectorXcd epl = E_plus(cfg, lambda, ug);
    Eigen::VectorXcd eml = E_minus(cfg, lambda, ug);
    Eigen::VectorXcd epm = E_plus(cfg, mu, ug);
    Eigen::VectorXcd emm = E_minus(cfg, mu, ug);
    cd s = 0.0;
    for (int k = 0; k < ug.size(); ++k)
        s += ug.weights[k] * (epl(k) * emm(k) - eml(k) * epm(k));
    return s;
}

}  // namespace

cd kernel_V(const KernelConfig& cfg, double lambda, double mu) {
    const QuadGrid ug = kernel_ugrid(cfg, lambda, mu);
    if (std::abs(lambda - mu) > 1e-7)
        return kernel_numerator(cfg, lambda, mu, ug) / (lambda - mu);
    // diagonal: V(l,l) = -d/dmu N(l,mu)|_{mu=l}, central difference in mu
    const double h = 1e-5;
    const cd nm = kernel_numerator(cfg, lambda, mu - h, ug);
    const cd np = kernel_numerator(cfg, lambda, mu + h, ug);
    return -(np - nm) / (2.0 * h);
}

int oscillation_nodes(const KernelConfig& cfg) {
    const double L = grid_halfwidth(cfg);
    const double l0 = cfg.t > 0.0 ? cfg.x / (2.0 * cfg.t) : 0.0;
    // total dispersion phase \int |tau'| = t [(L-l0)^2 + (L+l0)^2]
    const double phase = cfg.t * ((L - l0) * (L - l0) + (L + l0) * (L + l0));
    return static_cast<int>(std::ceil(2.0 * phase / pi));
}

namespace {

struct Assembled {
    QuadGrid grid;
    Eigen::MatrixXcd V;
    double eta = 0.0;
    int panels = 0;
};

Assembled assemble_kernel(const KernelConfig& cfg) {
    if (cfg.t < 0.0) throw ConfigError("det_V: t must be nonnegative");
    const FieldSet& fs = cfg.fields;
    const double L = grid_halfwidth(cfg);
    const int need = oscillation_nodes(cfg);
    int panels = std::max(cfg.min_panels, (need + cfg.order - 1) / cfg.order);
    if (cfg.forced_panels > 0) {
        if (cfg.forced_panels * cfg.order < need)
            throw AccuracyError("det_V: grid too coarse for the dispersion phase; need at "
                                "least " + std::to_string((need + cfg.order - 1) / cfg.order) +
                                " panels of order " + std::to_string(cfg.order));
        panels = cfg.forced_panels;
    }
    Assembled out;
    out.panels = panels;
    out.grid = gauss_panels(cd(-L), cd(L), panels, cfg.order);
    const int n = out.grid.size();
    double max_gap = 0.0;
    for (int i = 1; i < n; ++i)
        max_gap = std::max(max_gap, std::abs(out.grid.nodes[i] - out.grid.nodes[i - 1]));
    out.eta = cfg.pv_offset_factor * max_gap;

    Eigen::VectorXcd C(n);
    std::vector<double> lam(n);
    for (int i = 0; i < n; ++i) {
        lam[i] = out.grid.nodes[i].real();
        C(i) = e_minus_prefactor(cfg, lam[i]);
    }
    // local Gaussian windows share the relative node layout; precompute offsets
    QuadGrid proto = gaussian_window(0.0, cfg.eps_reg, cfg.order);
    const int m = proto.size();

    Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, n);
    for (int side = 0; side < 2; ++side) {
        const double sgn = side == 0 ? -1.0 : 1.0;  // -i0 (phiD)  |  +i0 (phiA)
        Eigen::MatrixXcd P(n, n);  // P(a,i) = sqrt(g_a w_a) W(xi_a, l_i)/(xi_a - l_i)
        for (int a = 0; a < n; ++a) {
            const cd xi = cd(lam[a], sgn * out.eta);
            const cd neps = n_eps_at(fs, xi, cfg.eps_reg, cfg.order);
            const cd efield = side == 0 ? 1.0 / fs.exp_phiD(xi) : 1.0 / fs.exp_phiA(xi);
            const cd ga = std::exp(fs.psi_at(xi) + tau_phase(xi, cfg.x, cfg.t)) /
                          (neps * fs.Z(xi, xi)) * efield;
            const cd root = std::sqrt(ga * out.grid.weights[a]);
            // W(xi, l_i) for all i over the shared window around lam[a]
            Eigen::VectorXcd zfac(m);
            std::vector<cd> wnode(m);
            for (int k = 0; k < m; ++k) {
                const cd w = proto.nodes[k] + lam[a];
                wnode[k] = w;
                const cd d = w - xi;
                zfac(k) = proto.weights[k] *
                          std::exp(-d * d / (4.0 * cfg.eps_reg)) /
                          (2.0 * std::sqrt(pi * cfg.eps_reg)) * fs.Z(w, xi);
            }
            for (int i = 0; i < n; ++i) {
                cd wsum = 0.0;
                for (int k = 0; k < m; ++k) wsum += zfac(k) * fs.Z(wnode[k], cd(lam[i]));
                P(a, i) = root * wsum / (xi - lam[i]);
            }
        }
        V.noalias() += P.transpose() * P;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) V(i, j) *= C(i) * C(j);
    out.V = std::move(V);
    return out;
}

}  // namespace

Eigen::MatrixXcd assemble_V_matrix(const KernelConfig& cfg, QuadGrid* grid_out,
                                   double* eta_out) {
    Assembled a = assemble_kernel(cfg);
    if (grid_out) *grid_out = a.grid;
    if (eta_out) *eta_out = a.eta;
    return std::move(a.V);
}

cd det_KT(const KernelConfig& cfg) {
    const double L = grid_halfwidth(cfg);
    QuadGrid g = gauss_panels(cd(-L), cd(L), 48, cfg.order);
    const double c = cfg.thermo.params.c;
    const int n = g.size();
    Eigen::MatrixXcd K(n, n);
    std::vector<double> th(n);
    for (int i = 0; i < n; ++i) th[i] = cfg.thermo.theta_at(g.nodes[i]).real();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = g.nodes[i].real() - g.nodes[j].real();
            K(i, j) = -(1.0 / (2.0 * pi)) * 2.0 * c / (d * d + c * c) *
                      std::sqrt(th[i] * th[j]);
        }
    return nystrom_det(K, g);
}

DetResult det_V(const KernelConfig& cfg) {
    Assembled a = assemble_kernel(cfg);
    DetResult r;
    r.n_nodes = a.grid.size();
    r.panels = a.panels;
    r.eta = a.eta;
    // LU with an unwrapped log-determinant accumulated over the pivots
    const int n = a.grid.size();
    Eigen::VectorXcd sw(n);
    for (int i = 0; i < n; ++i) sw(i) = std::sqrt(a.grid.weights[i]);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cd v = a.V(i, j);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("det_V: non-finite kernel entry at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
            A(i, j) += sw(i) * v * sw(j);
        }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    cd logdet = 0.0;
    double sign_flips = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(lu.matrixLU()(i, i));
    // permutation parity
    Eigen::VectorXi perm = lu.permutationP().indices();
    {
        std::vector<bool> seen(n, false);
        for (int i = 0; i < n; ++i) {
            if (seen[i]) continue;
            int len = 0, j = i;
            while (!seen[j]) { seen[j] = true; j = perm(j); ++len; }
            if (len % 2 == 0) sign_flips += 1.0;
        }
    }
    if (std::fmod(sign_flips, 2.0) != 0.0) logdet += iu * pi;
    r.logdet = logdet;
    r.det = std::exp(logdet);
    r.det_kt = det_KT(cfg);
    return r;
}

cd logdet_derivative_x(const KernelConfig& cfg, double dx) {
    KernelConfig cp = cfg;
    cp.x = cfg.x + dx;
    const cd lp = det_V(cp).logdet;
    cp.x = cfg.x - dx;
    const cd lm = det_V(cp).logdet;
    if (std::abs(lp) < 1e-12 && std::abs(lm) < 1e-12) return cd(0.0);
    if (std::abs(lp) < 1e-8 && std::abs(lm) < 1e-8)
        throw AccuracyError("logdet_derivative_x: |ln det| < 1e-8, cancellation risk");
    cd d = lp - lm;
    // the pivot-log branch can differ by 2 pi between the two evaluations
    d = cd(d.real(), std::remainder(d.imag(), 2.0 * pi));
    return d / (2.0 * dx);
}

}  // namespace qnls
