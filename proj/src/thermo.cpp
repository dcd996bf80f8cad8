#include "qnls/thermo.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "qnls/errors.hpp"

namespace qnls {

namespace {

// T*ln(1 + exp(-eps/T)) evaluated without overflow on either branch
double stable_log_term(double eps, double T) {
    const double x = -eps / T;
    return T * (x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)));
}

cd stable_log_term(cd eps, double T) {
    const cd x = -eps / T;
    if (x.real() > 0.0) return T * (x + std::log(1.0 + std::exp(-x)));
    return T * std::log(1.0 + std::exp(x));
}

}  // namespace

double fermi_weight(double epsilon, double T) {
    if (!(T > 0.0)) throw ConfigError("fermi_weight: T must be positive");
    const double x = epsilon / T;
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

std::vector<double> solve_yang_yang(const ThermoParams& p, const QuadGrid& grid,
                                    double tol, SolverReport* rep) {
    const int n = grid.size();
    std::vector<double> eps(n), bare(n);
    for (int i = 0; i < n; ++i) {
        const double lam = grid.nodes[i].real();
        bare[i] = lam * lam - p.h;
        eps[i] = bare[i];
    }
    auto rhs = [&](const std::vector<double>& e, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) {
            const double lam = grid.nodes[i].real();
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                const double mu = grid.nodes[j].real();
                s += grid.weights[j].real() *
                     lieb_kernel(p.c, cd(lam - mu)).real() * stable_log_term(e[j], p.T);
            }
            out[i] = bare[i] - s / (2.0 * pi);
        }
    };
    std::vector<double> next(n);
    std::vector<double> history;
    double res = 0.0;
    // damped iteration (relaxation 0.5)
    for (int it = 0; it < 60; ++it) {
        rhs(eps, next);
        res = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = next[i] - eps[i];
            res = std::max(res, std::abs(d));
            eps[i] += 0.5 * d;
        }
        history.push_back(res);
        if (res < std::sqrt(tol)) break;
    }
    // Newton polish on F(eps) = eps - rhs(eps); dF = I - K theta / 2pi
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd r(n);
    int newton_its = 0;
    for (int it = 0; it < 30; ++it) {
        rhs(eps, next);
        res = 0.0;
        for (int i = 0; i < n; ++i) {
            r(i) = eps[i] - next[i];
            res = std::max(res, std::abs(r(i)));
        }
        history.push_back(res);
        newton_its = it;
        if (res <= tol) break;
        for (int i = 0; i < n; ++i) {
            const double lam = grid.nodes[i].real();
            for (int j = 0; j < n; ++j) {
                const double mu = grid.nodes[j].real();
                A(i, j) = (i == j ? 1.0 : 0.0) -
                          grid.weights[j].real() *
                              lieb_kernel(p.c, cd(lam - mu)).real() *
                              fermi_weight(eps[j], p.T) / (2.0 * pi);
            }
        }
        Eigen::VectorXd d = A.partialPivLu().solve(r);
        for (int i = 0; i < n; ++i) eps[i] -= d(i);
    }
    if (rep) {
        rep->converged = res <= tol;
        rep->iterations = static_cast<int>(history.size());
        rep->residual = res;
    }
    if (res > tol) {
        std::string msg = "solve_yang_yang: residual " + std::to_string(res) +
                          " after " + std::to_string(history.size()) +
                          " iterations (last residuals:";
        for (size_t k = history.size() > 5 ? history.size() - 5 : 0; k < history.size(); ++k)
            msg += " " + std::to_string(history[k]);
        msg += ")";
        throw NonconvergenceError(msg, res);
    }
    (void)newton_its;
    return eps;
}

std::vector<double> solve_density(const ThermoParams& p,
                                  const std::vector<double>& theta,
                                  const QuadGrid& grid) {
    const int n = grid.size();
    if (static_cast<int>(theta.size()) != n)
        throw ConfigError("solve_density: theta sample count does not match grid");
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(n, 1.0 / (2.0 * pi));
    for (int i = 0; i < n; ++i) {
        const double lam = grid.nodes[i].real();
        for (int j = 0; j < n; ++j) {
            const double mu = grid.nodes[j].real();
            A(i, j) = (i == j ? 1.0 : 0.0) -
                      grid.weights[j].real() * lieb_kernel(p.c, cd(lam - mu)).real() *
                          theta[j] / (2.0 * pi);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd rho = lu.solve(b);
    const double relerr = (A * rho - b).norm() / b.norm();
    if (relerr > 1e-10)
        throw NumericalError("solve_density: linear system residual " + std::to_string(relerr));
    return std::vector<double>(rho.data(), rho.data() + n);
}

cd ThermoState::epsilon_at(cd z) const {
    cd s = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const cd mu = grid.nodes[j];
        s += grid.weights[j] * lieb_kernel(params.c, z - mu) *
             stable_log_term(cd(epsilon[j]), params.T);
    }
    return z * z - params.h - s / (2.0 * pi);
}

cd ThermoState::epsilon_prime_at(cd z) const {
    cd s = 0.0;
    for (int j = 0; j < grid.size(); ++j) {
        const cd mu = grid.nodes[j];
        const cd d = z - mu;
        // d/dz of 2c/(c^2+d^2)
        s += grid.weights[j] * (-4.0 * params.c * d / ((params.c * params.c + d * d) *
                                                       (params.c * params.c + d * d))) *
             stable_log_term(cd(epsilon[j]), params.T);
    }
    return 2.0 * z - s / (2.0 * pi);
}

cd ThermoState::theta_at(cd z) const {
    const cd x = epsilon_at(z) / params.T;
    if (x.real() > 0.0) {
        const cd e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

cd ThermoState::theta_prime_at(cd z) const {
    // theta' = -(1/T) theta (1-theta) eps'
    const cd th = theta_at(z);
    return -th * (1.0 - th) * epsilon_prime_at(z) / params.T;
}

std::vector<double> epsilon_roots(const ThermoState& st, double tol) {
    const double a = st.grid.nodes.front().real();
    const double b = st.grid.nodes.back().real();
    auto f = [&](double x) { return st.epsilon_at(cd(x)).real(); };
    std::vector<double> roots = bracketed_roots(f, a, b, tol);
    if (st.params.h < 0.0 && !roots.empty())
        throw AssumptionError("epsilon_roots: h<0 but epsilon has real roots");
    if (st.params.h > 0.0 && roots.size() != 2)
        throw AssumptionError("epsilon_roots: h>0 requires exactly two roots, found " +
                              std::to_string(roots.size()));
    return roots;
}

ThermoState solve_thermo(const ThermoParams& p, const QuadGrid& grid, double tol) {
    ThermoState st;
    st.params = p;
    st.grid = grid;
    st.epsilon = solve_yang_yang(p, grid, tol, &st.report);
    st.theta.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) st.theta[i] = fermi_weight(st.epsilon[i], p.T);
    st.rho_t = solve_density(p, st.theta, grid);
    st.q_roots = epsilon_roots(st);
    return st;
}

ThermoState solve_thermo(const ThermoParams& p, int panels, int order,
                         double tail_tol, double tol) {
    return solve_thermo(p, truncated_fermi_grid(p.T, 0.0, tail_tol, panels, order), tol);
}

}  // namespace qnls
