#include "qnls/solvers.hpp"

#include <cmath>

#include "qnls/errors.hpp"

namespace qnls {

std::pair<cd, SolverReport> fixed_point(const std::function<cd(cd)>& map, cd x0,
                                        double tol, int max_iter) {
    if (!(tol > 0.0)) throw ConfigError("fixed_point: tol must be positive");
    SolverReport rep;
    cd x = x0;
    double res = std::abs(map(x) - x);
    double prev = res;
    bool newton = false;
    for (int it = 0; it < max_iter; ++it) {
        rep.iterations = it + 1;
        if (!newton) {
            cd xn = 0.5 * x + 0.5 * map(x);
            double rn = std::abs(map(xn) - xn);
            if (rn <= tol) {
                rep.converged = true;
                rep.residual = rn;
                return {xn, rep};
            }
            // stagnation or divergence: hand over to Newton on g(x)=map(x)-x
            if (rn > 0.9 * prev) newton = true;
            else { x = xn; prev = rn; }
            continue;
        }
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        const cd g = map(x) - x;
        const cd gp = (map(x + h) - (x + h) - (map(x - h) - (x - h))) / (2.0 * h);
        if (std::abs(gp) < 1e-300) break;
        x -= g / gp;
        res = std::abs(map(x) - x);
        if (res <= tol) {
            rep.converged = true;
            rep.residual = res;
            return {x, rep};
        }
    }
    rep.residual = std::abs(map(x) - x);
    throw NonconvergenceError("fixed_point: no convergence after max_iter iterations",
                              rep.residual);
}

std::vector<double> bracketed_roots(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    int scan_samples) {
    std::vector<double> roots;
    if (scan_samples < 2) scan_samples = 2;
    const double h = (b - a) / (scan_samples - 1);
    double xl = a, fl = f(a);
    for (int i = 1; i < scan_samples; ++i) {
        const double xr = a + i * h;
        const double fr = f(xr);
        if (fl == 0.0) roots.push_back(xl);
        if (fl * fr < 0.0) {
            double lo = xl, hi = xr, flo = fl;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        xl = xr;
        fl = fr;
    }
    if (fl == 0.0) roots.push_back(xl);
    return roots;
}

}  // namespace qnls
