#ifndef QNLS_SOLVERS_HPP
#define QNLS_SOLVERS_HPP

#include <functional>
#include <utility>
#include <vector>

#include "qnls/quadrature.hpp"

namespace qnls {

struct SolverReport {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

// Damped fixed-point iteration for x = map(x) with a Newton fallback (the
// derivative of x - map(x) is taken by central difference, step
// 1e-6*max(1,|x|)) when plain iteration stagnates or diverges.
std::pair<cd, SolverReport> fixed_point(const std::function<cd(cd)>& map, cd x0,
                                        double tol, int max_iter = 200);

// All sign-change roots of f on [a,b]: scan on `scan_samples` points,
// bisection-refine each bracket to tol. Sorted ascending.
std::vector<double> bracketed_roots(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    int scan_samples = 512);

}  // namespace qnls

#endif
