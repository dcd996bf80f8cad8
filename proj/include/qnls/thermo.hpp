#ifndef QNLS_THERMO_HPP
#define QNLS_THERMO_HPP

#include <vector>

#include "qnls/quadrature.hpp"
#include "qnls/solvers.hpp"

namespace qnls {

struct ThermoParams {
    double c = 1.0;  // coupling constant, 0 < c < inf
    double h = 0.0;  // chemical potential
    double T = 1.0;  // temperature, > 0
};

// Lieb kernel 2c / (c^2 + x^2)
inline cd lieb_kernel(double c, cd x) { return 2.0 * c / (c * c + x * x); }

// theta(eps) = 1 / (1 + exp(eps/T))
double fermi_weight(double epsilon, double T);

struct ThermoState {
    ThermoParams params;
    QuadGrid grid;                 // real grid (nodes have zero imaginary part)
    std::vector<double> epsilon;   // one-particle excitation energy
    std::vector<double> theta;     // Fermi weight
    std::vector<double> rho_t;     // total spectral density of vacancies
    std::vector<double> q_roots;   // roots of epsilon: empty (h<0) or {-q, q}
    SolverReport report;

    // epsilon continued off the grid by re-evaluating the equation's right
    // hand side with the converged data under the integral
    cd epsilon_at(cd z) const;
    cd epsilon_prime_at(cd z) const;  // analytic derivative of the continuation
    cd theta_at(cd z) const;
    cd theta_prime_at(cd z) const;
};

// Fixed point of the thermal excitation-energy equation, seeded with
// eps = lambda^2 - h; damped iteration then a Newton polish.
std::vector<double> solve_yang_yang(const ThermoParams& p, const QuadGrid& grid,
                                    double tol, SolverReport* rep = nullptr);

// Linear (Nystrom) solve of  2 pi rho_t = 1 + K * (theta rho_t).
std::vector<double> solve_density(const ThermoParams& p,
                                  const std::vector<double>& theta,
                                  const QuadGrid& grid);

// Roots of epsilon on the grid span; exactly two (symmetric) for h>0,
// none for h<0, anything else raises AssumptionError.
std::vector<double> epsilon_roots(const ThermoState& st, double tol = 1e-10);

// Full pipeline with the default grid (truncated Fermi grid, tail 1e-16).
ThermoState solve_thermo(const ThermoParams& p, int panels = 64, int order = 16,
                         double tail_tol = 1e-16, double tol = 1e-12);
ThermoState solve_thermo(const ThermoParams& p, const QuadGrid& grid,
                         double tol = 1e-12);

}  // namespace qnls

#endif
