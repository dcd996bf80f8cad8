#ifndef QNLS_ERRORS_HPP
#define QNLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qnls {

// Error taxonomy. The CLI maps these onto exit codes:
//   ConfigError -> 2, NonconvergenceError -> 3, AssumptionError -> 4,
//   everything else -> 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct NonconvergenceError : std::runtime_error {
    double last_residual = 0.0;
    explicit NonconvergenceError(const std::string& m, double r = 0.0)
        : std::runtime_error(m), last_residual(r) {}
};

// violated standing assumption (root count, root ordering, phase mismatch)
struct AssumptionError : std::runtime_error {
    explicit AssumptionError(const std::string& m) : std::runtime_error(m) {}
};

struct AccuracyError : std::runtime_error {
    explicit AccuracyError(const std::string& m) : std::runtime_error(m) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& m) : std::runtime_error(m) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};

struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace qnls

#endif
