#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace dispersal::quad {

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

// Adaptive Gauss-Kronrod 7/15 bisection targeting an absolute tolerance.
Result integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, int max_depth = 40);

// Same, but the interval is pre-split at the given breakpoints (kinks of
// piecewise-smooth integrands); points outside (lo, hi) are ignored.
Result integrate(const std::function<double(double)>& f, double lo, double hi,
                 const std::vector<double>& breakpoints, double abs_tol,
                 int max_depth = 40);

// Throws QuadratureError (carrying the achieved error estimate) instead of
// returning a non-converged result.
double integrate_or_throw(const std::function<double(double)>& f, double lo,
                          double hi, const std::vector<double>& breakpoints,
                          double abs_tol, const char* context);

}  // namespace dispersal::quad
