#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fracvar::quad {

struct Result {
    double value = 0.0;
    double error = 0.0; // estimated absolute error
    bool converged = false;
    int panels = 0;
};

struct Options {
    double abs_tol = 1e-10;
    int max_panels = 20000;
};

// Globally adaptive Gauss7/Kronrod15 integration of f over [a, b].
// `breakpoints` lists interior abscissae where the integrand is known to be
// singular or non-smooth; the initial partition is split there so bisection
// only has to resolve genuine endpoint singularities.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {},
                 std::span<const double> breakpoints = {});

// Same, but throws NumericalError when the tolerance is not met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& opts = {},
                          std::span<const double> breakpoints = {},
                          const char* what = "quadrature failed to converge");

} // namespace fracvar::quad
