#pragma once

// Shared quadrature helpers (internal).

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace cfcsr::detail {

// Adaptive Gauss-Kronrod on a finite [a,b]. The panel is mapped onto [-1,1]
// before calling Boost: its recursive error estimate is reported in the
// mapped variable, which otherwise drives short intervals to full depth.
template <class F>
double gk_integrate(F f, double a, double b, double rel_tol, unsigned max_depth, double* error) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) { return half * f(mid + half * x); };
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, max_depth, rel_tol, &err);
    if (error) *error = err;
    return v;
}

}  // namespace cfcsr::detail
