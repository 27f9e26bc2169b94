#pragma once

// Thin wrappers over Boost.Math used throughout the library.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace trapflow::numerics {

// Adaptive 15-point Gauss-Kronrod on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13, unsigned max_depth = 30) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, max_depth, tol, &err);
}

// Root of a monotone function on [lo, hi], which must bracket a sign change
// (or hit zero at an endpoint). Bisection to full double resolution.
template <class F>
double bisect(F&& f, double lo, double hi, int max_iter = 200) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    double fhi = f(hi);
    if (fhi == 0.0) return hi;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
    std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
    auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

// Minimiser of f on [lo, hi] (Brent's method, golden-section fallback).
template <class F>
std::pair<double, double> minimise(F&& f, double lo, double hi) {
    std::uintmax_t iters = 200;
    return boost::math::tools::brent_find_minima(std::forward<F>(f), lo, hi,
                                                 std::numeric_limits<double>::digits / 2, iters);
}

}  // namespace trapflow::numerics
