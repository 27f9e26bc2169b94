#pragma once

// Independent closed forms and brute-force helpers. Nothing here calls the
// library, so the tests compare two separate computations.

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

constexpr double kQ = 0.25;
constexpr double kK1 = 1.0;
constexpr double kK2 = 2.0;

inline double f1(double u) { return kQ * u + kK1 * u * (1.0 - u); }
inline double f2(double u) { return kQ * u + kK2 * u * (1.0 - u); }
inline double phi1(double u) { return kK1 * (u * u / 2.0 - u * u * u / 3.0); }
inline double phi2(double u) { return kK2 * (u * u / 2.0 - u * u * u / 3.0); }
inline double df1(double u) { return kQ + kK1 * (1.0 - 2.0 * u); }
inline double df2(double u) { return kQ + kK2 * (1.0 - 2.0 * u); }

// Plain interval halving, 200 iterations.
inline double bisect(const std::function<double(double)>& h, double lo, double hi) {
    double hlo = h(lo);
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if ((hm > 0) == (hlo > 0)) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Case (b) right trace: f2(u) = f1(0.1) on [0, q/K2].
inline double case_b_u2() {
    return bisect([](double u) { return f2(u) - f1(0.1); }, 0.0, kQ / kK2);
}

inline double grid_min(const std::function<double(double)>& f, double a, double b, int n = 100000) {
    double m = std::min(f(a), f(b));
    for (int k = 0; k <= n; ++k) m = std::min(m, f(a + (b - a) * k / n));
    return m;
}

inline double grid_max(const std::function<double(double)>& f, double a, double b, int n = 100000) {
    double m = std::max(f(a), f(b));
    for (int k = 0; k <= n; ++k) m = std::max(m, f(a + (b - a) * k / n));
    return m;
}

// Godunov flux by exhaustive search.
inline double godunov(const std::function<double(double)>& f, double a, double b, int n = 100000) {
    return a <= b ? grid_min(f, a, b, n) : grid_max(f, b, a, n);
}

// Exact Godunov flux of a concave f with its maximiser at `peak`.
inline double godunov_concave(const std::function<double(double)>& f, double peak, double a, double b) {
    if (a <= b) return std::min(f(a), f(b));
    return f(std::clamp(peak, b, a));
}

inline double g1(double a, double b) { return godunov_concave(f1, 0.625, a, b); }
inline double g2(double a, double b) { return godunov_concave(f2, 0.5625, a, b); }

}  // namespace oracle
