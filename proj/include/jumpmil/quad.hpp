#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace jumpmil {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-12,
                          int max_depth = 48) {
    if (!(b >= a)) throw std::invalid_argument("integrate_adaptive: b < a");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double r =
        detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
    if (!std::isfinite(r)) throw numerical_error("integrate_adaptive: non-finite result");
    return r;
}

// Composite trapezoid over tabulated values.
inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
    if (t.size() != f.size() || t.size() < 2)
        throw std::invalid_argument("trapezoid: need matching tables with >= 2 points");
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j)
        s += 0.5 * (f[j] + f[j + 1]) * (t[j + 1] - t[j]);
    return s;
}

} // namespace jumpmil
