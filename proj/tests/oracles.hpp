#pragma once

// Test-only numerical oracles, kept independent of the library's analytic
// reductions: adaptive Simpson quadrature with a forced minimum refinement
// depth (so concentrated mass cannot slip between probe points) and a
// scale-aware entry point for integrands of arbitrary magnitude.

#include <algorithm>
#include <cmath>
#include <utility>

namespace oracle {

template <typename F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth, int force) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (force <= 0 && (depth <= 0 || std::fabs(delta) <= 15.0 * tol)) {
        return left + right + delta / 15.0;
    }
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1);
}

// absolute-tolerance adaptive Simpson on [a, b]
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-11, int depth = 48,
                 int min_depth = 10) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, depth, min_depth);
}

// relative-tolerance variant: scans for the integrand's scale first
template <typename F>
double integrate_auto(const F& f, double a, double b, double rel_tol = 1e-10) {
    double fmax = 0.0;
    for (int i = 0; i <= 512; ++i) {
        fmax = std::max(fmax, std::fabs(f(a + (b - a) * i / 512.0)));
    }
    if (fmax == 0.0) return 0.0;
    return integrate(f, a, b, rel_tol * fmax * (b - a));
}

// integral of f over [a, infinity) via the substitution u = 1/d,
// assuming f decays at least like 1/d^2; a > 0
template <typename F>
double integrate_tail(const F& f, double a, double rel_tol = 1e-10) {
    return integrate_auto([&](double u) { return u > 0.0 ? f(1.0 / u) / (u * u) : 0.0; },
                          0.0, 1.0 / a, rel_tol);
}

}  // namespace oracle
