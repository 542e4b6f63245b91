#include "nlwd/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "nlwd/errors.hpp"

namespace nlwd {

namespace {

constexpr double kLog2Pi = 1.8378770664093455;
constexpr double kLn2 = std::numbers::ln2;

double require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be positive and finite, got " << v;
        throw std::invalid_argument(msg.str());
    }
    return v;
}

// tau/(1+tau) without overflow for large tau
double shrink_ratio(double tau) { return 1.0 / (1.0 + 1.0 / tau); }

}  // namespace

void PriorParams::validate() const {
    if (!(gamma1 >= 0.0 && gamma1 <= 1.0) || !(gamma2 >= 0.0 && gamma2 <= 1.0)) {
        throw std::invalid_argument("mixture probabilities must lie in [0, 1]");
    }
    require_positive(tau1, "tau1");
    require_positive(tau2, "tau2");
    require_positive(sigma2, "sigma2");
    if (r < 1) throw std::invalid_argument("MOM order r must be >= 1");
    require_positive(nu, "nu");
}

double log_normal_density(double x, double mean, double var) {
    require_positive(var, "variance");
    const double z = x - mean;
    return -0.5 * (kLog2Pi + std::log(var) + z * z / var);
}

double normal_density(double x, double mean, double var) {
    return std::exp(log_normal_density(x, mean, var));
}

double log_odd_double_factorial(int r) {
    // (2r-1)!! = (2r)! / (2^r r!)
    return std::lgamma(2.0 * r + 1.0) - r * kLn2 - std::lgamma(r + 1.0);
}

double mom_density(double d, double tau, int r, double sigma2) {
    require_positive(tau, "tau");
    require_positive(sigma2, "sigma2");
    if (r < 1) throw std::invalid_argument("MOM order r must be >= 1");
    if (d == 0.0) return 0.0;
    const double v = tau * sigma2;
    const double log_m = -0.5 * kLog2Pi - log_odd_double_factorial(r);
    return std::exp(log_m + (-r - 0.5) * std::log(v) + 2.0 * r * std::log(std::fabs(d)) -
                    d * d / (2.0 * v));
}

double imom_density(double d, double tau, double nu, double sigma2) {
    require_positive(tau, "tau");
    require_positive(nu, "nu");
    require_positive(sigma2, "sigma2");
    if (d == 0.0) return 0.0;
    const double v = tau * sigma2;
    return std::exp(0.5 * nu * std::log(v) - std::lgamma(0.5 * nu) -
                    (nu + 1.0) * std::log(std::fabs(d)) - v / (d * d));
}

double mixture_slab_density(double d, const PriorParams& p) {
    p.validate();
    double value = 0.0;
    if (p.gamma1 > 0.0) value += p.gamma1 * mom_density(d, p.tau1, p.r, p.sigma2);
    const double w2 = (1.0 - p.gamma1) * p.gamma2;
    if (w2 > 0.0) value += w2 * imom_density(d, p.tau2, p.nu, p.sigma2);
    return value;
}

double m_star(double dhat, double tau1, double sigma, int r) {
    require_positive(tau1, "tau1");
    require_positive(sigma, "sigma");
    if (r < 1) throw std::invalid_argument("MOM order r must be >= 1");
    const double x = std::sqrt(shrink_ratio(tau1)) * dhat / sigma;
    const double x2 = x * x;
    const double lddf = log_odd_double_factorial(r);
    double sum = 0.0;
    double xpow = 1.0;
    for (int i = 0; i <= r; ++i) {
        const double lc = std::lgamma(2.0 * r + 1.0) - std::lgamma(2.0 * i + 1.0) -
                          std::lgamma(r - i + 1.0) - (r - i) * kLn2 - lddf;
        sum += std::exp(lc) * xpow;
        xpow *= x2;
    }
    return sum;
}

double m_star_star(double dhat, double tau1, double sigma, int r) {
    require_positive(tau1, "tau1");
    require_positive(sigma, "sigma");
    if (r < 1) throw std::invalid_argument("MOM order r must be >= 1");
    const double x = std::sqrt(shrink_ratio(tau1)) * dhat / sigma;
    const double x2 = x * x;
    const double lddf = log_odd_double_factorial(r);
    double sum = 0.0;
    double xpow = x;
    for (int i = 1; i <= r + 1; ++i) {
        const double lc = std::lgamma(2.0 * r + 2.0) - std::lgamma(2.0 * i) -
                          std::lgamma(r + 2.0 - i) - (r + 1 - i) * kLn2 - lddf;
        sum += std::exp(lc) * xpow;
        xpow *= x2;
    }
    return sum;
}

double log_h(double d, double dhat, double tau2, double nu, double sigma2) {
    require_positive(tau2, "tau2");
    require_positive(nu, "nu");
    require_positive(sigma2, "sigma2");
    if (d == 0.0) throw std::invalid_argument("log_h undefined at d = 0");
    return -(nu + 1.0) * std::log(std::fabs(d)) -
           (d * d - 2.0 * d * dhat) / (2.0 * sigma2) - tau2 * sigma2 / (d * d);
}

namespace {

// Stationary points of log_h on d > 0 solve the quartic
//   q(d) = d^4 - b d^3 + (nu+1) sigma2 d^2 - 2 tau2 sigma2^2 = 0
// with b the (signed) empirical coefficient; q = -sigma2 d^3 L_h'(d), so
// local maxima of log_h sit at up-crossings of q.
struct Quartic {
    double b, c2, c0;  // q(d) = d^4 - b d^3 + c2 d^2 + c0
    double operator()(double d) const {
        return ((d - b) * d + c2) * d * d + c0;
    }
    double deriv(double d) const { return (4.0 * d - 3.0 * b) * d * d + 2.0 * c2 * d; }
};

double refine_root(const Quartic& q, double lo, double hi) {
    // q(lo) < 0 < q(hi); safeguarded Newton with bisection fallback
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = q(x);
        if (f < 0.0) lo = x; else hi = x;
        double xn;
        const double fp = q.deriv(x);
        if (fp != 0.0) {
            xn = x - f / fp;
            if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        } else {
            xn = 0.5 * (lo + hi);
        }
        if (std::fabs(xn - x) <= 1e-15 * std::fabs(xn)) return xn;
        x = xn;
        if (hi - lo <= 1e-15 * hi) return x;
    }
    throw numerical_error("laplace_fit: stationarity root polishing did not converge");
}

// Local maximizers of log_h on the positive half-line for effective
// coefficient b (the negative half-line is the mirror with -b). A quartic
// has at most two up-crossings on (0, inf).
struct HalfLineMaxima {
    double d[2];
    int count = 0;
};

HalfLineMaxima positive_maxima(double b, double nu, double sigma2, double tau2) {
    const Quartic q{b, (nu + 1.0) * sigma2, -2.0 * tau2 * sigma2 * sigma2};

    double edges[4];
    int n_edges = 0;
    edges[n_edges++] = 0.0;
    if (b > 0.0) {
        const double disc = 9.0 * b * b - 32.0 * (nu + 1.0) * sigma2;
        if (disc > 0.0) {
            const double s = std::sqrt(disc);
            edges[n_edges++] = (3.0 * b - s) / 8.0;
            edges[n_edges++] = (3.0 * b + s) / 8.0;
        }
    }
    const double sigma = std::sqrt(sigma2);
    double upper = std::max(std::max(edges[n_edges - 1] * 2.0, std::fabs(b) + 10.0 * sigma),
                            std::max(2.0 * std::sqrt(std::sqrt(2.0 * tau2) * sigma2), sigma));
    int guard = 0;
    while (q(upper) <= 0.0) {
        upper *= 2.0;
        if (++guard > 300) throw numerical_error("laplace_fit: no bracketing bound found");
    }
    edges[n_edges++] = upper;

    HalfLineMaxima out;
    double qlo = q.c0;
    for (int i = 0; i + 1 < n_edges; ++i) {
        const double lo = edges[i], hi = edges[i + 1];
        if (!(hi > lo)) {
            continue;
        }
        const double qhi = q(hi);
        if (qlo < 0.0 && qhi > 0.0) out.d[out.count++] = refine_root(q, lo, hi);
        qlo = qhi;
    }
    return out;
}

double curvature(double d, double nu, double sigma2, double tau2) {
    const double d2 = d * d;
    return (nu + 1.0) / d2 - 1.0 / sigma2 - 6.0 * tau2 * sigma2 / (d2 * d2);
}

}  // namespace

LaplaceSummary laplace_summary(double dhat, double tau2, double nu, double sigma2) {
    require_positive(tau2, "tau2");
    require_positive(nu, "nu");
    require_positive(sigma2, "sigma2");

    const HalfLineMaxima pos = positive_maxima(dhat, nu, sigma2, tau2);
    const HalfLineMaxima neg = positive_maxima(-dhat, nu, sigma2, tau2);

    bool have = false;
    double best_d = 0.0, best_logh = 0.0;
    // best mode per half-line; log(sigma* h) per half for the mass sum
    double half_mass[2];
    bool half_have[2] = {false, false};
    for (int side = 0; side < 2; ++side) {
        const HalfLineMaxima& hl = side == 0 ? pos : neg;
        for (int i = 0; i < hl.count; ++i) {
            const double d = side == 0 ? hl.d[i] : -hl.d[i];
            const double curv = curvature(d, nu, sigma2, tau2);
            if (curv >= 0.0) continue;  // not a maximum
            const double lh = log_h(d, dhat, tau2, nu, sigma2);
            if (!have || lh > best_logh || (lh == best_logh && d > 0.0 && best_d < 0.0)) {
                have = true;
                best_d = d;
                best_logh = lh;
            }
            const double lmass = lh + 0.5 * std::log(-1.0 / curv);
            if (!half_have[side] || lmass > half_mass[side]) {
                half_have[side] = true;
                half_mass[side] = lmass;
            }
        }
    }
    if (!have) {
        std::ostringstream msg;
        msg << "laplace_fit: no interior maximum located (dhat=" << dhat
            << ", tau2=" << tau2 << ", nu=" << nu << ", sigma2=" << sigma2 << ")";
        throw numerical_error(msg.str());
    }

    LaplaceSummary out;
    out.mode.d_star = best_d;
    out.mode.log_h_at_mode = best_logh;
    out.mode.sigma_star = std::sqrt(-1.0 / curvature(best_d, nu, sigma2, tau2));
    if (half_have[0] && half_have[1]) {
        const double hi = std::max(half_mass[0], half_mass[1]);
        const double lo = std::min(half_mass[0], half_mass[1]);
        out.log_mass = hi + std::log1p(std::exp(lo - hi));
    } else {
        out.log_mass = half_have[0] ? half_mass[0] : half_mass[1];
    }
    return out;
}

LaplaceFit laplace_fit(double dhat, double tau2, double nu, double sigma2) {
    return laplace_summary(dhat, tau2, nu, sigma2).mode;
}

}  // namespace nlwd
