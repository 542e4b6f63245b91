#include "branches.hpp"

#include <cmath>
#include <numbers>

namespace nlwd::detail {

LevelConstants make_level_constants(const PriorParams& p) {
    p.validate();
    LevelConstants c;
    c.p = p;

    const double sigma2 = p.sigma2;
    const double sigma = std::sqrt(sigma2);
    const double ratio = 1.0 / (1.0 + 1.0 / p.tau1);  // tau1/(1+tau1)

    c.log_norm0 = -0.5 * (kLog2PiD + std::log(sigma2));
    c.inv2var0 = 0.5 / sigma2;
    const double log_var1 = std::log(sigma2) + std::log1p(p.tau1);
    c.log_norm1 = -0.5 * (kLog2PiD + log_var1);
    c.inv2var1 = 0.5 / (sigma2 * (1.0 + p.tau1));
    c.xscale = std::sqrt(ratio) / sigma;
    c.mom_shift = std::sqrt(ratio) * sigma;

    if (p.gamma1 > 0.0) {
        c.lw1 = std::log(p.gamma1) - p.r * std::log1p(p.tau1);
        const double lddf = log_odd_double_factorial(p.r);
        c.mstar_coef.resize(static_cast<std::size_t>(p.r) + 1);
        for (int i = 0; i <= p.r; ++i) {
            c.mstar_coef[static_cast<std::size_t>(i)] =
                std::exp(std::lgamma(2.0 * p.r + 1.0) - std::lgamma(2.0 * i + 1.0) -
                         std::lgamma(p.r - i + 1.0) - (p.r - i) * std::numbers::ln2 - lddf);
        }
        c.mstarstar_coef.resize(static_cast<std::size_t>(p.r) + 1);
        for (int i = 1; i <= p.r + 1; ++i) {
            c.mstarstar_coef[static_cast<std::size_t>(i - 1)] =
                std::exp(std::lgamma(2.0 * p.r + 2.0) - std::lgamma(2.0 * i) -
                         std::lgamma(p.r + 2.0 - i) - (p.r + 1 - i) * std::numbers::ln2 - lddf);
        }
    }
    const double w2 = (1.0 - p.gamma1) * p.gamma2;
    if (w2 > 0.0) {
        c.lw2 = std::log(w2) + 0.5 * p.nu * (std::log(p.tau2) + std::log(sigma2)) -
                std::lgamma(0.5 * p.nu) + 0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double w3 = (1.0 - p.gamma1) * (1.0 - p.gamma2);
    if (w3 > 0.0) c.lw3 = std::log(w3);
    return c;
}

CoeffBranches eval_branches(double dhat, const LevelConstants& c) {
    CoeffBranches out;
    const double d2 = dhat * dhat;
    const double lphi0 = c.log_norm0 - d2 * c.inv2var0;

    if (c.lw1 != kNegInf) {
        const double x = c.xscale * dhat;
        const double x2 = x * x;
        double m = 0.0, ms = 0.0;
        double xpow = 1.0;
        for (std::size_t i = 0; i < c.mstar_coef.size(); ++i) {
            m += c.mstar_coef[i] * xpow;
            ms += c.mstarstar_coef[i] * xpow * x;
            xpow *= x2;
        }
        out.mstar = m;
        out.mstarstar = ms;
        out.b1 = c.lw1 + std::log(m) + c.log_norm1 - d2 * c.inv2var1;
    }
    if (c.lw2 != kNegInf) {
        const LaplaceSummary lap = laplace_summary(dhat, c.p.tau2, c.p.nu, c.p.sigma2);
        out.imom = lap.mode;
        out.has_imom = true;
        out.b2 = c.lw2 + lphi0 + lap.log_mass;
    }
    if (c.lw3 != kNegInf) out.b3 = c.lw3 + lphi0;
    return out;
}

}  // namespace nlwd::detail
