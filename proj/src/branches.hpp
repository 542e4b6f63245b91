#pragma once

// Shared per-coefficient branch machinery for the three-component marginal
// (ebayes) and the posterior odds (posterior). Branch logs are the log
// summands of the marginal density; odds are their differences against the
// point-mass branch.

#include <cmath>
#include <limits>
#include <vector>

#include "nlwd/priors.hpp"

namespace nlwd::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2PiD = 1.8378770664093455;

// Everything about one resolution level that does not depend on dhat.
struct LevelConstants {
    PriorParams p;
    double lw1 = kNegInf;   // log gamma1 - r log(1+tau1)
    double lw2 = kNegInf;   // log((1-g1) g2 (tau2 s2)^(nu/2) / Gamma(nu/2)) + log sqrt(2 pi)
    double lw3 = kNegInf;   // log((1-g1)(1-g2))
    double log_norm0 = 0.0; // phi(.; 0, sigma2) pieces
    double inv2var0 = 0.0;
    double log_norm1 = 0.0; // phi(.; 0, sigma2 (1+tau1)) pieces
    double inv2var1 = 0.0;
    double xscale = 0.0;    // sqrt(tau1/(1+tau1)) / sigma
    double mom_shift = 0.0; // sqrt(tau1/(1+tau1)) * sigma, the posterior-mean factor
    std::vector<double> mstar_coef;       // x^(2i), i = 0..r
    std::vector<double> mstarstar_coef;   // x^(2i-1), i = 1..r+1
};

LevelConstants make_level_constants(const PriorParams& p);

struct CoeffBranches {
    double b1 = kNegInf;
    double b2 = kNegInf;
    double b3 = kNegInf;
    LaplaceFit imom;   // meaningful only when has_imom
    bool has_imom = false;
    double mstar = 1.0;
    double mstarstar = 0.0;
};

CoeffBranches eval_branches(double dhat, const LevelConstants& c);

inline double lse3(double a, double b, double c) {
    double m = a > b ? a : b;
    if (c > m) m = c;
    if (m == kNegInf) return kNegInf;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

}  // namespace nlwd::detail
