#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlwd/hyperspec.hpp"
#include "nlwd/priors.hpp"
#include "nlwd/transform.hpp"

namespace nlwd {

struct FitOptions {
    int max_evals = 2000;   // per restart
    int starts = 5;
    std::uint64_t seed = 0;
};

struct FitResult {
    std::vector<double> theta_gamma;  // constrained, both branches
    std::vector<double> theta_tau;
    double sigma_hat = 0.0;
    double log_marginal = 0.0;
    long n_evals = 0;
    bool converged = false;
    int starts = 0;
};

// MAD estimator from the finest detail level: median absolute deviation
// about the median, divided by 0.6745. Returns 0 when all finest
// coefficients coincide; fitting refuses that degenerate value.
double estimate_sigma_mad(const CoefficientPyramid& pyramid);

// Marginal log density of one empirical coefficient under the
// three-component model (MOM convolution exact, IMOM branch by Laplace
// approximation), combined in log space.
double log_marginal_coeff(double dhat, const PriorParams& p);

// Negative sum of log_marginal_coeff over every detail coefficient, as a
// function of the active unconstrained parameter vector. Numerical
// failures surface as a large finite sentinel so the optimizer retreats.
double neg_log_marginal(std::span<const double> theta_unconstrained,
                        const CoefficientPyramid& pyramid, double sigma_hat,
                        const SpecConfig& config);

// Empirical Bayes hyperparameter estimation: multistart Nelder-Mead on the
// unconstrained parameterization, deterministic given options.seed.
FitResult fit(const CoefficientPyramid& pyramid, const SpecConfig& config,
              const FitOptions& options = {});

}  // namespace nlwd
