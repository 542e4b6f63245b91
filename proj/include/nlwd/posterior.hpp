#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "nlwd/ebayes.hpp"
#include "nlwd/hyperspec.hpp"
#include "nlwd/priors.hpp"
#include "nlwd/transform.hpp"

namespace nlwd {

// Posterior mixture weights and mean for one coefficient. p1 weights the
// MOM branch, p2 the IMOM branch; 1 - p1 - p2 is the point-mass weight.
struct ShrinkageSummary {
    double p1 = 0.0;
    double p2 = 0.0;
    double post_mean = 0.0;
    double d_star = 0.0;
    int level = 0;          // 1-based, 1 = coarsest
    std::size_t index = 0;
};

// Log posterior odds (O1, O2) of the MOM and IMOM branches against the
// point mass; pinned branches give -inf. gamma1 = 1 or gamma2 = 1 leaves
// no point mass and is rejected.
std::pair<double, double> log_odds(double dhat, const PriorParams& p);

// (p1, p2) from log odds via log-sum-exp normalization.
std::pair<double, double> posterior_probs(double log_o1, double log_o2);

ShrinkageSummary posterior_mean_coeff(double dhat, const PriorParams& p);

// Two-branch posterior density of d given d != 0 (diagnostic).
double posterior_density_nonzero(double d, double dhat, const PriorParams& p);

// Replaces every detail coefficient with its posterior mean; scaling
// coefficients pass through untouched.
std::pair<CoefficientPyramid, std::vector<ShrinkageSummary>> shrink_pyramid(
    const CoefficientPyramid& pyramid, const FitResult& fit, const SpecConfig& config);

struct DenoiseOptions {
    FitOptions fit;
    int levels = 0;  // 0: default_levels(n, filter)
};

struct DenoiseResult {
    std::vector<double> estimate;
    FitResult fit;
    std::vector<ShrinkageSummary> summaries;
};

// Full pipeline: dwt -> MAD -> empirical Bayes fit -> posterior-mean
// shrinkage -> idwt. A signal whose finest-level coefficients are all
// identical (MAD sigma = 0) is returned unchanged.
DenoiseResult denoise(const std::vector<double>& signal, const SpecConfig& config,
                      const WaveletFilter& filter, const DenoiseOptions& options = {});

}  // namespace nlwd
