#include "nlwd/posterior.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "branches.hpp"
#include "nlwd/errors.hpp"

namespace nlwd {

namespace {

using detail::CoeffBranches;
using detail::kNegInf;
using detail::LevelConstants;

void require_proper_mixture(const PriorParams& p) {
    p.validate();
    if (p.gamma1 >= 1.0 || p.gamma2 >= 1.0) {
        throw std::invalid_argument(
            "posterior odds need a point-mass component (gamma1, gamma2 < 1)");
    }
}

ShrinkageSummary summarize(double dhat, const LevelConstants& c) {
    const CoeffBranches b = detail::eval_branches(dhat, c);
    const auto [p1, p2] = posterior_probs(b.b1 - b.b3, b.b2 - b.b3);
    ShrinkageSummary s;
    s.p1 = p1;
    s.p2 = p2;
    if (p1 > 0.0) s.post_mean += p1 * (b.mstarstar / b.mstar) * c.mom_shift;
    if (b.has_imom) {
        s.d_star = b.imom.d_star;
        s.post_mean += p2 * b.imom.d_star;
    }
    return s;
}

template <typename F>
auto with_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const data_error& e) {
        throw data_error(std::string(stage) + ": " + e.what());
    } catch (const numerical_error& e) {
        throw numerical_error(std::string(stage) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(stage) + ": " + e.what());
    }
}

}  // namespace

std::pair<double, double> log_odds(double dhat, const PriorParams& p) {
    require_proper_mixture(p);
    const LevelConstants c = detail::make_level_constants(p);
    const CoeffBranches b = detail::eval_branches(dhat, c);
    return {b.b1 - b.b3, b.b2 - b.b3};
}

std::pair<double, double> posterior_probs(double log_o1, double log_o2) {
    double m = 0.0;
    if (log_o1 > m) m = log_o1;
    if (log_o2 > m) m = log_o2;
    const double e0 = std::exp(-m);
    const double e1 = log_o1 == kNegInf ? 0.0 : std::exp(log_o1 - m);
    const double e2 = log_o2 == kNegInf ? 0.0 : std::exp(log_o2 - m);
    const double s = e0 + e1 + e2;
    return {e1 / s, e2 / s};
}

ShrinkageSummary posterior_mean_coeff(double dhat, const PriorParams& p) {
    require_proper_mixture(p);
    return summarize(dhat, detail::make_level_constants(p));
}

double posterior_density_nonzero(double d, double dhat, const PriorParams& p) {
    require_proper_mixture(p);
    const LevelConstants c = detail::make_level_constants(p);
    const CoeffBranches b = detail::eval_branches(dhat, c);
    const auto [p1, p2] = posterior_probs(b.b1 - b.b3, b.b2 - b.b3);
    const double w = p1 + p2;
    if (!(w > 0.0)) {
        throw std::invalid_argument("posterior_density_nonzero undefined: p1 + p2 = 0");
    }
    double value = 0.0;
    if (p1 > 0.0 && d != 0.0) {
        // MOM branch: d^(2r) times a normal kernel, normalized so the
        // branch integrates to one.
        const double s = c.mom_shift;                       // sqrt(tau1/(1+tau1)) sigma
        const double mean = c.xscale * c.mom_shift * dhat;  // tau1/(1+tau1) dhat
        const double z = (d - mean) / s;
        const double log_branch = -0.5 * detail::kLog2PiD -
                                  log_odd_double_factorial(p.r) - std::log(b.mstar) -
                                  (2.0 * p.r + 1.0) * std::log(s) +
                                  2.0 * p.r * std::log(std::fabs(d)) - 0.5 * z * z;
        value += (p1 / w) * std::exp(log_branch);
    }
    if (b.has_imom && p2 > 0.0) {
        value += (p2 / w) * normal_density(d, b.imom.d_star,
                                           b.imom.sigma_star * b.imom.sigma_star);
    }
    return value;
}

std::pair<CoefficientPyramid, std::vector<ShrinkageSummary>> shrink_pyramid(
    const CoefficientPyramid& pyramid, const FitResult& fit, const SpecConfig& config) {
    if (!(fit.sigma_hat > 0.0)) {
        throw std::invalid_argument("shrink_pyramid needs a positive fitted sigma");
    }
    SpecConfig cfg = config;
    cfg.theta_gamma = fit.theta_gamma;
    cfg.theta_tau = fit.theta_tau;
    const auto levels =
        resolve_levels(cfg, pyramid.nlevels(), fit.sigma_hat * fit.sigma_hat);

    CoefficientPyramid shrunk = pyramid;
    std::vector<ShrinkageSummary> summaries;
    summaries.reserve(pyramid.n - pyramid.scaling.size());
    for (int l = 1; l <= pyramid.nlevels(); ++l) {
        const PriorParams& p = levels[static_cast<std::size_t>(l - 1)];
        require_proper_mixture(p);
        const LevelConstants c = detail::make_level_constants(p);
        std::vector<double>& coeffs = shrunk.level(l);
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            ShrinkageSummary s = summarize(coeffs[j], c);
            s.level = l;
            s.index = j;
            coeffs[j] = s.post_mean;
            summaries.push_back(s);
        }
    }
    return {std::move(shrunk), std::move(summaries)};
}

DenoiseResult denoise(const std::vector<double>& signal, const SpecConfig& config,
                      const WaveletFilter& filter, const DenoiseOptions& options) {
    const int levels = options.levels != 0 ? options.levels
                                           : default_levels(signal.size(), filter);
    const CoefficientPyramid pyramid =
        with_stage("denoise[transform]", [&] { return dwt(signal, filter, levels); });

    DenoiseResult result;
    const double sigma_hat =
        with_stage("denoise[mad]", [&] { return estimate_sigma_mad(pyramid); });
    if (sigma_hat == 0.0) {
        // noiseless at the finest scale; nothing to shrink
        result.estimate = signal;
        result.fit.sigma_hat = 0.0;
        result.fit.converged = true;
        return result;
    }

    result.fit = with_stage("denoise[fit]", [&] { return fit(pyramid, config, options.fit); });
    auto [shrunk, summaries] = with_stage(
        "denoise[shrink]", [&] { return shrink_pyramid(pyramid, result.fit, config); });
    result.summaries = std::move(summaries);
    result.estimate =
        with_stage("denoise[inverse]", [&] { return idwt(shrunk, filter); });
    return result;
}

}  // namespace nlwd
