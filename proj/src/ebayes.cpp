#include "nlwd/ebayes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "branches.hpp"
#include "nlwd/errors.hpp"
#include "nlwd/rng.hpp"

namespace nlwd {

namespace {

constexpr double kSentinel = 1e300;

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (n % 2 == 0) {
        const double lower =
            *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

}  // namespace

double estimate_sigma_mad(const CoefficientPyramid& pyramid) {
    if (pyramid.nlevels() < 1) throw std::invalid_argument("pyramid has no detail levels");
    const std::vector<double>& finest = pyramid.level(pyramid.nlevels());
    if (finest.empty()) throw std::invalid_argument("finest detail level is empty");
    const double center = median(finest);
    std::vector<double> dev(finest.size());
    for (std::size_t i = 0; i < finest.size(); ++i) dev[i] = std::fabs(finest[i] - center);
    return median(std::move(dev)) / 0.6745;
}

double log_marginal_coeff(double dhat, const PriorParams& p) {
    const detail::LevelConstants c = detail::make_level_constants(p);
    const detail::CoeffBranches b = detail::eval_branches(dhat, c);
    return detail::lse3(b.b1, b.b2, b.b3);
}

double neg_log_marginal(std::span<const double> theta_unconstrained,
                        const CoefficientPyramid& pyramid, double sigma_hat,
                        const SpecConfig& config) {
    try {
        SpecConfig cfg = config;
        apply_unconstrained(cfg, theta_unconstrained);
        const auto levels = resolve_levels(cfg, pyramid.nlevels(), sigma_hat * sigma_hat);
        double total = 0.0;
        for (int l = 1; l <= pyramid.nlevels(); ++l) {
            const detail::LevelConstants c =
                detail::make_level_constants(levels[static_cast<std::size_t>(l - 1)]);
            for (double dhat : pyramid.level(l)) {
                const detail::CoeffBranches b = detail::eval_branches(dhat, c);
                total += detail::lse3(b.b1, b.b2, b.b3);
            }
        }
        return std::isfinite(total) ? -total : kSentinel;
    } catch (const std::exception&) {
        return kSentinel;
    }
}

namespace {

struct SimplexOutcome {
    std::vector<double> x;
    double f = kSentinel;
    long evals = 0;
    bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5). Converged when the vertex spread drops below xtol in every
// coordinate and the function spread below ftol.
SimplexOutcome nelder_mead(const std::function<double(std::span<const double>)>& fn,
                           const std::vector<double>& x0, double step, int max_evals,
                           double xtol, double ftol) {
    const std::size_t dim = x0.size();
    SimplexOutcome out;

    std::vector<std::vector<double>> verts(dim + 1, x0);
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 1; i <= dim; ++i) verts[i][i - 1] += step;
    for (std::size_t i = 0; i <= dim; ++i) {
        fv[i] = fn(verts[i]);
        ++out.evals;
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    while (out.evals < max_evals) {
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

        double diameter = 0.0;
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t k = 0; k < dim; ++k) {
                diameter = std::max(diameter, std::fabs(verts[order[i]][k] - verts[best][k]));
            }
        }
        if (diameter < xtol && fv[worst] - fv[best] < ftol) {
            out.converged = true;
            break;
        }

        for (std::size_t k = 0; k < dim; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i <= dim; ++i) {
                if (i != worst) s += verts[i][k];
            }
            centroid[k] = s / static_cast<double>(dim);
        }

        for (std::size_t k = 0; k < dim; ++k) trial[k] = 2.0 * centroid[k] - verts[worst][k];
        const double fr = fn(trial);
        ++out.evals;
        if (fr < fv[best]) {
            for (std::size_t k = 0; k < dim; ++k) trial2[k] = centroid[k] + 2.0 * (trial[k] - centroid[k]);
            const double fe = fn(trial2);
            ++out.evals;
            if (fe < fr) {
                verts[worst] = trial2;
                fv[worst] = fe;
            } else {
                verts[worst] = trial;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            verts[worst] = trial;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const std::vector<double>& toward = outside ? trial : verts[worst];
            for (std::size_t k = 0; k < dim; ++k) trial2[k] = centroid[k] + 0.5 * (toward[k] - centroid[k]);
            const double fc = fn(trial2);
            ++out.evals;
            if (fc < (outside ? fr : fv[worst])) {
                verts[worst] = trial2;
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < dim; ++k) {
                        verts[i][k] = verts[best][k] + 0.5 * (verts[i][k] - verts[best][k]);
                    }
                    fv[i] = fn(verts[i]);
                    ++out.evals;
                    if (out.evals >= max_evals) break;
                }
            }
        }
    }

    const std::size_t ib = static_cast<std::size_t>(
        std::min_element(fv.begin(), fv.end()) - fv.begin());
    out.x = verts[ib];
    out.f = fv[ib];
    return out;
}

}  // namespace

FitResult fit(const CoefficientPyramid& pyramid, const SpecConfig& config,
              const FitOptions& options) {
    const double sigma_hat = estimate_sigma_mad(pyramid);
    if (!(sigma_hat > 0.0)) {
        throw std::invalid_argument(
            "degenerate noise estimate (MAD sigma = 0); cannot fit hyperparameters");
    }
    if (options.starts < 1) throw std::invalid_argument("fit needs at least one start");

    SpecConfig base = config;
    if (base.theta_gamma.size() != 2 * base.gamma_arity() ||
        base.theta_tau.size() != 2 * base.tau_arity()) {
        set_neutral_start(base, pyramid.nlevels());
    }
    const std::vector<double> u0 = pack_unconstrained(base);

    auto objective = [&](std::span<const double> u) {
        return neg_log_marginal(u, pyramid, sigma_hat, base);
    };

    SimplexOutcome best;
    long total_evals = 0;
    std::ostringstream diag;
    for (int s = 0; s < options.starts; ++s) {
        std::vector<double> u = u0;
        if (s > 0) {
            Rng rng(mix_seed({options.seed, static_cast<std::uint64_t>(s)}));
            for (double& v : u) {
                if (std::fabs(v) > 1e-8) {
                    v *= rng.uniform(0.8, 1.2);
                } else {
                    v += rng.uniform(-0.2, 0.2);
                }
            }
        }
        SimplexOutcome run = nelder_mead(objective, u, 0.25, options.max_evals, 1e-6, 1e-8);
        total_evals += run.evals;
        diag << " start " << s << ": f=" << run.f << " evals=" << run.evals;
        if (run.f < best.f) best = std::move(run);
    }

    if (best.f >= kSentinel) {
        throw numerical_error("fit: every restart failed numerically;" + diag.str());
    }

    apply_unconstrained(base, best.x);
    FitResult result;
    result.theta_gamma = base.theta_gamma;
    result.theta_tau = base.theta_tau;
    result.sigma_hat = sigma_hat;
    result.log_marginal = -best.f;
    result.n_evals = total_evals;
    result.converged = best.converged;
    result.starts = options.starts;
    return result;
}

}  // namespace nlwd
