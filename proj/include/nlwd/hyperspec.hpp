#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nlwd/priors.hpp"

namespace nlwd {

enum class SlabFamily { mom, imom, mixture };
enum class GammaFamily { logit, genlogit, hypsec, gennormal };
enum class TauFamily { polynom, doubleexp };

std::string to_string(SlabFamily f);
std::string to_string(GammaFamily f);
std::string to_string(TauFamily f);
SlabFamily slab_from_string(const std::string& s);
GammaFamily gamma_from_string(const std::string& s);
TauFamily tau_from_string(const std::string& s);

// One analysis method: slab family x mixture-probability specification x
// scale specification, with fixed MOM order r and IMOM shape nu.
// theta_gamma and theta_tau hold the hyperparameters for both branches
// back to back (MOM branch first); for the degenerate slab families the
// pinned branch's entries are carried but inert.
struct SpecConfig {
    SlabFamily slab = SlabFamily::mixture;
    GammaFamily gamma_family = GammaFamily::logit;
    TauFamily tau_family = TauFamily::polynom;
    std::vector<double> theta_gamma;
    std::vector<double> theta_tau;
    int r = 1;
    double nu = 1.0;

    std::size_t gamma_arity() const;  // per branch: 2 (logit, hypsec) or 3
    std::size_t tau_arity() const;    // per branch: 2 (polynom) or 4

    std::string method_name() const;  // e.g. "mixture-logit-polynom"
    static SpecConfig from_method_name(const std::string& name);

    void validate() const;  // arity and positivity checks
};

// The 24 method names: {mom,imom,mixture}-{logit,genlogit,hypsec,gennormal}-
// {polynom,doubleexp}.
const std::vector<std::string>& all_method_names();

// Mixture-probability specifications; theta spans one branch's parameters.
double gamma_logit(int l, std::span<const double> theta);
double gamma_genlogit(int l, std::span<const double> theta);
double gamma_hypsec(int l, std::span<const double> theta);
double gamma_gennormal(int l, std::span<const double> theta);

// Scale specifications.
double tau_polynom(int l, std::span<const double> theta);
double tau_doubleexp(int l, std::span<const double> theta);

// P(a, x) = gamma(a, x) / Gamma(a), absolute accuracy ~1e-12.
double regularized_lower_gamma(double a, double x);

// Evaluates the configured families at levels 1..L and applies the slab
// pinning (mom -> gamma2 = 0, imom -> gamma1 = 0).
std::vector<PriorParams> resolve_levels(const SpecConfig& config, int L, double sigma2);

// Optimizer-facing reparameterization. Positive parameters map through
// exp/log, unconstrained ones through identity; only the active branch's
// parameters appear in the unconstrained vector. The exp map clamps its
// argument to [-300, 300] to keep every constrained value finite.
struct ParamLayout {
    std::vector<bool> positive;        // over [theta_gamma, theta_tau]
    std::vector<std::size_t> active;   // indices optimized for this slab
};
ParamLayout param_layout(const SpecConfig& config);

// Active constrained parameters -> unconstrained vector and back.
std::vector<double> pack_unconstrained(const SpecConfig& config);
void apply_unconstrained(SpecConfig& config, std::span<const double> u);

// Starting values giving gamma ~ 0.9 at l = 1 decaying to ~ 0.1 at l = L
// and tau = 1 at l = 1.
void set_neutral_start(SpecConfig& config, int L);

}  // namespace nlwd
