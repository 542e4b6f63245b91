#include "nlwd/hyperspec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nlwd/errors.hpp"

namespace nlwd {

namespace {

constexpr double kPi = std::numbers::pi;

void require_arity(std::span<const double> theta, std::size_t n, const char* fam) {
    if (theta.size() != n) {
        std::ostringstream msg;
        msg << fam << " expects " << n << " parameters, got " << theta.size();
        throw std::invalid_argument(msg.str());
    }
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be positive, got " << v;
        throw std::invalid_argument(msg.str());
    }
}

double softplus(double u) {
    // log(1 + exp(u)) without overflow
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

}  // namespace

std::string to_string(SlabFamily f) {
    switch (f) {
        case SlabFamily::mom: return "mom";
        case SlabFamily::imom: return "imom";
        case SlabFamily::mixture: return "mixture";
    }
    return "?";
}

std::string to_string(GammaFamily f) {
    switch (f) {
        case GammaFamily::logit: return "logit";
        case GammaFamily::genlogit: return "genlogit";
        case GammaFamily::hypsec: return "hypsec";
        case GammaFamily::gennormal: return "gennormal";
    }
    return "?";
}

std::string to_string(TauFamily f) {
    switch (f) {
        case TauFamily::polynom: return "polynom";
        case TauFamily::doubleexp: return "doubleexp";
    }
    return "?";
}

SlabFamily slab_from_string(const std::string& s) {
    if (s == "mom") return SlabFamily::mom;
    if (s == "imom") return SlabFamily::imom;
    if (s == "mixture") return SlabFamily::mixture;
    throw data_error("unknown slab family '" + s + "'; supported: mom imom mixture");
}

GammaFamily gamma_from_string(const std::string& s) {
    if (s == "logit") return GammaFamily::logit;
    if (s == "genlogit") return GammaFamily::genlogit;
    if (s == "hypsec") return GammaFamily::hypsec;
    if (s == "gennormal") return GammaFamily::gennormal;
    throw data_error("unknown gamma specification '" + s +
                     "'; supported: logit genlogit hypsec gennormal");
}

TauFamily tau_from_string(const std::string& s) {
    if (s == "polynom") return TauFamily::polynom;
    if (s == "doubleexp") return TauFamily::doubleexp;
    throw data_error("unknown tau specification '" + s + "'; supported: polynom doubleexp");
}

std::size_t SpecConfig::gamma_arity() const {
    switch (gamma_family) {
        case GammaFamily::logit:
        case GammaFamily::hypsec: return 2;
        case GammaFamily::genlogit:
        case GammaFamily::gennormal: return 3;
    }
    return 0;
}

std::size_t SpecConfig::tau_arity() const {
    return tau_family == TauFamily::polynom ? 2 : 4;
}

std::string SpecConfig::method_name() const {
    return to_string(slab) + "-" + to_string(gamma_family) + "-" + to_string(tau_family);
}

SpecConfig SpecConfig::from_method_name(const std::string& name) {
    const auto p1 = name.find('-');
    const auto p2 = name.find('-', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) {
        throw data_error("method name '" + name + "' is not of the form slab-gamma-tau");
    }
    SpecConfig c;
    c.slab = slab_from_string(name.substr(0, p1));
    c.gamma_family = gamma_from_string(name.substr(p1 + 1, p2 - p1 - 1));
    c.tau_family = tau_from_string(name.substr(p2 + 1));
    return c;
}

const std::vector<std::string>& all_method_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (auto slab : {SlabFamily::mom, SlabFamily::imom, SlabFamily::mixture}) {
            for (auto g : {GammaFamily::logit, GammaFamily::genlogit, GammaFamily::hypsec,
                           GammaFamily::gennormal}) {
                for (auto t : {TauFamily::polynom, TauFamily::doubleexp}) {
                    v.push_back(to_string(slab) + "-" + to_string(g) + "-" + to_string(t));
                }
            }
        }
        return v;
    }();
    return names;
}

void SpecConfig::validate() const {
    if (theta_gamma.size() != 2 * gamma_arity()) {
        throw std::invalid_argument("theta_gamma must have " +
                                    std::to_string(2 * gamma_arity()) + " entries, has " +
                                    std::to_string(theta_gamma.size()));
    }
    if (theta_tau.size() != 2 * tau_arity()) {
        throw std::invalid_argument("theta_tau must have " +
                                    std::to_string(2 * tau_arity()) + " entries, has " +
                                    std::to_string(theta_tau.size()));
    }
    const ParamLayout layout = param_layout(*this);
    const std::size_t ng = theta_gamma.size();
    for (std::size_t i = 0; i < layout.positive.size(); ++i) {
        const double v = i < ng ? theta_gamma[i] : theta_tau[i - ng];
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite hyperparameter");
        if (layout.positive[i]) require_positive(v, "slope/scale hyperparameter");
    }
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    require_positive(nu, "nu");
}

double gamma_logit(int l, std::span<const double> theta) {
    require_arity(theta, 2, "logit");
    require_positive(theta[1], "logit theta2");
    const double u = theta[0] - theta[1] * l;
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double gamma_genlogit(int l, std::span<const double> theta) {
    require_arity(theta, 3, "genlogit");
    require_positive(theta[1], "genlogit theta2");
    require_positive(theta[2], "genlogit theta3");
    const double u = theta[0] - theta[1] * l;
    return std::exp(-theta[2] * softplus(-u));
}

double gamma_hypsec(int l, std::span<const double> theta) {
    require_arity(theta, 2, "hypsec");
    require_positive(theta[1], "hypsec theta2");
    const double v = 0.5 * kPi * (theta[0] - theta[1] * l);
    if (v <= 0.0) return (2.0 / kPi) * std::atan(std::exp(v));
    return 1.0 - (2.0 / kPi) * std::atan(std::exp(-v));
}

double gamma_gennormal(int l, std::span<const double> theta) {
    require_arity(theta, 3, "gennormal");
    require_positive(theta[1], "gennormal theta2");
    require_positive(theta[2], "gennormal theta3");
    const double t = theta[0] - l;
    if (t == 0.0) return 0.5;
    const double x = std::exp(theta[1] * (std::log(std::fabs(t)) - std::log(theta[2])));
    const double p = regularized_lower_gamma(1.0 / theta[1], x);
    return 0.5 + (t > 0.0 ? 0.5 : -0.5) * p;
}

double tau_polynom(int l, std::span<const double> theta) {
    require_arity(theta, 2, "polynom");
    require_positive(theta[0], "polynom theta1");
    require_positive(theta[1], "polynom theta2");
    if (l < 1) throw std::invalid_argument("polynom tau requires level l >= 1");
    return theta[0] * std::pow(static_cast<double>(l), -theta[1]);
}

double tau_doubleexp(int l, std::span<const double> theta) {
    require_arity(theta, 4, "doubleexp");
    for (int i = 0; i < 4; ++i) require_positive(theta[i], "doubleexp theta");
    return theta[0] * std::exp(-theta[1] * l) + theta[2] * std::exp(-theta[3] * l);
}

double regularized_lower_gamma(double a, double x) {
    require_positive(a, "a");
    if (x < 0.0) throw std::invalid_argument("regularized_lower_gamma requires x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    constexpr double eps = 1e-17;
    constexpr int max_iter = 10000;
    if (x < a + 1.0) {
        // series for P(a, x)
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < max_iter; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * eps) {
                return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
            }
        }
        throw numerical_error("regularized_lower_gamma: series did not converge");
    }
    // continued fraction for Q(a, x)
    constexpr double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            return 1.0 - h * std::exp(a * std::log(x) - x - std::lgamma(a));
        }
    }
    throw numerical_error("regularized_lower_gamma: continued fraction did not converge");
}

namespace {

double eval_gamma(GammaFamily f, int l, std::span<const double> theta) {
    switch (f) {
        case GammaFamily::logit: return gamma_logit(l, theta);
        case GammaFamily::genlogit: return gamma_genlogit(l, theta);
        case GammaFamily::hypsec: return gamma_hypsec(l, theta);
        case GammaFamily::gennormal: return gamma_gennormal(l, theta);
    }
    throw std::invalid_argument("bad gamma family");
}

double eval_tau(TauFamily f, int l, std::span<const double> theta) {
    return f == TauFamily::polynom ? tau_polynom(l, theta) : tau_doubleexp(l, theta);
}

}  // namespace

std::vector<PriorParams> resolve_levels(const SpecConfig& config, int L, double sigma2) {
    config.validate();
    require_positive(sigma2, "sigma2");
    if (L < 1) throw std::invalid_argument("level count must be >= 1");

    const std::size_t ga = config.gamma_arity();
    const std::size_t ta = config.tau_arity();
    const std::span<const double> g1(config.theta_gamma.data(), ga);
    const std::span<const double> g2(config.theta_gamma.data() + ga, ga);
    const std::span<const double> t1(config.theta_tau.data(), ta);
    const std::span<const double> t2(config.theta_tau.data() + ta, ta);

    std::vector<PriorParams> out;
    out.reserve(static_cast<std::size_t>(L));
    for (int l = 1; l <= L; ++l) {
        PriorParams p;
        p.gamma1 = config.slab == SlabFamily::imom ? 0.0 : eval_gamma(config.gamma_family, l, g1);
        p.gamma2 = config.slab == SlabFamily::mom ? 0.0 : eval_gamma(config.gamma_family, l, g2);
        p.tau1 = eval_tau(config.tau_family, l, t1);
        p.tau2 = eval_tau(config.tau_family, l, t2);
        p.sigma2 = sigma2;
        p.r = config.r;
        p.nu = config.nu;
        p.validate();
        out.push_back(p);
    }
    return out;
}

ParamLayout param_layout(const SpecConfig& config) {
    ParamLayout layout;
    auto gamma_pattern = [&](std::vector<bool>& v) {
        switch (config.gamma_family) {
            case GammaFamily::logit:
            case GammaFamily::hypsec:
                v.insert(v.end(), {false, true});
                break;
            case GammaFamily::genlogit:
            case GammaFamily::gennormal:
                v.insert(v.end(), {false, true, true});
                break;
        }
    };
    gamma_pattern(layout.positive);
    gamma_pattern(layout.positive);
    const std::size_t ntau = 2 * config.tau_arity();
    layout.positive.insert(layout.positive.end(), ntau, true);

    const std::size_t ga = config.gamma_arity();
    const std::size_t ta = config.tau_arity();
    auto add_range = [&](std::size_t from, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) layout.active.push_back(from + i);
    };
    switch (config.slab) {
        case SlabFamily::mom:
            add_range(0, ga);
            add_range(2 * ga, ta);
            break;
        case SlabFamily::imom:
            add_range(ga, ga);
            add_range(2 * ga + ta, ta);
            break;
        case SlabFamily::mixture:
            add_range(0, 2 * ga + 2 * ta);
            break;
    }
    return layout;
}

std::vector<double> pack_unconstrained(const SpecConfig& config) {
    config.validate();
    const ParamLayout layout = param_layout(config);
    const std::size_t ng = config.theta_gamma.size();
    std::vector<double> u;
    u.reserve(layout.active.size());
    for (std::size_t idx : layout.active) {
        const double v = idx < ng ? config.theta_gamma[idx] : config.theta_tau[idx - ng];
        u.push_back(layout.positive[idx] ? std::log(v) : v);
    }
    return u;
}

void apply_unconstrained(SpecConfig& config, std::span<const double> u) {
    const ParamLayout layout = param_layout(config);
    if (u.size() != layout.active.size()) {
        throw std::invalid_argument("unconstrained vector has wrong length");
    }
    const std::size_t ng = config.theta_gamma.size();
    for (std::size_t k = 0; k < u.size(); ++k) {
        const std::size_t idx = layout.active[k];
        double v = u[k];
        if (layout.positive[idx]) v = std::exp(std::clamp(v, -300.0, 300.0));
        if (idx < ng) {
            config.theta_gamma[idx] = v;
        } else {
            config.theta_tau[idx - ng] = v;
        }
    }
}

void set_neutral_start(SpecConfig& config, int L) {
    if (L < 1) throw std::invalid_argument("level count must be >= 1");
    const double span = L > 1 ? static_cast<double>(L - 1) : 1.0;

    std::vector<double> g;
    switch (config.gamma_family) {
        case GammaFamily::logit: {
            const double target = std::log(9.0);  // logit of 0.9
            const double slope = 2.0 * target / span;
            g = {target + slope, slope};
            break;
        }
        case GammaFamily::genlogit: {
            const double target = std::log(9.0);
            const double slope = 2.0 * target / span;
            g = {target + slope, slope, 1.0};
            break;
        }
        case GammaFamily::hypsec: {
            // gamma = (2/pi) atan(exp((pi/2) u)): solve u for gamma = 0.9
            const double target = std::log(std::tan(0.45 * kPi)) * 2.0 / kPi;
            const double slope = 2.0 * target / span;
            g = {target + slope, slope};
            break;
        }
        case GammaFamily::gennormal: {
            constexpr double erfinv08 = 0.9061938024368232;
            const double center = L > 1 ? 0.5 * (1.0 + L) : 2.0;
            const double scale = L > 1 ? 0.5 * span / erfinv08 : 1.0 / erfinv08;
            g = {center, 2.0, scale};
            break;
        }
    }
    config.theta_gamma.clear();
    config.theta_gamma.insert(config.theta_gamma.end(), g.begin(), g.end());
    config.theta_gamma.insert(config.theta_gamma.end(), g.begin(), g.end());

    std::vector<double> t;
    if (config.tau_family == TauFamily::polynom) {
        t = {1.0, 1.0};
    } else {
        const double c = 1.0 / (std::exp(-0.5) + std::exp(-1.0));
        t = {c, 0.5, c, 1.0};
    }
    config.theta_tau.clear();
    config.theta_tau.insert(config.theta_tau.end(), t.begin(), t.end());
    config.theta_tau.insert(config.theta_tau.end(), t.begin(), t.end());
}

}  // namespace nlwd
