#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlwd/errors.hpp"
#include "nlwd/hyperspec.hpp"
#include "nlwd/rng.hpp"

using namespace nlwd;

TEST_CASE("logit specification") {
    const std::array<double, 2> theta = {2.0, 1.0};
    CHECK(gamma_logit(2, theta) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gamma_logit(1, theta) ==
          doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))).epsilon(1e-14));
    double prev = 1.0;
    for (int l = 1; l <= 12; ++l) {
        const double g = gamma_logit(l, theta);
        CHECK(g < prev);
        prev = g;
    }
    CHECK_THROWS_AS(gamma_logit(1, std::array<double, 2>{2.0, -1.0}),
                    std::invalid_argument);
}

TEST_CASE("generalized logit specification") {
    CHECK(gamma_genlogit(2, std::array<double, 3>{2.0, 1.0, 2.0}) ==
          doctest::Approx(0.25).epsilon(1e-14));
    // exponent one reduces to the plain logit
    for (double t1 : {-3.0, 0.0, 2.0, 40.0}) {
        for (double t2 : {0.2, 1.0, 4.0}) {
            for (int l = 1; l <= 10; ++l) {
                const double a = gamma_genlogit(l, std::array<double, 3>{t1, t2, 1.0});
                const double b = gamma_logit(l, std::array<double, 2>{t1, t2});
                CHECK(std::fabs(a - b) < 1e-14);
            }
        }
    }
    for (int l = -50; l <= 50; l += 10) {
        const double g = gamma_genlogit(l, std::array<double, 3>{1.0, 0.7, 2.5});
        CHECK(g > 0.0);
        CHECK(g < 1.0);
    }
}

TEST_CASE("hyperbolic secant specification") {
    CHECK(gamma_hypsec(2, std::array<double, 2>{2.0, 1.0}) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // theta1 - theta2 l = 1: (2/pi) atan(exp(pi/2))
    CHECK(gamma_hypsec(1, std::array<double, 2>{2.0, 1.0}) ==
          doctest::Approx(0.8695181135728436).epsilon(1e-12));
    CHECK(gamma_hypsec(-1000000, std::array<double, 2>{0.0, 0.01}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gamma_hypsec(1000000, std::array<double, 2>{0.0, 0.01}) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("generalized normal specification") {
    CHECK(gamma_gennormal(5, std::array<double, 3>{5.0, 2.0, 2.0}) == 0.5);
    // theta2 = 2 at l = theta1 - theta3: 1/2 + erf(1)/2
    CHECK(gamma_gennormal(3, std::array<double, 3>{5.0, 2.0, 2.0}) ==
          doctest::Approx(0.5 + 0.5 * std::erf(1.0)).epsilon(1e-12));
    double prev = 1.0;
    for (int l = 1; l <= 9; ++l) {
        const double g = gamma_gennormal(l, std::array<double, 3>{5.0, 2.0, 2.0});
        CHECK(g < prev);
        CHECK(g > 0.0);
        CHECK(g < 1.0);
        prev = g;
    }
    // theta2 = 2 recovers the normal CDF with scale theta3/sqrt(2)
    for (double t1 : {2.0, 6.5}) {
        for (double t3 : {0.8, 2.0, 5.0}) {
            for (int l = 1; l <= 10; ++l) {
                const double g = gamma_gennormal(l, std::array<double, 3>{t1, 2.0, t3});
                const double z = (t1 - l) / (t3 / std::sqrt(2.0));
                const double phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
                CHECK(std::fabs(g - phi) < 1e-10);
            }
        }
    }
}

TEST_CASE("regularized lower incomplete gamma") {
    CHECK(regularized_lower_gamma(0.7, 0.0) == 0.0);
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        CHECK(regularized_lower_gamma(1.0, x) ==
              doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
    }
    CHECK(std::fabs(regularized_lower_gamma(0.5, 1.0) - std::erf(1.0)) < 1e-12);
    for (double x : {0.2, 0.9, 1.7, 3.0}) {
        CHECK(std::fabs(regularized_lower_gamma(0.5, x * x) - std::erf(x)) < 1e-12);
    }
    // large-argument saturation and domain errors
    CHECK(regularized_lower_gamma(2.0, 1e8) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(regularized_lower_gamma(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(regularized_lower_gamma(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("tau specifications") {
    CHECK(tau_polynom(2, std::array<double, 2>{1.0, 1.0}) == doctest::Approx(0.5));
    CHECK(tau_polynom(3, std::array<double, 2>{3.0, 2.0}) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    for (double t2 : {0.1, 1.0, 7.0}) {
        CHECK(tau_polynom(1, std::array<double, 2>{2.4, t2}) == doctest::Approx(2.4));
    }
    CHECK_THROWS_AS(tau_polynom(0, std::array<double, 2>{1.0, 1.0}),
                    std::invalid_argument);

    CHECK(tau_doubleexp(0, std::array<double, 4>{1.0, 0.5, 1.0, 2.0}) ==
          doctest::Approx(2.0).epsilon(1e-14));
    double prev = 1e300;
    for (int l = 1; l <= 10; ++l) {
        const double t = tau_doubleexp(l, std::array<double, 4>{1.0, 0.5, 1.0, 2.0});
        CHECK(t > 0.0);
        CHECK(t < prev);
        prev = t;
    }
    CHECK_THROWS_AS(tau_doubleexp(1, std::array<double, 4>{1.0, 0.5, 0.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("method names") {
    const auto& names = all_method_names();
    REQUIRE(names.size() == 24);
    CHECK(names.front() == "mom-logit-polynom");
    CHECK(names.back() == "mixture-gennormal-doubleexp");
    for (const auto& name : names) {
        CHECK(SpecConfig::from_method_name(name).method_name() == name);
    }
    CHECK_THROWS_AS(SpecConfig::from_method_name("mixture-logit"), data_error);
    CHECK_THROWS_AS(SpecConfig::from_method_name("soft-logit-polynom"), data_error);
}

TEST_CASE("resolve_levels evaluates families and applies pinning") {
    SpecConfig c = SpecConfig::from_method_name("mixture-logit-polynom");
    c.theta_gamma = {0.0, 1e-13, 0.0, 1e-13};
    c.theta_tau = {1.0, 1.0, 2.0, 0.5};
    const auto levels = resolve_levels(c, 6, 4.0);
    REQUIRE(levels.size() == 6);
    for (int l = 1; l <= 6; ++l) {
        const PriorParams& p = levels[static_cast<std::size_t>(l - 1)];
        CHECK(p.gamma1 == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(p.gamma2 == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(p.tau1 == doctest::Approx(1.0 / l));
        CHECK(p.tau2 == doctest::Approx(2.0 * std::pow(l, -0.5)));
        CHECK(p.sigma2 == 4.0);
    }

    c.slab = SlabFamily::mom;
    for (const PriorParams& p : resolve_levels(c, 6, 1.0)) CHECK(p.gamma2 == 0.0);
    c.slab = SlabFamily::imom;
    for (const PriorParams& p : resolve_levels(c, 6, 1.0)) CHECK(p.gamma1 == 0.0);

    SpecConfig g = SpecConfig::from_method_name("mixture-gennormal-polynom");
    g.theta_gamma = {5.0, 2.0, 2.0, 5.0, 2.0, 2.0};
    g.theta_tau = {1.0, 1.0, 1.0, 1.0};
    CHECK(resolve_levels(g, 10, 1.0)[4].gamma1 == 0.5);
}

TEST_CASE("config validation") {
    SpecConfig c = SpecConfig::from_method_name("mixture-logit-polynom");
    CHECK_THROWS_AS(resolve_levels(c, 4, 1.0), std::invalid_argument);  // no thetas yet
    c.theta_gamma = {1.0, 1.0, 1.0};
    c.theta_tau = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.theta_gamma = {1.0, -1.0, 1.0, 1.0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("unconstrained reparameterization") {
    SpecConfig c = SpecConfig::from_method_name("mixture-genlogit-doubleexp");
    const ParamLayout layout = param_layout(c);
    const std::vector<bool> expect = {false, true, true, false, true, true,
                                      true,  true, true, true,  true, true,
                                      true,  true};
    CHECK(layout.positive == expect);
    CHECK(layout.active.size() == 14);

    // exp map: 0 -> 1
    set_neutral_start(c, 6);
    std::vector<double> u = pack_unconstrained(c);
    std::fill(u.begin(), u.end(), 0.0);
    apply_unconstrained(c, u);
    for (std::size_t i = 1; i <= 2; ++i) CHECK(c.theta_gamma[i] == 1.0);
    for (double v : c.theta_tau) CHECK(v == 1.0);

    // round trip on random vectors
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        for (double& v : u) v = rng.uniform(-8.0, 8.0);
        apply_unconstrained(c, u);
        const std::vector<double> back = pack_unconstrained(c);
        REQUIRE(back.size() == u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK(std::fabs(back[i] - u[i]) < 1e-12);
        }
    }
}

TEST_CASE("active subsets for degenerate slabs") {
    SpecConfig c = SpecConfig::from_method_name("mom-hypsec-polynom");
    ParamLayout layout = param_layout(c);
    CHECK(layout.active == std::vector<std::size_t>{0, 1, 4, 5});
    c.slab = SlabFamily::imom;
    layout = param_layout(c);
    CHECK(layout.active == std::vector<std::size_t>{2, 3, 6, 7});
}

TEST_CASE("neutral starts hit the 0.9 / 0.1 targets") {
    const int L = 6;
    for (auto gf : {GammaFamily::logit, GammaFamily::genlogit, GammaFamily::hypsec,
                    GammaFamily::gennormal}) {
        for (auto tf : {TauFamily::polynom, TauFamily::doubleexp}) {
            SpecConfig c;
            c.gamma_family = gf;
            c.tau_family = tf;
            set_neutral_start(c, L);
            const auto levels = resolve_levels(c, L, 1.0);
            CHECK(levels.front().gamma1 == doctest::Approx(0.9).epsilon(1e-9));
            CHECK(levels.back().gamma1 == doctest::Approx(0.1).epsilon(1e-9));
            CHECK(levels.front().tau1 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(levels.front().tau2 == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
