#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nlwd/errors.hpp"
#include "nlwd/priors.hpp"
#include "nlwd/rng.hpp"
#include "oracles.hpp"

using namespace nlwd;

namespace {

double lh_deriv(double d, double dhat, double tau2, double nu, double sigma2) {
    return -(nu + 1.0) / d - (d - dhat) / sigma2 + 2.0 * tau2 * sigma2 / (d * d * d);
}

double imom_integral_quadrature(double dhat, double tau2, double nu, double sigma2) {
    // integral of |d|^-(nu+1) exp{-(d^2-2 d dhat)/(2 sigma2) - tau2 sigma2/d^2}
    auto f = [&](double d) {
        if (d == 0.0) return 0.0;
        return std::exp(log_h(d, dhat, tau2, nu, sigma2));
    };
    const double sigma = std::sqrt(sigma2);
    const double hi = std::fabs(dhat) + 14.0 * sigma;
    return oracle::integrate_auto(f, -hi, 0.0, 1e-12) +
           oracle::integrate_auto(f, 0.0, hi, 1e-12);
}

}  // namespace

TEST_CASE("normal density basics") {
    CHECK(normal_density(0.0, 0.0, 1.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
    for (double v : {0.3, 1.0, 7.5}) {
        CHECK(normal_density(2.0, 2.0, v) ==
              doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * v)).epsilon(1e-13));
    }
    const double mass = oracle::integrate_auto(
        [](double x) { return normal_density(x, 0.3, 2.5); }, 0.3 - 20.0, 0.3 + 20.0, 1e-12);
    CHECK(std::fabs(mass - 1.0) < 1e-8);
    CHECK_THROWS_AS(normal_density(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("MOM density values") {
    CHECK(mom_density(0.0, 1.0, 1, 1.0) == 0.0);
    CHECK(mom_density(1.0, 1.0, 1, 1.0) ==
          doctest::Approx(0.24197072451914337).epsilon(1e-12));
    CHECK_THROWS_AS(mom_density(1.0, -1.0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(mom_density(1.0, 1.0, 1, 0.0), std::invalid_argument);
}

TEST_CASE("MOM density integrates to one") {
    for (double tau : {0.2, 1.0, 5.0}) {
        for (int r : {1, 2}) {
            for (double sigma2 : {1.0, 2.25}) {
                CAPTURE(tau);
                CAPTURE(r);
                CAPTURE(sigma2);
                const double sd = std::sqrt(tau * sigma2 * (2.0 * r + 1.0));
                auto f = [&](double d) { return mom_density(d, tau, r, sigma2); };
                const double mass = oracle::integrate_auto(f, -14.0 * sd, 0.0, 1e-10) +
                                    oracle::integrate_auto(f, 0.0, 14.0 * sd, 1e-10);
                CHECK(std::fabs(mass - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("IMOM density values") {
    CHECK(imom_density(0.0, 1.0, 1.0, 1.0) == 0.0);
    CHECK(imom_density(1.0, 1.0, 1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0) / std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("IMOM density integrates to one") {
    for (double tau : {0.2, 1.0, 5.0}) {
        for (double nu : {1.0, 2.0}) {
            for (double sigma2 : {1.0, 2.25}) {
                CAPTURE(tau);
                CAPTURE(nu);
                CAPTURE(sigma2);
                auto f = [&](double d) { return imom_density(d, tau, nu, sigma2); };
                const double split = std::sqrt(tau * sigma2) + 1.0;
                const double mass =
                    2.0 * (oracle::integrate_auto(f, 0.0, split, 1e-10) +
                           oracle::integrate_tail(f, split, 1e-10));
                CHECK(std::fabs(mass - 1.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("mixture slab mass equals the continuous weight") {
    PriorParams p;
    p.gamma1 = 0.25;
    p.gamma2 = 0.25;
    p.tau1 = 0.2;
    p.tau2 = 0.2;
    p.sigma2 = 1.0;
    auto f = [&](double d) { return mixture_slab_density(d, p); };
    const double mass = oracle::integrate_auto(f, -1.0, 0.0, 1e-10) +
                        oracle::integrate_auto(f, 0.0, 1.0, 1e-10) +
                        oracle::integrate_tail(f, 1.0, 1e-10) +
                        oracle::integrate_tail([&](double d) { return f(-d); }, 1.0, 1e-10);
    CHECK(std::fabs(mass - (0.25 + 0.75 * 0.25)) < 1e-6);
}

TEST_CASE("moment polynomial values") {
    CHECK(m_star(0.0, 1.0, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m_star(2.0, 1.0, 1.0, 1) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(m_star(0.0, 1.0, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(m_star_star(0.0, 1.0, 1.0, 1) == 0.0);
    // x = 1 at tau = 1, sigma = 1, dhat = sqrt(2): 3x + x^3 = 4
    CHECK(m_star_star(std::sqrt(2.0), 1.0, 1.0, 1) == doctest::Approx(4.0).epsilon(1e-13));
    for (int r : {1, 2}) {
        for (double dhat : {-3.0, -0.4, 0.7, 5.0}) {
            CHECK(std::signbit(m_star_star(dhat, 0.8, 1.3, r)) == std::signbit(dhat));
        }
    }
}

TEST_CASE("moment polynomials match Gaussian moments by Monte Carlo") {
    const double tau = 1.3, sigma = 0.9, dhat = 1.1;
    const double s = std::sqrt(tau / (1.0 + tau)) * sigma;
    const double x = std::sqrt(tau / (1.0 + tau)) * dhat / sigma;
    Rng rng(987654321);
    const int n = 1000000;
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, s6 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = x * s + s * rng.normal();
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
        s6 += d2 * d2 * d2;
    }
    const double m2 = s2 / n, m3 = s3 / n;
    const double band2 = 3.0 * std::sqrt((s4 / n - m2 * m2) / n);
    const double band3 = 3.0 * std::sqrt((s6 / n - m3 * m3) / n);
    CHECK(std::fabs(m2 - s * s * m_star(dhat, tau, sigma, 1)) < band2);
    CHECK(std::fabs(m3 - s * s * s * m_star_star(dhat, tau, sigma, 1)) < band3);
}

TEST_CASE("log_h values and limits") {
    CHECK(log_h(1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-14));
    for (double d : {0.3, 1.2, 4.0}) {
        CHECK(log_h(d, 0.0, 0.7, 1.5, 1.1) ==
              doctest::Approx(log_h(-d, 0.0, 0.7, 1.5, 1.1)).epsilon(1e-14));
    }
    CHECK(log_h(1e-8, 0.0, 1.0, 1.0, 1.0) < -1e10);
    CHECK(log_h(1e8, 0.0, 1.0, 1.0, 1.0) < -1e10);
    CHECK_THROWS_AS(log_h(0.0, 1.0, 1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("laplace mode at dhat = 0 solves the quartic analytically") {
    const LaplaceFit fit = laplace_fit(0.0, 1.0, 1.0, 1.0);
    CHECK(fit.d_star > 0.0);  // positive tie-break
    CHECK(std::fabs(fit.d_star - std::sqrt(std::sqrt(3.0) - 1.0)) < 1e-9);
    CHECK(fit.sigma_star > 0.0);
}

TEST_CASE("laplace mode is stationary and a maximum across a grid") {
    for (double dhat : {-7.0, -2.0, -0.5, 0.0, 0.1, 1.0, 3.0, 20.0}) {
        for (double tau2 : {0.01, 0.5, 1.0, 4.0}) {
            for (double nu : {1.0, 2.0}) {
                for (double sigma2 : {0.25, 1.0, 4.0}) {
                    CAPTURE(dhat);
                    CAPTURE(tau2);
                    CAPTURE(nu);
                    CAPTURE(sigma2);
                    const LaplaceFit fit = laplace_fit(dhat, tau2, nu, sigma2);
                    const double scale = std::max(1.0, std::fabs(dhat)) / sigma2;
                    CHECK(std::fabs(lh_deriv(fit.d_star, dhat, tau2, nu, sigma2)) <
                          1e-10 * scale);
                    CHECK(fit.sigma_star > 0.0);
                    CHECK(std::isfinite(fit.sigma_star));

                    // global: no grid point on either half-line beats the mode
                    const double hi = std::fabs(dhat) + 12.0 * std::sqrt(sigma2);
                    bool ok = true;
                    for (int i = 1; i <= 400; ++i) {
                        const double d = hi * i / 400.0;
                        ok = ok && fit.log_h_at_mode >=
                                       log_h(d, dhat, tau2, nu, sigma2) - 1e-9;
                        ok = ok && fit.log_h_at_mode >=
                                       log_h(-d, dhat, tau2, nu, sigma2) - 1e-9;
                    }
                    CHECK(ok);
                }
            }
        }
    }
}

TEST_CASE("laplace mode approaches dhat for large coefficients") {
    const LaplaceFit fit = laplace_fit(20.0, 1.0, 1.0, 1.0);
    CHECK(fit.d_star > 18.0);
    CHECK(fit.d_star < 20.0);
    const LaplaceFit far = laplace_fit(50.0, 1.0, 1.0, 1.0);
    CHECK(50.0 - far.d_star < 3.0 * 2.0 / 50.0 + 1e-6);
}

TEST_CASE("single-mode laplace matches the integral once one mode dominates") {
    for (double dhat : {4.0, 6.0, 8.0, 10.0}) {
        for (double tau2 : {0.2, 0.5, 1.0, 2.0, 5.0}) {
            CAPTURE(dhat);
            CAPTURE(tau2);
            const LaplaceFit fit = laplace_fit(dhat, tau2, 1.0, 1.0);
            const double approx = std::sqrt(2.0 * std::numbers::pi) * fit.sigma_star *
                                  std::exp(fit.log_h_at_mode);
            const double exact = imom_integral_quadrature(dhat, tau2, 1.0, 1.0);
            CHECK(std::fabs(approx - exact) / exact < 0.05);
        }
    }
}

TEST_CASE("two-sided laplace mass tracks the quadrature integral") {
    // The per-half-line Laplace sum carries the marginal's IMOM branch.
    // Its error envelope (measured against quadrature): a few percent once
    // |dhat| clears the mode-competition band around 2-3 sigma, ~10% near
    // zero for tau2 >= 1, worst in the fold band at small tau2.
    for (double tau2 : {0.2, 1.0, 5.0}) {
        for (double dhat : {0.0, 0.5, 1.0, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0}) {
            CAPTURE(dhat);
            CAPTURE(tau2);
            const LaplaceSummary lap = laplace_summary(dhat, tau2, 1.0, 1.0);
            const double approx =
                std::sqrt(2.0 * std::numbers::pi) * std::exp(lap.log_mass);
            const double exact = imom_integral_quadrature(dhat, tau2, 1.0, 1.0);
            const double rel = std::fabs(approx - exact) / exact;
            if (dhat >= 4.0) {
                CHECK(rel < 0.05);
            } else if (tau2 >= 1.0) {
                CHECK(rel < 0.16);
            } else {
                CHECK(rel < 0.36);  // fold band, documented limitation
            }
        }
    }
    // symmetric case: the sum recovers both bumps (a single mode loses half)
    const LaplaceSummary sym = laplace_summary(0.0, 1.0, 1.0, 1.0);
    const double approx = std::sqrt(2.0 * std::numbers::pi) * std::exp(sym.log_mass);
    const double exact = imom_integral_quadrature(0.0, 1.0, 1.0, 1.0);
    CHECK(std::fabs(approx - exact) / exact < 0.10);
    const double one_mode = std::sqrt(2.0 * std::numbers::pi) * sym.mode.sigma_star *
                            std::exp(sym.mode.log_h_at_mode);
    CHECK(std::fabs(one_mode - 0.5 * approx) / approx < 1e-12);
}

TEST_CASE("parameter validation") {
    PriorParams p;
    p.gamma1 = 0.5;
    p.gamma2 = 0.5;
    p.validate();
    p.gamma1 = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.gamma1 = 0.5;
    p.tau2 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS(laplace_fit(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
}
