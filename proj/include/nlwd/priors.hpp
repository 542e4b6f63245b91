#pragma once

namespace nlwd {

// Per-level parameter bundle for the three-component coefficient prior:
// point mass at zero, MOM slab, IMOM slab. gamma1 weights the MOM branch,
// gamma2 the IMOM branch conditional on leaving the MOM branch; zero
// endpoints encode the degenerate two-component models.
struct PriorParams {
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double tau1 = 1.0;
    double tau2 = 1.0;
    double sigma2 = 1.0;
    int r = 1;
    double nu = 1.0;

    void validate() const;  // throws std::invalid_argument
};

// Laplace approximation of the IMOM convolution integral around the global
// maximizer of h(d) = |d|^-(nu+1) exp{-(d^2 - 2 d dhat)/(2 sigma2) - tau2 sigma2 / d^2}.
struct LaplaceFit {
    double d_star = 0.0;
    double sigma_star = 0.0;     // (-1 / L_h''(d_star))^(1/2)
    double log_h_at_mode = 0.0;
};

double normal_density(double x, double mean, double var);
double log_normal_density(double x, double mean, double var);

// log((2r-1)!!)
double log_odd_double_factorial(int r);

// MOM prior density with order r and variance component tau*sigma2.
double mom_density(double d, double tau, int r, double sigma2);

// IMOM prior density with shape nu and variance component tau*sigma2.
double imom_density(double d, double tau, double nu, double sigma2);

// Continuous part of the three-component mixture prior,
// gamma1 * mom + (1-gamma1) * gamma2 * imom; total mass gamma1 + (1-gamma1)*gamma2.
double mixture_slab_density(double d, const PriorParams& p);

// Gaussian-moment polynomials in x = sqrt(tau1/(1+tau1)) * dhat / sigma.
// m_star is E[(x+Z)^(2r)]/(2r-1)!!, m_star_star is E[(x+Z)^(2r+1)]/(2r-1)!!
// for Z standard normal; both carry the marginal and posterior-mean MOM terms.
double m_star(double dhat, double tau1, double sigma, int r);
double m_star_star(double dhat, double tau1, double sigma, int r);

double log_h(double d, double dhat, double tau2, double nu, double sigma2);

// Global maximizer of log_h over d != 0. Searches both half-lines through
// the stationarity quartic; exact tie at dhat = 0 resolves to the positive
// root. Throws numerical_error if root polishing fails to converge.
LaplaceFit laplace_fit(double dhat, double tau2, double nu, double sigma2);

// Laplace evaluation of the IMOM convolution integral. The integrand has a
// maximum on each half-line (the essential singularity at zero splits the
// domain), so the integral is approximated by the sum of the per-half-line
// Laplace masses; a single-mode Laplace loses half the mass as dhat -> 0.
// log_mass = log sum_i sigma*_i h(d*_i), one term per half-line, with the
// sqrt(2 pi) factor left to the caller.
struct LaplaceSummary {
    LaplaceFit mode;      // global maximizer
    double log_mass = 0.0;
};
LaplaceSummary laplace_summary(double dhat, double tau2, double nu, double sigma2);

}  // namespace nlwd
