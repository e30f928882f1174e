#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

namespace fiq {

// ---- special functions (used by the statistical tests) ----

// Regularized incomplete beta I_x(a, b).
double betainc_reg(double a, double b, double x);
// Regularized lower incomplete gamma P(a, x).
double gammainc_reg(double a, double x);

double student_t_cdf(double t, double df);
double f_cdf(double x, double d1, double d2);
double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);

double student_t_quantile(double p, double df);
double f_quantile(double p, double d1, double d2);

// ---- basic least squares ----

// Ordinary least squares y ~ a + b x; returns (slope, intercept).
std::pair<double, double> linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// ---- power-law fits with bootstrap ----

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double boot_mean = 0.0;
  double ci_lo = 0.0;  // 2.5th percentile over bootstrap resamples
  double ci_hi = 0.0;  // 97.5th percentile
  int resamples = 0;
};

// Least-squares line in log-log space plus a seeded bootstrap over the data
// points (resampled with replacement). Requires >= 3 points, all positive.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points,
                          int resamples = 200, uint64_t seed = 0);

// ---- Pseudo-Voigt peak fit ----

struct PeakFit {
  double amplitude = 0.0;
  double x0 = 0.0;
  double fwhm = 0.0;   // Gamma
  double eta = 0.0;    // Gaussian fraction in [0, 1]
  double xi = 0.0;     // correlation length 1 / Gamma
  bool eta_pinned = false;
  double cost = 0.0;   // final sum of squared residuals
  int iterations = 0;
};

// Profile value eta*G + (1-eta)*L with shared FWHM; G and L are unit-area.
double pseudo_voigt(double x, double x0, double fwhm, double eta);

// Nonlinear least squares over (amplitude, x0, fwhm, eta) by
// Levenberg-Marquardt. Needs >= 5 points bracketing a maximum; throws on
// non-convergence.
PeakFit fit_pseudo_voigt(const std::vector<std::pair<double, double>>& slice);

// ---- F-test confidence interval ----

// F statistic comparing a fit with p_fix parameters fixed against the null
// best fit: (chi2_f / chi2_0 - 1) * (n - p) / p_fix.
double f_statistic(double chi2_fixed, double chi2_null, int n_points, int n_params, int p_fix = 1);

struct FTestInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool open_lo = false;  // profile never crossed on that side
  bool open_hi = false;
  double f_crit = 0.0;
  double chi2_crit = 0.0;
};

// 95% interval for one parameter from its chi^2 profile: the parameter range
// where the F statistic stays below the critical value of F(p_fix, n - p).
// `profile` holds (parameter value, chi2 with that parameter fixed) pairs.
FTestInterval f_test_interval(double chi2_null, int n_points, int n_params,
                              const std::vector<std::pair<double, double>>& profile,
                              double confidence = 0.95);

}  // namespace fiq
