#include <cmath>

#include "doctest.h"
#include "fiq/fitting.hpp"
#include "fiq/kzm.hpp"
#include "fiq/rng.hpp"

using namespace fiq;

TEST_SUITE("fitting") {

TEST_CASE("special functions against frozen reference values") {
  // Reference quantiles/CDF values from standard statistical tables.
  CHECK(f_quantile(0.95, 1, 10) == doctest::Approx(4.9646027437).epsilon(1e-7));
  CHECK(f_quantile(0.95, 2, 10) == doctest::Approx(4.1028210151).epsilon(1e-7));
  CHECK(f_quantile(0.95, 1, 30) == doctest::Approx(4.1708767858).epsilon(1e-7));
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.2281388520).epsilon(1e-7));
  CHECK(student_t_quantile(0.975, 28) == doctest::Approx(2.0484071418).epsilon(1e-7));
  CHECK(chi2_cdf(11.0705, 5) == doctest::Approx(0.95).epsilon(1e-5));
  CHECK(chi2_sf(7.81, 3) == doctest::Approx(0.0501060564).epsilon(1e-6));
  CHECK(betainc_reg(2.5, 3.5, 0.3) == doctest::Approx(0.2967529893).epsilon(1e-8));
  CHECK(gammainc_reg(2.5, 1.7) == doctest::Approx(0.3614300769).epsilon(1e-8));
}

TEST_CASE("exact power law recovers the exponent with zero-width interval") {
  std::vector<std::pair<double, double>> pts;
  for (int i = 1; i <= 10; ++i) {
    double x = 0.5 * i;
    pts.emplace_back(x, 3.0 * std::sqrt(x));
  }
  PowerLawFit fit = fit_power_law(pts, 200, 1);
  CHECK(std::abs(fit.exponent - 0.5) < 1e-9);
  CHECK(std::abs(fit.prefactor - 3.0) < 1e-9);
  CHECK(fit.ci_hi - fit.ci_lo < 1e-9);
}

TEST_CASE("noisy inverse law is covered by the interval") {
  Rng rng(7);
  std::vector<std::pair<double, double>> pts;
  for (int i = 1; i <= 12; ++i) {
    double x = std::pow(1.8, i);
    pts.emplace_back(x, (1.0 / x) * (1.0 + 0.05 * rng.next_normal()));
  }
  PowerLawFit fit = fit_power_law(pts, 200, 5);
  CHECK(fit.ci_lo <= -1.0);
  CHECK(fit.ci_hi >= -1.0);
  CHECK(fit.exponent == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("power law input validation") {
  std::vector<std::pair<double, double>> two = {{1.0, 2.0}, {2.0, 3.0}};
  CHECK_THROWS_AS(fit_power_law(two), std::invalid_argument);
  std::vector<std::pair<double, double>> neg = {{1.0, 2.0}, {2.0, -3.0}, {3.0, 1.0}};
  CHECK_THROWS_AS(fit_power_law(neg), std::invalid_argument);
}

TEST_CASE("power law fit is scale equivariant") {
  std::vector<std::pair<double, double>> pts, scaled;
  Rng rng(13);
  for (int i = 1; i <= 9; ++i) {
    double x = 1.7 * i;
    double y = 2.2 * std::pow(x, -0.73) * (1.0 + 0.02 * rng.next_normal());
    pts.emplace_back(x, y);
    scaled.emplace_back(1000.0 * x, y);
  }
  PowerLawFit a = fit_power_law(pts, 50, 3);
  PowerLawFit b = fit_power_law(scaled, 50, 3);
  CHECK(std::abs(a.exponent - b.exponent) < 1e-12);
}

TEST_CASE("bootstrap interval covers the planted exponent in most trials") {
  int covered = 0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    Rng rng(hash_u64(400, t));
    std::vector<std::pair<double, double>> pts;
    for (int i = 1; i <= 10; ++i) {
      double x = std::pow(2.0, i * 0.5);
      pts.emplace_back(x, 1.7 * std::pow(x, 0.62) * std::exp(0.05 * rng.next_normal()));
    }
    PowerLawFit fit = fit_power_law(pts, 200, hash_u64(500, t));
    if (fit.ci_lo <= 0.62 && 0.62 <= fit.ci_hi) ++covered;
  }
  CHECK(covered >= trials * 8 / 10);
}

TEST_CASE("pseudo-Voigt recovers a planted Gaussian peak") {
  std::vector<std::pair<double, double>> data;
  for (int i = 0; i <= 60; ++i) {
    double x = -1.5 + 0.05 * i;
    data.emplace_back(x, 4.0 * pseudo_voigt(x, 0.1, 0.2, 1.0));
  }
  PeakFit fit = fit_pseudo_voigt(data);
  CHECK(std::abs(fit.fwhm - 0.2) / 0.2 < 0.02);
  CHECK(fit.xi == doctest::Approx(5.0).epsilon(0.02));
  CHECK(fit.eta > 0.9);
  CHECK(fit.x0 == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("pseudo-Voigt identifies a Lorentzian") {
  std::vector<std::pair<double, double>> data;
  for (int i = 0; i <= 80; ++i) {
    double x = -2.0 + 0.05 * i;
    data.emplace_back(x, 2.5 * pseudo_voigt(x, 0.0, 0.3, 0.0));
  }
  PeakFit fit = fit_pseudo_voigt(data);
  CHECK(fit.eta < 0.1);
  CHECK(std::abs(fit.fwhm - 0.3) / 0.3 < 0.02);
}

TEST_CASE("pseudo-Voigt rejects flat or unbracketed data") {
  std::vector<std::pair<double, double>> flat;
  for (int i = 0; i < 10; ++i) flat.emplace_back(i, 1.0);
  CHECK_THROWS(fit_pseudo_voigt(flat));
  std::vector<std::pair<double, double>> edge;
  for (int i = 0; i < 10; ++i) edge.emplace_back(i, i);  // maximum at the boundary
  CHECK_THROWS_AS(fit_pseudo_voigt(edge), std::invalid_argument);
  std::vector<std::pair<double, double>> few = {{0, 0}, {1, 1}, {2, 0}};
  CHECK_THROWS_AS(fit_pseudo_voigt(few), std::invalid_argument);
}

TEST_CASE("F statistic arithmetic") {
  CHECK(f_statistic(1.0, 1.0, 12, 2) == doctest::Approx(0.0));
  CHECK(f_statistic(1.5, 1.0, 12, 2, 1) == doctest::Approx(5.0));
}

TEST_CASE("F-test interval matches the analytic linear-regression interval") {
  // Linear model y = a + b x with known Gaussian noise. The analytic 95%
  // band for the slope is b_hat +- t_{0.975, n-2} * SE(b_hat); the profile
  // F-test must land within 10% of it.
  const int n = 12;
  Rng rng(21);
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = i;
    y[i] = 0.4 + 1.3 * i + 0.25 * rng.next_normal();
  }
  auto [slope, intercept] = linear_fit(x, y);
  auto chi2_at = [&](double b) {
    // Re-fit the intercept with the slope fixed.
    double a = (y - b * x).mean();
    return (y.array() - a - b * x.array()).square().sum();
  };
  double chi2_null = (y.array() - intercept - slope * x.array()).square().sum();

  std::vector<std::pair<double, double>> profile;
  for (int k = -400; k <= 400; ++k) {
    double b = slope + k * 0.0005;
    profile.emplace_back(b, chi2_at(b));
  }
  FTestInterval itv = f_test_interval(chi2_null, n, 2, profile);
  CHECK(!itv.open_lo);
  CHECK(!itv.open_hi);

  double mx = x.mean();
  double sxx = (x.array() - mx).square().sum();
  double sigma2 = chi2_null / (n - 2);
  double se = std::sqrt(sigma2 / sxx);
  double tq = 2.2281388520;  // t_{0.975, 10}, frozen reference value
  double lo_ref = slope - tq * se, hi_ref = slope + tq * se;
  CHECK(std::abs(itv.lo - lo_ref) < 0.1 * (hi_ref - lo_ref));
  CHECK(std::abs(itv.hi - hi_ref) < 0.1 * (hi_ref - lo_ref));
}

TEST_CASE("open-ended profiles are flagged") {
  std::vector<std::pair<double, double>> profile = {{0.0, 1.0}, {0.5, 1.001}, {1.0, 1.002}};
  FTestInterval itv = f_test_interval(1.0, 10, 2, profile);
  CHECK(itv.open_lo);
  CHECK(itv.open_hi);
}

TEST_CASE("KZM exponents at the documented constants") {
  KzmPrediction p = kzm_exponents();  // 3D XY: nu = 0.6717, beta = 0.3486, z = 1, d = 2
  CHECK(p.op_growth == doctest::Approx(0.19).epsilon(0.03));
  CHECK(p.defect_decay == doctest::Approx(-0.80).epsilon(0.015));
  CHECK(p.length_growth == doctest::Approx(0.40).epsilon(0.015));

  KzmConstants ising_chain{1.0, 0.125, 1.0, 1.0};
  CHECK(kzm_exponents(ising_chain).defect_decay == doctest::Approx(-0.5));

  KzmConstants huge_nu{1e9, 0.3486, 2.0, 2.0};
  CHECK(kzm_exponents(huge_nu).length_growth == doctest::Approx(0.5).epsilon(1e-6));

  CHECK_THROWS_AS(kzm_exponents({-1.0, 0.3, 1.0, 2.0}), std::invalid_argument);
}

}  // TEST_SUITE
