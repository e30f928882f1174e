#include "fiq/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "fiq/rng.hpp"

namespace fiq {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

template <typename Cdf>
double quantile_by_bisection(double p, double lo, double hi, const Cdf& cdf) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double betainc_reg(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double gammainc_reg(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series representation.
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 3e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Continued fraction for the upper tail (modified Lentz).
  constexpr double kFpMin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / kFpMin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) break;
  }
  double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  return 1.0 - q;
}

double student_t_cdf(double t, double df) {
  double x = df / (df + t * t);
  double tail = 0.5 * betainc_reg(df / 2.0, 0.5, x);
  return t >= 0 ? 1.0 - tail : tail;
}

double f_cdf(double x, double d1, double d2) {
  if (x <= 0.0) return 0.0;
  return betainc_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double chi2_cdf(double x, double df) { return gammainc_reg(df / 2.0, x / 2.0); }
double chi2_sf(double x, double df) { return 1.0 - chi2_cdf(x, df); }

double student_t_quantile(double p, double df) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("t quantile: p must be in (0,1)");
  return quantile_by_bisection(p, -1e8, 1e8, [df](double t) { return student_t_cdf(t, df); });
}

double f_quantile(double p, double d1, double d2) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("F quantile: p must be in (0,1)");
  return quantile_by_bisection(p, 0.0, 1e8, [&](double x) { return f_cdf(x, d1, d2); });
}

std::pair<double, double> linear_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points of equal length");
  double mx = x.mean(), my = y.mean();
  double sxx = (x.array() - mx).square().sum();
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points, int resamples,
                          uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  Eigen::VectorXd lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (points[i].first <= 0.0 || points[i].second <= 0.0)
      throw std::invalid_argument("fit_power_law: all coordinates must be positive");
    lx[i] = std::log(points[i].first);
    ly[i] = std::log(points[i].second);
  }
  auto [slope, intercept] = linear_fit(lx, ly);

  PowerLawFit fit;
  fit.exponent = slope;
  fit.prefactor = std::exp(intercept);
  fit.resamples = resamples;

  Rng rng(hash_u64(seed, 0x9d2c5680u, static_cast<uint64_t>(n)));
  std::vector<double> slopes;
  slopes.reserve(resamples);
  Eigen::VectorXd bx(n), by(n);
  for (int b = 0; b < resamples; ++b) {
    // Redraw the rare resample whose x values are all identical.
    for (int attempt = 0; attempt < 100; ++attempt) {
      bool distinct = false;
      for (int i = 0; i < n; ++i) {
        int k = static_cast<int>(rng.next_below(static_cast<uint32_t>(n)));
        bx[i] = lx[k];
        by[i] = ly[k];
        if (i > 0 && bx[i] != bx[0]) distinct = true;
      }
      if (distinct) break;
      if (attempt == 99) {
        bx = lx;
        by = ly;
      }
    }
    slopes.push_back(linear_fit(bx, by).first);
  }
  double mean = 0.0;
  for (double s : slopes) mean += s;
  fit.boot_mean = mean / slopes.size();

  std::sort(slopes.begin(), slopes.end());
  auto pct = [&](double q) {
    double pos = q * (slopes.size() - 1);
    size_t i = static_cast<size_t>(pos);
    if (i + 1 >= slopes.size()) return slopes.back();
    double w = pos - i;
    return slopes[i] * (1.0 - w) + slopes[i + 1] * w;
  };
  fit.ci_lo = std::min(pct(0.025), fit.exponent);
  fit.ci_hi = std::max(pct(0.975), fit.exponent);
  return fit;
}

double pseudo_voigt(double x, double x0, double fwhm, double eta) {
  const double d = x - x0;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const double g = std::exp(-d * d / (2.0 * sigma * sigma)) /
                   (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const double hw = fwhm / 2.0;
  const double l = hw / (std::numbers::pi * (d * d + hw * hw));
  return eta * g + (1.0 - eta) * l;
}

PeakFit fit_pseudo_voigt(const std::vector<std::pair<double, double>>& slice) {
  const int n = static_cast<int>(slice.size());
  if (n < 5) throw std::invalid_argument("fit_pseudo_voigt: need at least 5 points");
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = slice[i].first;
    y[i] = slice[i].second;
  }
  int imax = 0;
  y.maxCoeff(&imax);
  if (imax == 0 || imax == n - 1)
    throw std::invalid_argument("fit_pseudo_voigt: data do not bracket a maximum");
  double ymax = y[imax], ymin = y.minCoeff();
  if (!(ymax > ymin))
    throw std::runtime_error("fit_pseudo_voigt: flat data, no peak to fit");

  // Initial width from the half-maximum crossings around the peak.
  double half = ymin + 0.5 * (ymax - ymin);
  int il = imax, ir = imax;
  while (il > 0 && y[il] > half) --il;
  while (ir < n - 1 && y[ir] > half) ++ir;
  double span = std::abs(x[n - 1] - x[0]);
  double fwhm0 = std::max(std::abs(x[ir] - x[il]), 1e-6 * (span + 1e-300));

  Eigen::Vector4d p;  // amplitude, x0, fwhm, eta
  p << ymax / pseudo_voigt(0.0, 0.0, fwhm0, 0.5), x[imax], fwhm0, 0.5;

  auto clamp_params = [](Eigen::Vector4d& q) {
    q[2] = std::max(q[2], 1e-12);
    q[3] = std::clamp(q[3], 0.0, 1.0);
  };
  auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r) {
    for (int i = 0; i < n; ++i) r[i] = q[0] * pseudo_voigt(x[i], q[1], q[2], q[3]) - y[i];
  };

  Eigen::VectorXd r(n), r_try(n);
  residuals(p, r);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < 400; ++it) {
    // Forward-difference Jacobian.
    Eigen::MatrixXd jac(n, 4);
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d q = p;
      double h = std::max(1e-8, 1e-7 * std::abs(q[j]));
      q[j] += h;
      clamp_params(q);
      double dh = q[j] - p[j];
      if (dh == 0.0) {  // pinned at a bound; probe inward
        q = p;
        q[j] -= h;
        clamp_params(q);
        dh = q[j] - p[j];
      }
      residuals(q, r_try);
      jac.col(j) = (r_try - r) / dh;
    }
    Eigen::Matrix4d jtj = jac.transpose() * jac;
    Eigen::Vector4d g = jac.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int sub = 0; sub < 40; ++sub) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      Eigen::Vector4d step = a.ldlt().solve(-g);
      Eigen::Vector4d q = p + step;
      clamp_params(q);
      residuals(q, r_try);
      double c_try = r_try.squaredNorm();
      if (c_try < cost) {
        double rel = (cost - c_try) / std::max(cost, 1e-300);
        p = q;
        r = r_try;
        cost = c_try;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel < 1e-13) converged = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
    if (!accepted) {
      converged = cost < 1e-20 || g.cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, cost);
      break;
    }
    if (converged) break;
  }
  if (!converged)
    throw std::runtime_error("fit_pseudo_voigt: did not converge");

  PeakFit fit;
  fit.amplitude = p[0];
  fit.x0 = p[1];
  fit.fwhm = p[2];
  fit.eta = p[3];
  fit.xi = 1.0 / p[2];
  fit.eta_pinned = (p[3] <= 0.0 || p[3] >= 1.0);
  fit.cost = cost;
  fit.iterations = it;
  return fit;
}

double f_statistic(double chi2_fixed, double chi2_null, int n_points, int n_params, int p_fix) {
  if (chi2_null <= 0.0) throw std::invalid_argument("f_statistic: chi2_null must be positive");
  if (n_points <= n_params) throw std::invalid_argument("f_statistic: need n_points > n_params");
  return (chi2_fixed / chi2_null - 1.0) * (n_points - n_params) / p_fix;
}

FTestInterval f_test_interval(double chi2_null, int n_points, int n_params,
                              const std::vector<std::pair<double, double>>& profile,
                              double confidence) {
  if (chi2_null <= 0.0) throw std::invalid_argument("f_test_interval: chi2_null must be positive");
  if (n_points <= n_params)
    throw std::invalid_argument("f_test_interval: need n_points > n_params");
  if (profile.size() < 3)
    throw std::invalid_argument("f_test_interval: need at least 3 profile points");

  auto prof = profile;
  std::sort(prof.begin(), prof.end());

  FTestInterval out;
  out.f_crit = f_quantile(confidence, 1.0, n_points - n_params);
  out.chi2_crit = chi2_null * (1.0 + out.f_crit / (n_points - n_params));

  // Position of the profile minimum.
  size_t imin = 0;
  for (size_t i = 1; i < prof.size(); ++i)
    if (prof[i].second < prof[imin].second) imin = i;

  auto cross = [&](size_t from, int dir) -> std::pair<double, bool> {
    size_t i = from;
    while (true) {
      size_t j = i + dir;
      if (j >= prof.size()) return {prof[i].first, true};  // never crossed: open end
      if (prof[j].second >= out.chi2_crit) {
        double c0 = prof[i].second, c1 = prof[j].second;
        double w = (out.chi2_crit - c0) / (c1 - c0);
        return {prof[i].first + w * (prof[j].first - prof[i].first), false};
      }
      i = j;
    }
  };
  auto [lo, open_lo] = cross(imin, -1);
  auto [hi, open_hi] = cross(imin, +1);
  out.lo = lo;
  out.hi = hi;
  out.open_lo = open_lo;
  out.open_hi = open_hi;
  return out;
}

}  // namespace fiq
