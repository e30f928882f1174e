#include "fiq/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fiq {

namespace {

void validate(const Schedule& sch) {
  const int n = sch.n_knots();
  if (n < 2) throw std::invalid_argument("schedule: need at least two knots");
  const double tol = 1e-9;
  if (std::abs(sch.s[0]) > tol || std::abs(sch.s[n - 1] - 1.0) > tol)
    throw std::invalid_argument("schedule: s must span [0, 1] exactly");
  if (std::abs(sch.gamma[0] - 1.0) > tol || std::abs(sch.jcal[n - 1] - 1.0) > tol ||
      std::abs(sch.gamma[n - 1]) > tol || std::abs(sch.jcal[0]) > tol)
    throw std::invalid_argument(
        "schedule: boundary values must satisfy Gamma(0)=J(1)=1, Gamma(1)=J(0)=0");
  for (int i = 1; i < n; ++i) {
    if (sch.s[i] <= sch.s[i - 1])
      throw std::invalid_argument("schedule: s not strictly increasing at row " +
                                  std::to_string(i + 1));
    if (sch.gamma[i] > sch.gamma[i - 1] + tol)
      throw std::invalid_argument("schedule: gamma not monotone non-increasing at row " +
                                  std::to_string(i + 1));
    if (sch.jcal[i] < sch.jcal[i - 1] - tol)
      throw std::invalid_argument("schedule: jcal not monotone non-decreasing at row " +
                                  std::to_string(i + 1));
  }
}

}  // namespace

Schedule default_schedule() {
  const int n = 1001;
  Schedule sch;
  sch.s.resize(n);
  sch.gamma.resize(n);
  sch.jcal.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = static_cast<double>(i) / (n - 1);
    double c = std::cos(std::numbers::pi * s / 2.0);
    double q = std::sin(std::numbers::pi * s / 2.0);
    sch.s[i] = s;
    sch.gamma[i] = c * c;
    sch.jcal[i] = q * q;
  }
  // Pin the endpoints exactly.
  sch.gamma[0] = 1.0;
  sch.jcal[0] = 0.0;
  sch.gamma[n - 1] = 0.0;
  sch.jcal[n - 1] = 1.0;
  return sch;
}

Schedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty schedule file");
  // Tolerate whitespace and an optional BOM in the header.
  std::string header = line;
  header.erase(std::remove_if(header.begin(), header.end(),
                              [](unsigned char c) { return std::isspace(c) || c > 127; }),
               header.end());
  if (header != "s,gamma,jcal")
    throw std::runtime_error(path + ": expected header 's,gamma,jcal'");

  std::vector<double> s, g, j;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b, c;
    if (!(ls >> a >> b >> c))
      throw std::runtime_error(path + ": malformed row " + std::to_string(row));
    if (b < 0 || c < 0)
      throw std::runtime_error(path + ": negative schedule value at row " + std::to_string(row));
    if (!s.empty() && a <= s.back())
      throw std::runtime_error(path + ": s not strictly increasing at row " + std::to_string(row));
    s.push_back(a);
    g.push_back(b);
    j.push_back(c);
  }
  if (s.size() < 2) throw std::runtime_error(path + ": need at least two knots");
  if (std::abs(s.front()) > 1e-9 || std::abs(s.back() - 1.0) > 1e-9)
    throw std::runtime_error(path + ": schedule must include endpoints s=0 and s=1");
  if (g.front() <= 0 || j.back() <= 0)
    throw std::runtime_error(path + ": gamma(0) and jcal(1) must be positive for normalization");

  Schedule sch;
  const int n = static_cast<int>(s.size());
  sch.s = Eigen::Map<Eigen::VectorXd>(s.data(), n);
  sch.gamma = Eigen::Map<Eigen::VectorXd>(g.data(), n) / g.front();
  sch.jcal = Eigen::Map<Eigen::VectorXd>(j.data(), n) / j.back();
  validate(sch);
  return sch;
}

std::pair<double, double> evaluate(const Schedule& schedule, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("evaluate: s must lie in [0, 1]");
  const auto& xs = schedule.s;
  const int n = schedule.n_knots();
  // Bracketing knot: first index with xs[hi] >= s.
  const double* begin = xs.data();
  int hi = static_cast<int>(std::lower_bound(begin, begin + n, s) - begin);
  if (hi == 0) return {schedule.gamma[0], schedule.jcal[0]};
  if (hi >= n) hi = n - 1;
  int lo = hi - 1;
  double w = (s - xs[lo]) / (xs[hi] - xs[lo]);
  return {schedule.gamma[lo] + w * (schedule.gamma[hi] - schedule.gamma[lo]),
          schedule.jcal[lo] + w * (schedule.jcal[hi] - schedule.jcal[lo])};
}

void save_schedule(const std::string& path, const Schedule& schedule) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "s,gamma,jcal\n";
  out.precision(17);
  for (int i = 0; i < schedule.n_knots(); ++i)
    out << schedule.s[i] << ',' << schedule.gamma[i] << ',' << schedule.jcal[i] << '\n';
}

}  // namespace fiq
