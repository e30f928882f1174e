#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>

namespace fiq {

// Annealing schedule (Gamma(s), J(s)) on s in [0,1], stored as knots and
// evaluated by linear interpolation. After normalization Gamma(0) = J(1) = 1
// and Gamma(1) = J(0) = 0, with Gamma non-increasing and J non-decreasing.
struct Schedule {
  Eigen::VectorXd s;
  Eigen::VectorXd gamma;
  Eigen::VectorXd jcal;

  int n_knots() const { return static_cast<int>(s.size()); }
};

// Synthetic stand-in schedule: Gamma = cos^2(pi s / 2), J = sin^2(pi s / 2)
// on 1001 knots.
Schedule default_schedule();

// CSV with header `s,gamma,jcal`; s strictly increasing from 0 to 1. Gamma
// and J are normalized by gamma(0) and jcal(1) respectively.
Schedule load_schedule(const std::string& path);

std::pair<double, double> evaluate(const Schedule& schedule, double s);

void save_schedule(const std::string& path, const Schedule& schedule);

}  // namespace fiq
