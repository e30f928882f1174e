#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

// Absorbing Markov-chain Monte Carlo coarsening of the six-state clock model
// on a fully periodic honeycomb lattice. Proposals (two-site edge moves, then
// single-site moves, each pass in fresh random order) are accepted if and
// only if the energy does not increase, so the energy is monotone and the
// chain settles into local minima.

namespace fiq {

struct HoneycombLattice {
  int l = 0;                                   // linear size, even
  std::vector<std::array<int, 2>> edges;       // 3 N / 2 edges
  std::vector<std::array<int, 3>> neighbors;   // coordination exactly 3

  int n_sites() const { return l * l; }
  int site_id(int x, int y) const { return x * l + y; }
};

// Brick-wall construction: an l x l periodic square grid keeps all horizontal
// edges and only the vertical edges with (x + y) even.
HoneycombLattice build_honeycomb(int l);

struct ClockConfig {
  std::vector<uint8_t> q;  // six-state angle index, theta = 2 pi q / 6
  uint64_t seed = 0;
  int64_t step = 0;
};

ClockConfig random_clock_config(const HoneycombLattice& lattice, uint64_t seed);

double clock_energy(const ClockConfig& config, const HoneycombLattice& lattice);

// One time step: a randomized edge pass proposing independent new angles for
// both endpoints, then a randomized single-site pass. Returns the energy
// change (always <= 0).
double clock_sweep(ClockConfig& config, const HoneycombLattice& lattice);

struct CoarsenParams {
  int l = 120;
  int replicas = 100;
  int steps = 1000;
  uint64_t seed = 0;
  int r_min = 5;   // correlation fit distances (Euclidean along the rows
  int r_max = 20;  // and columns of the brick-wall embedding)
  int bootstrap_resamples = 200;
  unsigned threads = 0;
};

struct CoarsenResult {
  Eigen::VectorXd step;        // time steps with recorded observables
  Eigen::VectorXd m_mean, m_lo, m_hi;
  Eigen::VectorXd xi, xi_lo, xi_hi;
  Eigen::MatrixXd m_replica;   // (steps, replicas): per-replica |mean rotor|
  // Replica-averaged pair correlation C(r), r = r_min..r_max per step.
  Eigen::MatrixXd corr_mean;   // (steps, r_max - r_min + 1)
};

// Runs independent replicas (seeds split from the master seed), recording
// |mean rotor| and distance-resolved correlations each step, with bootstrap
// confidence intervals over replicas. Step 0 is the initial random state.
CoarsenResult run_coarsening(const CoarsenParams& params);

// Correlation length from an exponential-decay fit of C(r) on r_min..r_max
// (least squares on log C over the positive entries). NaN when fewer than
// four usable points remain.
double correlation_length(const Eigen::VectorXd& corr, int r_min);

}  // namespace fiq
