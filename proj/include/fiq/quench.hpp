#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "fiq/lattice.hpp"
#include "fiq/sample_set.hpp"
#include "fiq/schedule.hpp"

// Exact state-vector evolution of the time-dependent transverse-field Ising
// model H(s) = -Gamma(s) sum_i sx_i + J(s) sum_<ij> J_ij sz_i sz_j from the
// uniform superposition, and Born-rule sampling of the final state.
//
// Basis convention: bit i of a basis index set means spin -1 on site i.

namespace fiq {

inline constexpr int kMaxQubits = 24;  // 2^24 complex doubles = 256 MB

struct StateVector {
  int n_qubits = 0;
  Eigen::VectorXcd amp;

  Eigen::Index dim() const { return amp.size(); }
  double norm_sq() const { return amp.squaredNorm(); }
};

struct QuenchParams {
  double t_a = 1.0;    // annealing time in ns; simulated duration is pi * t_a
  double dt = 0.05;    // integrator step, simulation units
  uint64_t seed = 0;
  int reads = 100;
};

struct EvolveResult {
  StateVector state;
  double max_norm_drift = 0.0;
  int steps = 0;
};

StateVector init_state(int n_qubits);

// Second-order Strang splitting between the transverse-field rotation and
// the diagonal Ising phase, with schedule coefficients at the step midpoint.
// Throws if the norm drifts beyond 1e-8.
EvolveResult evolve(const StateVector& state, const Lattice& lattice, const Schedule& schedule,
                    const QuenchParams& params, unsigned threads = 0);

// Same integrator with fixed (gamma, jcal) coefficients; sanity/testing mode.
EvolveResult evolve_fixed(const StateVector& state, const Lattice& lattice, double gamma,
                          double jcal, double duration, double dt, unsigned threads = 0);

// `reads` independent Born-rule draws. Deterministic given the seed via a
// counter-based generator, independent of threading.
SampleSet sample(const StateVector& state, int reads, uint64_t seed);

struct GroundState {
  StateVector state;
  double energy = 0.0;
  double gap = 0.0;        // distance to the next Ritz value
  bool degenerate = false;
};

// Lowest eigenpair of H(gamma, jcal) by Lanczos iteration; site count <= 16.
GroundState exact_ground_state(const Lattice& lattice, double gamma, double jcal,
                               uint64_t seed = 1);

double energy_expectation(const StateVector& state, const Lattice& lattice, double gamma,
                          double jcal);

// Diagonal Ising energy sum_<ij> J_ij s_i s_j for every basis state.
Eigen::VectorXd diagonal_ising_energies(const Lattice& lattice);

}  // namespace fiq
