#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fiq/lattice.hpp"
#include "fiq/sample_set.hpp"

// Iterative sampler calibration: flux-bias zeroing, orbit-based coupler
// balancing, and anneal-line offset equalization, driven against a
// noise-injecting mock sampler.

namespace fiq {

struct SamplerRequest {
  Eigen::VectorXd flux_bias;     // per qubit
  Eigen::VectorXd couplers;     // applied coupler values, one per lattice bond
  Eigen::VectorXd line_offsets;  // per annealing line
  int n_samples = 100;
  uint64_t seed = 0;
};

// Stateless between calls apart from the provided parameters.
class SamplerInterface {
 public:
  virtual ~SamplerInterface() = default;
  virtual SampleSet sample_with(const SamplerRequest& request) = 0;
  virtual const Lattice& lattice() const = 0;
  virtual const std::vector<int>& line_of_qubit() const = 0;
};

// Hidden distortions injected by the mock: a per-qubit longitudinal bias, a
// multiplicative per-bond gain, and a per-line timing error that scales the
// effective coupling of every bond touching that line.
struct MockErrors {
  Eigen::VectorXd qubit_bias;   // b_i
  Eigen::VectorXd bond_gain;    // g_ij (1 = exact)
  Eigen::VectorXd line_timing;  // tau_l
};

struct MockSamplerConfig {
  double beta = 2.0;            // Gibbs inverse temperature
  double flux_to_field = 2000;  // kappa: longitudinal field = b_i + kappa * phi_i
  double line_coupling = 1.0;   // w: bond scale 1 + w * mean of (tau - offset)
  int n_lines = 8;              // qubits assigned round-robin
  int equil_sweeps = 40;        // heat-bath sweeps per independent read
  unsigned threads = 0;
};

// Classical heat-bath Gibbs sampler of E = sum J_eff s s - sum h_i s_i with
// h_i = b_i + kappa * phi_i and J_eff = J * gain * line factor. Every read
// is an independent chain quenched from a random state, mirroring the
// independent anneals of the hardware this stands in for. With zero hidden
// errors and zero corrections this is the plain Gibbs sampler of the
// lattice couplers.
class GibbsMockSampler : public SamplerInterface {
 public:
  GibbsMockSampler(Lattice lattice, MockErrors errors, MockSamplerConfig config = {});

  SampleSet sample_with(const SamplerRequest& request) override;
  const Lattice& lattice() const override { return lattice_; }
  const std::vector<int>& line_of_qubit() const override { return line_of_qubit_; }
  const MockSamplerConfig& config() const { return config_; }

 private:
  Lattice lattice_;
  MockErrors errors_;
  MockSamplerConfig config_;
  std::vector<int> line_of_qubit_;
};

MockErrors zero_errors(const Lattice& lattice, int n_lines = 8);

// ---- controller state and the three update laws ----

struct ShimState {
  int iteration = 0;
  Eigen::VectorXd flux;      // phi_i
  Eigen::VectorXd couplers;  // applied J_ij
  Eigen::VectorXd offsets;   // per line, pinned to mean zero
  double delta_phi = 2e-6;
  double delta_f = 2.5e-3;
  double delta_o = 1e-3;
  double flux_gain_scale = 1.0;  // multiplies delta_phi this iteration
};

ShimState initial_shim_state(const Lattice& lattice, int n_lines = 8);

// f_ij = (sign(J_ij) <m_i m_j> + 1) / 2 from the read-averaged spin product.
double frustration_probability(const SampleSet& samples, const Bond& bond);

// Per-bond frustrations using the signs of the applied couplers.
Eigen::VectorXd bond_frustrations(const SampleSet& samples, const Lattice& lattice,
                                  const Eigen::VectorXd& applied);

// phi_i^k = phi_i^{k-1} - delta_phi * <m>_i
ShimState flux_shim_step(const ShimState& state, const Eigen::VectorXd& mean_magnetizations);

// J_ij^k = J_ij^{k-1} + sign(J_ij) * delta_f * (f_ij - f_orbit)
ShimState coupler_shim_step(const ShimState& state, const Eigen::VectorXd& frustrations,
                            const OrbitPartition& orbits);

// offset_l^k = offset_l^{k-1} - delta_o * (f_l - mean_l f), re-pinned to
// mean zero.
ShimState offset_shim_step(const ShimState& state, const Eigen::VectorXd& per_line_frustration);

// Mean frustration per annealing line (a bond contributes to both endpoint
// lines).
Eigen::VectorXd per_line_frustration(const Eigen::VectorXd& frustrations, const Lattice& lattice,
                                     const std::vector<int>& line_of_qubit, int n_lines);

// ---- closed shim loop ----

struct ShimOptions {
  bool flux = true;
  bool couplers = true;
  bool offsets = false;  // offsets are calibrated against a 1D FM ring
  // Robbins-Monro style decay of the flux gain: scale = min(1, k0 / k).
  // Zero disables the decay.
  int flux_decay_k0 = 150;
  int assess_samples = 0;  // dedicated before/after assessment batches
  bool record_history = true;
};

struct ShimRunResult {
  ShimState final_state;
  Eigen::MatrixXd flux_history;         // (iterations, n_qubits)
  Eigen::MatrixXd coupler_history;      // (iterations, n_bonds)
  Eigen::MatrixXd offset_history;       // (iterations, n_lines)
  Eigen::MatrixXd magnetization_history;  // per-iteration <m>_i estimates
  Eigen::MatrixXd frustration_history;  // per-iteration f_ij estimates
  Eigen::VectorXd mag_before, mag_after;      // assessment batches
  Eigen::VectorXd frus_before, frus_after;
};

ShimRunResult run_shim(SamplerInterface& sampler, const ShimState& start, int iterations,
                       int samples_per_iter, uint64_t seed, const ShimOptions& options = {});

// Offset calibration on a 1D ferromagnetic ring with the given hidden line
// timings; returns the full run (flux/coupler stages disabled).
ShimRunResult run_offset_shim(GibbsMockSampler& ring_sampler, int iterations,
                              int samples_per_iter, uint64_t seed, double delta_o = 1e-3);

// Largest |f_ij - f_orbit| over every orbit.
double orbit_frustration_spread(const Eigen::VectorXd& frustrations,
                                const OrbitPartition& orbits);

// JSON snapshot for resumable shim runs.
void save_shim_state(const std::string& path, const ShimState& state, uint64_t seed);
std::pair<ShimState, uint64_t> load_shim_state(const std::string& path);

}  // namespace fiq
