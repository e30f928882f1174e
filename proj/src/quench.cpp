#include "fiq/quench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fiq/parallel.hpp"
#include "fiq/rng.hpp"

namespace fiq {

namespace {

using cd = std::complex<double>;

// Deterministic squared norm: fixed-size block partial sums combined in
// order, so the result does not depend on the worker count.
double norm_sq_blocked(const Eigen::VectorXcd& amp, unsigned threads) {
  const Eigen::Index n = amp.size();
  const Eigen::Index block = 1 << 16;
  const Eigen::Index nblocks = (n + block - 1) / block;
  std::vector<double> partial(static_cast<size_t>(nblocks), 0.0);
  parallel_for(static_cast<size_t>(nblocks), threads, [&](size_t b) {
    Eigen::Index lo = static_cast<Eigen::Index>(b) * block;
    Eigen::Index len = std::min(block, n - lo);
    partial[b] = amp.segment(lo, len).squaredNorm();
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// exp(+i a sx) on every qubit: (p0, p1) -> (cos a * p0 + i sin a * p1,
//                                           i sin a * p0 + cos a * p1).
void rotate_x_all(Eigen::VectorXcd& amp, int n_qubits, double angle, unsigned threads) {
  const double c = std::cos(angle);
  const cd is(0.0, std::sin(angle));
  const Eigen::Index half = amp.size() / 2;
  cd* a = amp.data();
  for (int q = 0; q < n_qubits; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    const Eigen::Index low = bit - 1;
    const Eigen::Index chunk = 1 << 15;
    const Eigen::Index nchunks = (half + chunk - 1) / chunk;
    parallel_for(static_cast<size_t>(nchunks), threads, [&](size_t ci) {
      Eigen::Index lo = static_cast<Eigen::Index>(ci) * chunk;
      Eigen::Index hi = std::min(lo + chunk, half);
      for (Eigen::Index p = lo; p < hi; ++p) {
        Eigen::Index k0 = ((p & ~low) << 1) | (p & low);
        Eigen::Index k1 = k0 | bit;
        cd a0 = a[k0], a1 = a[k1];
        a[k0] = c * a0 + is * a1;
        a[k1] = is * a0 + c * a1;
      }
    });
  }
}

// Diagonal phase exp(-i theta Ez[k]) per basis state.
void phase_z(Eigen::VectorXcd& amp, const Eigen::VectorXd& ez, double theta, unsigned threads) {
  const Eigen::Index n = amp.size();
  cd* a = amp.data();
  const double* e = ez.data();
  const Eigen::Index chunk = 1 << 15;
  const Eigen::Index nchunks = (n + chunk - 1) / chunk;
  parallel_for(static_cast<size_t>(nchunks), threads, [&](size_t ci) {
    Eigen::Index lo = static_cast<Eigen::Index>(ci) * chunk;
    Eigen::Index hi = std::min(lo + chunk, n);
    for (Eigen::Index k = lo; k < hi; ++k) {
      double ph = -theta * e[k];
      a[k] *= cd(std::cos(ph), std::sin(ph));
    }
  });
}

struct Stepper {
  const Lattice& lattice;
  Eigen::VectorXd ez;
  unsigned threads;

  Stepper(const Lattice& lat, unsigned thr)
      : lattice(lat), ez(diagonal_ising_energies(lat)), threads(thr) {}

  void strang(Eigen::VectorXcd& amp, int n_qubits, double gamma, double jcal, double dt) const {
    Eigen::VectorXcd& a = amp;
    rotate_x_all(a, n_qubits, gamma * dt / 2.0, threads);
    phase_z(a, ez, jcal * dt, threads);
    rotate_x_all(a, n_qubits, gamma * dt / 2.0, threads);
  }
};

EvolveResult run_steps(const StateVector& state, const Lattice& lattice, double duration,
                       double dt, unsigned threads,
                       const std::function<std::pair<double, double>(double)>& coeffs) {
  const int n = state.n_qubits;
  if (n != lattice.n_sites())
    throw std::invalid_argument("evolve: state size does not match lattice site count");
  if (dt <= 0) throw std::invalid_argument("evolve: dt must be positive");
  if (dt > duration) throw std::invalid_argument("evolve: dt exceeds the total duration");
  if (threads == 0) threads = default_threads();

  const int steps = static_cast<int>(std::ceil(duration / dt - 1e-12));
  const double h = duration / steps;

  Stepper stepper(lattice, threads);
  EvolveResult res;
  res.state.n_qubits = n;
  res.state.amp = state.amp;
  res.steps = steps;

  for (int k = 0; k < steps; ++k) {
    double s_mid = (k + 0.5) * h / duration;
    auto [gamma, jcal] = coeffs(s_mid);
    stepper.strang(res.state.amp, n, gamma, jcal, h);
    double drift = std::abs(norm_sq_blocked(res.state.amp, threads) - 1.0);
    res.max_norm_drift = std::max(res.max_norm_drift, drift);
  }
  if (res.max_norm_drift > 1e-8)
    throw std::runtime_error("evolve: norm drifted by " + std::to_string(res.max_norm_drift) +
                             " (> 1e-8)");
  return res;
}

}  // namespace

StateVector init_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("init_state: n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "]");
  StateVector sv;
  sv.n_qubits = n_qubits;
  sv.amp = Eigen::VectorXcd::Constant(Eigen::Index{1} << n_qubits,
                                      std::pow(2.0, -0.5 * n_qubits));
  return sv;
}

Eigen::VectorXd diagonal_ising_energies(const Lattice& lattice) {
  const int n = lattice.n_sites();
  if (n > kMaxQubits)
    throw std::invalid_argument("diagonal_ising_energies: lattice exceeds qubit cap");
  const Eigen::Index dim = Eigen::Index{1} << n;

  std::vector<std::vector<std::pair<int, double>>> nbr(n);
  double e0 = 0.0;
  for (const Bond& b : lattice.bonds) {
    nbr[b.a].emplace_back(b.b, b.j);
    nbr[b.b].emplace_back(b.a, b.j);
    e0 += b.j;
  }

  Eigen::VectorXd ez(dim);
  ez[0] = e0;  // all spins +1
  for (Eigen::Index k = 1; k < dim; ++k) {
    int i = std::countr_zero(static_cast<uint64_t>(k));
    // Flipping site i from +1 to -1 relative to k with bit i cleared.
    double delta = 0.0;
    for (auto [j, jij] : nbr[i]) {
      double sj = (k >> j) & 1 ? -1.0 : 1.0;
      delta += jij * sj;
    }
    ez[k] = ez[k & (k - 1)] - 2.0 * delta;
  }
  return ez;
}

EvolveResult evolve(const StateVector& state, const Lattice& lattice, const Schedule& schedule,
                    const QuenchParams& params, unsigned threads) {
  if (params.t_a <= 0) throw std::invalid_argument("evolve: t_a must be positive");
  const double duration = std::numbers::pi * params.t_a;  // t_sim = pi * t_a
  return run_steps(state, lattice, duration, params.dt, threads,
                   [&](double s) { return evaluate(schedule, s); });
}

EvolveResult evolve_fixed(const StateVector& state, const Lattice& lattice, double gamma,
                          double jcal, double duration, double dt, unsigned threads) {
  return run_steps(state, lattice, duration, dt, threads,
                   [&](double) { return std::make_pair(gamma, jcal); });
}

SampleSet sample(const StateVector& state, int reads, uint64_t seed) {
  if (reads < 1) throw std::invalid_argument("sample: reads must be >= 1");
  const Eigen::Index dim = state.dim();
  const int n = state.n_qubits;
  const double nrm = state.norm_sq();
  if (std::abs(nrm - 1.0) > 1e-6)
    throw std::invalid_argument("sample: state is not normalized");

  // Counter-based uniforms, assigned to basis states in one cumulative pass.
  std::vector<double> u(reads);
  for (int r = 0; r < reads; ++r) u[r] = counter_uniform(seed, static_cast<uint64_t>(r)) * nrm;
  std::vector<int> order(reads);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return u[a] < u[b]; });

  std::vector<Eigen::Index> outcome(reads);
  double cum = 0.0;
  int next = 0;
  for (Eigen::Index k = 0; k < dim && next < reads; ++k) {
    cum += std::norm(state.amp[k]);
    while (next < reads && u[order[next]] < cum) outcome[order[next++]] = k;
  }
  for (; next < reads; ++next) outcome[order[next]] = dim - 1;  // rounding tail

  SampleSet ss;
  ss.meta.reads = reads;
  ss.meta.seed = seed;
  ss.spins.resize(reads, n);
  for (int r = 0; r < reads; ++r)
    for (int i = 0; i < n; ++i)
      ss.spins(r, i) = ((outcome[r] >> i) & 1) ? int8_t{-1} : int8_t{1};
  return ss;
}

double energy_expectation(const StateVector& state, const Lattice& lattice, double gamma,
                          double jcal) {
  const Eigen::VectorXd ez = diagonal_ising_energies(lattice);
  const Eigen::Index dim = state.dim();
  double diag = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) diag += ez[k] * std::norm(state.amp[k]);
  double offdiag = 0.0;
  for (int q = 0; q < state.n_qubits; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << q;
    for (Eigen::Index k = 0; k < dim; ++k)
      if (!(k & bit)) offdiag += 2.0 * std::real(std::conj(state.amp[k]) * state.amp[k | bit]);
  }
  return jcal * diag - gamma * offdiag;
}

namespace {

// One Lanczos pass with full reorthogonalization; returns the lowest Ritz
// pair and the gap to the next distinct Ritz value.
struct LanczosOut {
  Eigen::VectorXd vec;
  double value = 0.0;
  double gap = 0.0;
};

LanczosOut lanczos_lowest(const Lattice& lattice, double gamma, double jcal,
                          const Eigen::VectorXd& ez, uint64_t seed) {
  const int n = lattice.n_sites();
  const Eigen::Index dim = Eigen::Index{1} << n;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(dim, 150));

  Rng rng(seed);
  Eigen::VectorXd v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = rng.next_normal();
  v.normalize();

  auto apply_h = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = jcal * ez.cwiseProduct(x);
    for (int q = 0; q < n; ++q) {
      const Eigen::Index bit = Eigen::Index{1} << q;
      for (Eigen::Index k = 0; k < dim; ++k)
        if (!(k & bit)) {
          y[k] += -gamma * x[k | bit];
          y[k | bit] += -gamma * x[k];
        }
    }
  };

  Eigen::MatrixXd basis(dim, m_max);
  Eigen::VectorXd alpha(m_max), beta(m_max);
  basis.col(0) = v;
  Eigen::VectorXd w(dim);
  int m = 0;
  for (int j = 0; j < m_max; ++j) {
    apply_h(basis.col(j), w);
    if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
    alpha[j] = basis.col(j).dot(w);
    w -= alpha[j] * basis.col(j);
    // Full reorthogonalization, twice for stability.
    for (int pass = 0; pass < 2; ++pass)
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    beta[j] = w.norm();
    m = j + 1;
    if (beta[j] < 1e-12) break;
    if (j + 1 < m_max) basis.col(j + 1) = w / beta[j];
    // Convergence check on the lowest Ritz pair.
    if (j >= 4 && j % 4 == 0) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
      for (int i = 0; i <= j; ++i) {
        t(i, i) = alpha[i];
        if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[i - 1];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      double resid = std::abs(beta[j] * es.eigenvectors()(j, 0));
      if (resid < 1e-11 * std::max(1.0, std::abs(es.eigenvalues()[0]))) break;
    }
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[i - 1];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  LanczosOut out;
  out.value = es.eigenvalues()[0];
  out.gap = m > 1 ? es.eigenvalues()[1] - es.eigenvalues()[0] : 0.0;
  out.vec = basis.leftCols(m) * es.eigenvectors().col(0);
  out.vec.normalize();
  return out;
}

}  // namespace

GroundState exact_ground_state(const Lattice& lattice, double gamma, double jcal, uint64_t seed) {
  const int n = lattice.n_sites();
  if (n > 16)
    throw std::invalid_argument("exact_ground_state: site count must be <= 16");
  const Eigen::VectorXd ez = diagonal_ising_energies(lattice);

  LanczosOut a = lanczos_lowest(lattice, gamma, jcal, ez, seed);
  // Lanczos cannot see the multiplicity of a degenerate level; a second run
  // from an independent start lands elsewhere in a degenerate ground space.
  LanczosOut b = lanczos_lowest(lattice, gamma, jcal, ez, seed ^ 0x5bf0'3635'd1c4'b1e7ULL);

  GroundState gs;
  gs.energy = a.value;
  double overlap = std::abs(a.vec.dot(b.vec));
  double scale = std::max(1.0, std::abs(a.value));
  gs.degenerate = (a.gap < 1e-8 * scale) || (overlap < 1.0 - 1e-6);
  gs.gap = gs.degenerate ? 0.0 : a.gap;
  gs.state.n_qubits = n;
  gs.state.amp = a.vec.cast<std::complex<double>>();
  return gs;
}

}  // namespace fiq
