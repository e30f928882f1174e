#include <cmath>
#include <complex>

#include "doctest.h"
#include "fiq/fitting.hpp"
#include "fiq/quench.hpp"

using namespace fiq;

namespace {

// Two sites joined by a single bond; enough structure for the engine.
Lattice pair_lattice(double j) {
  Lattice lat;
  lat.lx = 2;
  lat.ly = 1;
  lat.topology = Topology::Ring;
  lat.j1 = lat.j2 = j;
  lat.bonds = {{0, 1, j}};
  return lat;
}

double aligned_weight(const StateVector& sv) {
  return std::norm(sv.amp[0]) + std::norm(sv.amp[sv.dim() - 1]);
}

// Independent oracle: diagonal energy of basis state k summed bond by bond.
double ising_energy_direct(const Lattice& lat, Eigen::Index k) {
  double e = 0.0;
  for (const Bond& b : lat.bonds) {
    double sa = (k >> b.a) & 1 ? -1.0 : 1.0;
    double sb = (k >> b.b) & 1 ? -1.0 : 1.0;
    e += b.j * sa * sb;
  }
  return e;
}

}  // namespace

TEST_SUITE("quench") {

TEST_CASE("initial state is the uniform superposition") {
  StateVector one = init_state(1);
  CHECK(one.amp[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(one.amp[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  StateVector two = init_state(2);
  for (int k = 0; k < 4; ++k) CHECK(two.amp[k].real() == doctest::Approx(0.5));
  for (int n : {3, 7, 10}) CHECK(init_state(n).norm_sq() == doctest::Approx(1.0));
  CHECK_THROWS_AS(init_state(0), std::invalid_argument);
  CHECK_THROWS_AS(init_state(25), std::invalid_argument);
}

TEST_CASE("diagonal energies match the direct bond sum") {
  Lattice lat = build_cylinder(3, 4, 0.9, -2.0);
  Eigen::VectorXd ez = diagonal_ising_energies(lat);
  for (Eigen::Index k = 0; k < ez.size(); ++k)
    CHECK(ez[k] == doctest::Approx(ising_energy_direct(lat, k)).epsilon(1e-12));
}

TEST_CASE("zero-duration limit returns the product state") {
  Lattice lat = pair_lattice(-1.0);
  StateVector psi = init_state(2);
  QuenchParams p;
  p.t_a = 1e-7;
  p.dt = 3.14159265358979 * p.t_a;  // dt = T: a single step
  EvolveResult res = evolve(psi, lat, default_schedule(), p);
  CHECK(res.steps == 1);
  CHECK(std::abs(res.state.amp.dot(psi.amp)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dt validation") {
  Lattice lat = pair_lattice(-1.0);
  StateVector psi = init_state(2);
  QuenchParams p;
  p.t_a = 0.001;
  p.dt = 0.05;  // dt > pi * t_a
  CHECK_THROWS_AS(evolve(psi, lat, default_schedule(), p), std::invalid_argument);
}

TEST_CASE("adiabatic ferromagnetic pair ends aligned") {
  Lattice lat = pair_lattice(-1.0);
  StateVector psi = init_state(2);
  QuenchParams p;
  p.t_a = 40.0;
  EvolveResult res = evolve(psi, lat, default_schedule(), p);
  CHECK(res.max_norm_drift < 1e-8);
  CHECK(aligned_weight(res.state) >= 0.99);

  // Cross-check the target state against the eigensolver.
  GroundState gs = exact_ground_state(lat, 0.0, 1.0);
  CHECK(gs.energy == doctest::Approx(-1.0));
  CHECK(gs.degenerate);
}

TEST_CASE("aligned weight grows with annealing time") {
  Lattice lat = pair_lattice(-1.0);
  StateVector psi = init_state(2);
  double prev = 0.0;
  for (double ta : {1.0, 4.0, 16.0, 64.0}) {
    QuenchParams p;
    p.t_a = ta;
    double w = aligned_weight(evolve(psi, lat, default_schedule(), p).state);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("ring defect density falls with annealing time") {
  Lattice ring = build_ring(8, -1.0);
  StateVector psi = init_state(8);
  Schedule sch = default_schedule();
  double prev = 1.0;
  for (double ta : {0.5, 2.0, 8.0}) {
    QuenchParams p;
    p.t_a = ta;
    p.reads = 2000;
    EvolveResult res = evolve(psi, ring, sch, p);
    SampleSet ss = sample(res.state, p.reads, 7);
    double walls = 0.0;
    for (int r = 0; r < ss.n_reads(); ++r)
      for (const Bond& b : ring.bonds)
        walls += 0.5 * (1.0 - ss.spins(r, b.a) * ss.spins(r, b.b));
    double density = walls / (ss.n_reads() * ring.bonds.size());
    CHECK(density < prev);
    prev = density;
  }
}

TEST_CASE("fixed-Hamiltonian evolution conserves energy and norm") {
  Lattice lat = build_cylinder(2, 4, 0.9, -0.9);
  StateVector psi = init_state(8);
  // A non-trivial state first.
  QuenchParams warm;
  warm.t_a = 0.5;
  psi = evolve(psi, lat, default_schedule(), warm).state;
  double e0 = energy_expectation(psi, lat, 0.7, 0.8);
  EvolveResult res = evolve_fixed(psi, lat, 0.7, 0.8, 5.0, 0.01);
  double e1 = energy_expectation(res.state, lat, 0.7, 0.8);
  CHECK(res.max_norm_drift < 1e-10);
  CHECK(e1 == doctest::Approx(e0).epsilon(1e-4));
}

TEST_CASE("halving dt changes the final state by less than 1e-6") {
  Lattice lat = build_cylinder(2, 4, 0.9, -0.9);
  StateVector psi = init_state(8);
  QuenchParams p;
  p.t_a = 2.0;
  p.dt = 0.05;
  StateVector full = evolve(psi, lat, default_schedule(), p).state;
  p.dt = 0.025;
  StateVector half = evolve(psi, lat, default_schedule(), p).state;
  double fidelity = std::abs(full.amp.dot(half.amp));
  CHECK(1.0 - fidelity < 1e-6);
}

TEST_CASE("ground state at gamma=1, jcal=0 is the product state") {
  Lattice lat = build_cylinder(2, 4, 0.9, -2.0);
  GroundState gs = exact_ground_state(lat, 1.0, 0.0);
  CHECK(gs.energy == doctest::Approx(-8.0));
  StateVector prod = init_state(8);
  double overlap = std::abs(gs.state.amp.dot(prod.amp));
  CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(!gs.degenerate);
}

TEST_CASE("classical ground state of one AFM bond") {
  Lattice lat = pair_lattice(1.0);
  GroundState gs = exact_ground_state(lat, 0.0, 1.0);
  CHECK(gs.energy == doctest::Approx(-1.0));
  CHECK(gs.degenerate);
  // Any member of span{01, 10}: no weight on the aligned states.
  CHECK(std::abs(gs.state.amp[0]) < 1e-8);
  CHECK(std::abs(gs.state.amp[3]) < 1e-8);
}

TEST_CASE("Villain cylinder classical ground energy matches enumeration") {
  Lattice lat = build_cylinder(2, 4, 0.9, -0.9);
  double best = 1e300;
  for (Eigen::Index k = 0; k < (1 << 8); ++k)
    best = std::min(best, ising_energy_direct(lat, k));
  GroundState gs = exact_ground_state(lat, 0.0, 1.0);
  CHECK(gs.energy == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("sampling a classical basis state") {
  StateVector up;
  up.n_qubits = 2;
  up.amp = Eigen::VectorXcd::Zero(4);
  up.amp[0] = 1.0;
  SampleSet ss = sample(up, 50, 3);
  for (int r = 0; r < ss.n_reads(); ++r) {
    CHECK(ss.spins(r, 0) == 1);
    CHECK(ss.spins(r, 1) == 1);
  }
}

TEST_CASE("sampling the uniform state reproduces the Born rule") {
  StateVector psi = init_state(2);
  const int reads = 100000;
  SampleSet ss = sample(psi, reads, 11);
  int counts[4] = {0, 0, 0, 0};
  for (int r = 0; r < reads; ++r) {
    int k = (ss.spins(r, 0) == -1 ? 1 : 0) | (ss.spins(r, 1) == -1 ? 2 : 0);
    counts[k]++;
  }
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(counts[k] / double(reads) - 0.25) < 0.01);
    double e = reads / 4.0;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  CHECK(chi2_sf(chi2, 3) > 0.001);
}

TEST_CASE("cat state never yields mixed outcomes") {
  StateVector bell;
  bell.n_qubits = 2;
  bell.amp = Eigen::VectorXcd::Zero(4);
  bell.amp[0] = bell.amp[3] = 1.0 / std::sqrt(2.0);
  SampleSet ss = sample(bell, 5000, 5);
  for (int r = 0; r < ss.n_reads(); ++r) CHECK(ss.spins(r, 0) == ss.spins(r, 1));
}

TEST_CASE("sampling is deterministic in the seed") {
  StateVector psi = init_state(3);
  SampleSet a = sample(psi, 200, 42);
  SampleSet b = sample(psi, 200, 42);
  SampleSet c = sample(psi, 200, 43);
  CHECK((a.spins.array() == b.spins.array()).all());
  CHECK(!(a.spins.array() == c.spins.array()).all());
}

TEST_CASE("sampled frequencies follow a non-uniform evolved state") {
  Lattice lat = build_ring(3, 1.0);
  StateVector psi = init_state(3);
  QuenchParams p;
  p.t_a = 1.0;
  StateVector evolved = evolve(psi, lat, default_schedule(), p).state;
  const int reads = 100000;
  SampleSet ss = sample(evolved, reads, 17);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(8);
  for (int r = 0; r < reads; ++r) {
    int k = 0;
    for (int i = 0; i < 3; ++i)
      if (ss.spins(r, i) == -1) k |= 1 << i;
    counts[k] += 1.0;
  }
  double chi2 = 0.0;
  int dof = 0;
  for (int k = 0; k < 8; ++k) {
    double e = std::norm(evolved.amp[k]) * reads;
    if (e < 5) continue;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
    ++dof;
  }
  REQUIRE(dof > 1);
  CHECK(chi2_sf(chi2, dof - 1) > 0.001);
}

}  // TEST_SUITE
