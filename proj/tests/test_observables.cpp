#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "fiq/observables.hpp"
#include "fiq/rng.hpp"

using namespace fiq;

namespace {

using SpinMatrix = Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SpinMatrix random_reads(int reads, int sites, uint64_t seed) {
  SpinMatrix m(reads, sites);
  Rng rng(seed);
  for (int r = 0; r < reads; ++r)
    for (int i = 0; i < sites; ++i) m(r, i) = rng.next_double() < 0.5 ? 1 : -1;
  return m;
}

// O(N^2) double-sum evaluation of the structure factor definition with
// <s_i s_j> realized as the read average.
Eigen::ArrayXXd sf_direct(const SpinMatrix& reads, int nx, int ny) {
  const int n = nx * ny;
  Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < reads.rows(); ++r)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) ss(i, j) += reads(r, i) * reads(r, j);
  ss /= static_cast<double>(reads.rows());

  Eigen::ArrayXXd out(nx, ny);
  for (int kx = 0; kx < nx; ++kx)
    for (int ky = 0; ky < ny; ++ky) {
      double qx = 2.0 * std::numbers::pi * kx / nx;
      double qy = 2.0 * std::numbers::pi * ky / ny;
      std::complex<double> acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double dx = i / ny - j / ny, dy = i % ny - j % ny;
          acc += ss(i, j) * std::polar(1.0, -(qx * dx + qy * dy));
        }
      out(kx, ky) = acc.real() / (static_cast<double>(n) * n);
    }
  return out;
}

// Maximum |sum_c phase_c * m_c| over all corner sign assignments m_c = +-1.
double corner_maximum(const std::vector<std::complex<double>>& phases, double norm) {
  const int k = static_cast<int>(phases.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    std::complex<double> acc = 0.0;
    for (int c = 0; c < k; ++c) acc += phases[c] * ((mask >> c) & 1 ? 1.0 : -1.0);
    best = std::max(best, std::abs(acc) * norm);
  }
  return best;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("all-up reads have zero AFM order parameter") {
  Lattice lat = build_cylinder(4, 4, 0.9, -0.9);
  SampleSet ss;
  ss.spins = SpinMatrix::Constant(3, 16, 1);
  auto m = afm_order_parameter(ss, assign_sublattices(lat, SublatticeScheme::AFM));
  for (int r = 0; r < 3; ++r) CHECK(m[r] == doctest::Approx(0.0));
}

TEST_CASE("planted sublattice magnetizations give |m_tri| = 1") {
  Lattice lat = build_cylinder(3, 12, 0.9, -2.0);  // 3x6 logical: even classes
  TriLattice tri = contract_to_triangular(lat);
  SublatticeMap map = assign_sublattices_logical(tri);
  // Class 0 -> +1, class 1 -> -1, class 2 -> alternating: (m1, m2, m3) =
  // (1, -1, 0), so m_tri = (1 - w)/sqrt(3) with |1 - w| = sqrt(3).
  SpinMatrix reads(1, tri.n_sites());
  int flip = 1;
  for (int s = 0; s < tri.n_sites(); ++s) {
    if (map.labels[s] == 0)
      reads(0, s) = 1;
    else if (map.labels[s] == 1)
      reads(0, s) = -1;
    else
      reads(0, s) = static_cast<int8_t>(flip = -flip);
  }
  auto m = tri_order_parameter(reads, map);
  CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Villain corner configuration reaches cos(pi/8) + cos(3pi/8)") {
  Lattice lat = build_cylinder(4, 4, 0.9, -0.9);
  SublatticeMap map = assign_sublattices(lat, SublatticeScheme::Vil);
  SpinMatrix reads(1, 16);
  for (int s = 0; s < 16; ++s) reads(0, s) = map.labels[s] < 2 ? 1 : -1;
  SampleSet ss;
  ss.spins = reads;
  auto m = vil_order_parameter(ss, map);
  double expected = std::cos(std::numbers::pi / 8.0) + std::cos(3.0 * std::numbers::pi / 8.0);
  CHECK(m[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.3066).epsilon(1e-4));
}

TEST_CASE("order parameter magnitudes never exceed the corner maxima") {
  const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  double max_afm = corner_maximum({{1.0, 0.0}, {-1.0, 0.0}}, 0.5);
  double max_tri = corner_maximum({{1.0, 0.0}, w, w * w}, 1.0 / std::sqrt(3.0));
  std::vector<std::complex<double>> vil_phases;
  for (int k = 0; k < 4; ++k)
    vil_phases.push_back(std::polar(1.0, (2 * k + 1) * std::numbers::pi / 8.0));
  double max_vil = corner_maximum(vil_phases, 0.5);
  CHECK(max_afm == doctest::Approx(1.0));
  CHECK(max_tri == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(max_vil == doctest::Approx(1.30656).epsilon(1e-4));

  Lattice lat = build_cylinder(12, 12, 0.9, -0.9);
  SampleSet ss;
  ss.spins = random_reads(10000, lat.n_sites(), 99);
  auto afm = afm_order_parameter(ss, assign_sublattices(lat, SublatticeScheme::AFM));
  auto vil = vil_order_parameter(ss, assign_sublattices(lat, SublatticeScheme::Vil));
  CHECK(afm.maxCoeff() <= max_afm + 1e-12);
  CHECK(vil.maxCoeff() <= max_vil + 1e-12);

  Lattice tl = build_cylinder(3, 6, 0.9, -2.0);
  TriLattice tri = contract_to_triangular(tl);
  auto lreads = random_reads(10000, tri.n_sites(), 100);
  auto mtri = tri_order_parameter(lreads, assign_sublattices_logical(tri));
  CHECK(mtri.maxCoeff() <= max_tri + 1e-12);
}

TEST_CASE("pseudospin phases of reference triples") {
  TriLattice tri = make_triangular(3, 3, true, true);
  REQUIRE(!tri.tri_label.empty());
  Eigen::Matrix<int8_t, Eigen::Dynamic, 1> spins(tri.n_sites());
  // (s on label 0, 1, 2) = (+1, -1, -1): psi = 2/sqrt(3), theta = 0.
  for (int s = 0; s < tri.n_sites(); ++s) spins[s] = tri.tri_label[s] == 0 ? 1 : -1;
  DefectField f = pseudospin_field(spins, tri);
  CHECK(f.n_degenerate == 0);
  for (int p = 0; p < f.theta.size(); ++p) CHECK(f.theta[p] == doctest::Approx(0.0));

  // Sign flip: (-1, +1, +1) has theta = pi.
  for (int s = 0; s < tri.n_sites(); ++s) spins[s] = tri.tri_label[s] == 0 ? -1 : 1;
  f = pseudospin_field(spins, tri);
  for (int p = 0; p < f.theta.size(); ++p)
    CHECK(std::abs(f.theta[p]) == doctest::Approx(std::numbers::pi));

  // All spins equal: every face degenerate, flagged, zero defects.
  spins.setConstant(1);
  f = pseudospin_field(spins, tri);
  CHECK(f.n_degenerate == static_cast<int>(tri.faces.size()));
  DefectCount dc = count_defects(f, tri);
  CHECK(dc.n_vortex == 0);
  CHECK(dc.n_antivortex == 0);
}

TEST_CASE("mixed triples have |psi| = 2/sqrt(3)") {
  const std::complex<double> w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  for (int mask = 1; mask < 7; ++mask) {  // skip the two all-equal triples
    double s0 = (mask & 1) ? 1 : -1, s1 = (mask & 2) ? 1 : -1, s2 = (mask & 4) ? 1 : -1;
    std::complex<double> psi = (s0 + w * s1 + w * w * s2) / std::sqrt(3.0);
    CHECK(std::abs(psi) == doctest::Approx(2.0 / std::sqrt(3.0)));
  }
}

TEST_CASE("uniform phase field carries no defects") {
  TriLattice tri = make_triangular(6, 6, true, true);
  DefectField f;
  f.theta = Eigen::VectorXd::Constant(static_cast<int>(tri.faces.size()), 0.7);
  f.degenerate.assign(tri.faces.size(), 0);
  DefectCount dc = count_defects(f, tri);
  CHECK(dc.n_vortex == 0);
  CHECK(dc.n_antivortex == 0);
  CHECK(dc.density == 0.0);
}

TEST_CASE("planted single vortex is counted exactly once") {
  // Open patch: loops do not cover the boundary, so a lone +2pi winding
  // around the center is visible as exactly (1, 0).
  TriLattice tri = make_triangular(7, 7, false, false);
  REQUIRE(!tri.dual_faces.empty());
  auto pos = [](double u, double v) {
    return std::pair{u + 0.5 * v, v * std::numbers::sqrt3 / 2.0};
  };
  auto [cx, cy] = pos(3.0, 3.0);  // the central site
  DefectField f;
  f.theta.resize(static_cast<int>(tri.faces.size()));
  f.degenerate.assign(tri.faces.size(), 0);
  for (size_t p = 0; p < tri.faces.size(); ++p) {
    auto [fx, fy] = pos(tri.face_axial[p][0], tri.face_axial[p][1]);
    f.theta[static_cast<int>(p)] = std::atan2(fy - cy, fx - cx);
  }
  DefectCount dc = count_defects(f, tri);
  CHECK(dc.n_vortex == 1);
  CHECK(dc.n_antivortex == 0);
  CHECK(dc.n_overwound == 0);
}

TEST_CASE("windings balance on fully periodic lattices for every read") {
  for (auto [lu, lv] : {std::pair{6, 6}, {9, 6}}) {
    TriLattice tri = make_triangular(lu, lv, true, true);
    Rng rng(hash_u64(2024, lu, lv));
    for (int read = 0; read < 4000; ++read) {
      Eigen::Matrix<int8_t, Eigen::Dynamic, 1> spins(tri.n_sites());
      for (int s = 0; s < tri.n_sites(); ++s) spins[s] = rng.next_double() < 0.5 ? 1 : -1;
      DefectField f = pseudospin_field(spins, tri);
      DefectCount dc = count_defects(f, tri);
      REQUIRE(dc.n_vortex == dc.n_antivortex);
    }
  }
}

TEST_CASE("structure factor of trivial configurations") {
  SpinMatrix one(3, 1);
  one.setConstant(1);
  StructureFactor sf1 = structure_factor(one, 1, 1);
  CHECK(sf1.mean(0, 0) == doctest::Approx(1.0));

  SpinMatrix up(2, 12);
  up.setConstant(1);
  StructureFactor sf = structure_factor(up, 4, 3);
  CHECK(sf.mean(0, 0) == doctest::Approx(1.0));
  CHECK(sf.mean.sum() == doctest::Approx(1.0));
}

TEST_CASE("structure factor matches the direct double sum") {
  const int nx = 6, ny = 6;
  SpinMatrix reads = random_reads(7, nx * ny, 123);
  StructureFactor sf = structure_factor(reads, nx, ny);
  Eigen::ArrayXXd direct = sf_direct(reads, nx, ny);
  double max_err = (sf.mean - direct).abs().maxCoeff();
  CHECK(max_err < 1e-10);
}

TEST_CASE("per-read structure factors satisfy the sum rule") {
  const int nx = 4, ny = 6;
  SpinMatrix reads = random_reads(20, nx * ny, 321);
  StructureFactor sf = structure_factor(reads, nx, ny, true);
  for (const auto& s : sf.per_read) CHECK(s.sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("three-sublattice pattern peaks away from the zone center") {
  TriLattice tri = make_triangular(6, 6, true, true);
  SpinMatrix reads(1, tri.n_sites());
  int flip = 1;
  for (int s = 0; s < tri.n_sites(); ++s) {
    int lbl = tri.tri_label[s];
    reads(0, s) = lbl == 0 ? 1 : (lbl == 1 ? -1 : static_cast<int8_t>(flip = -flip));
  }
  StructureFactor sf = structure_factor(reads, 6, 6);
  Eigen::ArrayXXd direct = sf_direct(reads, 6, 6);
  CHECK((sf.mean - direct).abs().maxCoeff() < 1e-10);
  int pkx = 0, pky = 0;
  sf.mean.maxCoeff(&pkx, &pky);
  // The three-sublattice order has period 3: the peak sits on the
  // k = +-(2/3) pi star, never at the ferromagnetic zone center.
  CHECK((pkx != 0 || pky != 0));
  CHECK(pkx % 2 == 0);
  CHECK(pky % 2 == 0);
}

TEST_CASE("slices are monotone in q and centered on the peak") {
  const int nx = 8, ny = 8;
  SpinMatrix reads = random_reads(5, nx * ny, 777);
  StructureFactor sf = structure_factor(reads, nx, ny);
  for (int axis : {0, 1}) {
    auto slice = sf_slice(sf, axis);
    CHECK(static_cast<int>(slice.size()) == 8);
    for (size_t i = 1; i < slice.size(); ++i) CHECK(slice[i].first > slice[i - 1].first);
    double best = 0.0;
    for (auto& [q, v] : slice) best = std::max(best, v);
    CHECK(best == doctest::Approx(sf.mean.maxCoeff()));
  }
}

}  // TEST_SUITE
