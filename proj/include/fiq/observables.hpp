#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <vector>

#include "fiq/lattice.hpp"
#include "fiq/sample_set.hpp"

// Order parameters, plaquette pseudospins and vortex counting, and the
// static structure factor.

namespace fiq {

// ---- order parameters ----

struct OrderParamResult {
  // Per-read order parameter magnitudes and their sample means. Entries are
  // present when the corresponding sublattice map was supplied.
  std::optional<Eigen::VectorXd> m_afm;
  std::optional<Eigen::VectorXd> m_tri;
  std::optional<Eigen::VectorXd> m_vil;
  double m_afm_mean = 0.0;
  double m_tri_mean = 0.0;
  double m_vil_mean = 0.0;
};

// m_AFM = (m_1 - m_2)/2 over the physical checkerboard (per read, |.|).
Eigen::VectorXd afm_order_parameter(const SampleSet& samples, const SublatticeMap& map);

// m_Tri = (m_1 + w m_2 + w^2 m_3)/sqrt(3), w = exp(2 pi i/3), over logical
// sublattices; reads hold one +-1 value per logical site.
Eigen::VectorXd tri_order_parameter(
    const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& logical_reads,
    const SublatticeMap& map);

// m_Vil = (e^{i pi/8} m_1 + e^{3 i pi/8} m_2 + e^{5 i pi/8} m_3
//          + e^{7 i pi/8} m_4)/2 over physical sublattices.
Eigen::VectorXd vil_order_parameter(const SampleSet& samples, const SublatticeMap& map);

OrderParamResult order_parameters(const SampleSet& samples, const Lattice& lattice,
                                  const std::vector<SublatticeMap>& maps);

// Projects physical reads onto logical sites; the logical spin is the first
// member of the J2-coupled pair in canonical site order.
Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> project_logical(
    const SampleSet& samples, const TriLattice& logical);

// ---- pseudospins and topological defects ----

struct DefectField {
  Eigen::VectorXd theta;               // pseudospin phase per triangle face
  std::vector<uint8_t> degenerate;     // faces with all three spins equal
  int n_degenerate = 0;
};

// psi_p = (s_a + w s_b + w^2 s_c)/sqrt(3) with the face sites ordered by
// their canonical sublattice label. Degenerate faces (all spins equal, so
// psi = 0) take the phase of the nearest assigned neighbor.
DefectField pseudospin_field(const Eigen::Ref<const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>>&
                                 logical_spins,
                             const TriLattice& logical);

struct DefectCount {
  int n_vortex = 0;
  int n_antivortex = 0;
  Eigen::VectorXi winding;   // per dual face
  double density = 0.0;      // (n_v + n_av) / n_dual_faces
  int n_loops_degenerate = 0;  // loops touching a degenerate face
  int n_overwound = 0;         // loops with |winding| > 1 (flagged)
};

// Winding of the pseudospin phase around every dual face. Phase differences
// are wrapped to (-pi, pi] with a fixed antisymmetric tie-break at pi, which
// makes the total winding over a fully periodic lattice exactly zero.
DefectCount count_defects(const DefectField& field, const TriLattice& logical);

// ---- static structure factor ----

struct StructureFactor {
  int nx = 0;
  int ny = 0;
  Eigen::ArrayXXd mean;                 // averaged over reads; (nx, ny)
  std::vector<Eigen::ArrayXXd> per_read;  // filled when keep_per_read
};

// S(q) = |sum_i s_i exp(-i q.r_i)|^2 / N^2 per read on the discrete grid
// q_x = 2 pi k / nx, q_y = 2 pi k / ny, averaged over reads. Sites are laid
// out x-major with y fastest: site = x * ny + y.
StructureFactor structure_factor(
    const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& reads, int nx,
    int ny, bool keep_per_read = false);

// 1D cut of the averaged S(q) through its brightest peak, along qx (axis 0)
// or qy (axis 1). Momenta are unwrapped around the peak so the slice is
// monotone in q; values are (q, S).
std::vector<std::pair<double, double>> sf_slice(const StructureFactor& sf, int axis);

}  // namespace fiq
