#include "fiq/observables.hpp"

#include <cmath>
#include <complex>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace fiq {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Eigen::VectorXd per_read_magnitude(
    const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& reads,
    const std::vector<int>& labels, const std::vector<cd>& phases, double norm) {
  const int n_classes = static_cast<int>(phases.size());
  const int n_sites = static_cast<int>(reads.cols());
  if (static_cast<int>(labels.size()) != n_sites)
    throw std::invalid_argument("order parameter: sublattice map does not match read length");
  std::vector<int> counts(n_classes, 0);
  for (int lbl : labels) counts[lbl]++;
  for (int c = 0; c < n_classes; ++c)
    if (counts[c] == 0) throw std::invalid_argument("order parameter: empty sublattice class");

  Eigen::VectorXd out(reads.rows());
  for (int r = 0; r < reads.rows(); ++r) {
    std::vector<double> sums(n_classes, 0.0);
    for (int i = 0; i < n_sites; ++i) sums[labels[i]] += reads(r, i);
    cd acc = 0.0;
    for (int c = 0; c < n_classes; ++c) acc += phases[c] * (sums[c] / counts[c]);
    out[r] = std::abs(acc) * norm;
  }
  return out;
}

}  // namespace

Eigen::VectorXd afm_order_parameter(const SampleSet& samples, const SublatticeMap& map) {
  if (map.scheme != SublatticeScheme::AFM)
    throw std::invalid_argument("afm_order_parameter: wrong sublattice scheme");
  return per_read_magnitude(samples.spins, map.labels, {cd(1.0, 0.0), cd(-1.0, 0.0)}, 0.5);
}

Eigen::VectorXd tri_order_parameter(
    const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& logical_reads,
    const SublatticeMap& map) {
  if (map.scheme != SublatticeScheme::Tri)
    throw std::invalid_argument("tri_order_parameter: wrong sublattice scheme");
  const cd w = std::polar(1.0, 2.0 * kPi / 3.0);
  return per_read_magnitude(logical_reads, map.labels, {cd(1.0, 0.0), w, w * w},
                            1.0 / std::sqrt(3.0));
}

Eigen::VectorXd vil_order_parameter(const SampleSet& samples, const SublatticeMap& map) {
  if (map.scheme != SublatticeScheme::Vil)
    throw std::invalid_argument("vil_order_parameter: wrong sublattice scheme");
  std::vector<cd> phases;
  for (int k = 0; k < 4; ++k) phases.push_back(std::polar(1.0, (2 * k + 1) * kPi / 8.0));
  return per_read_magnitude(samples.spins, map.labels, phases, 0.5);
}

Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> project_logical(
    const SampleSet& samples, const TriLattice& logical) {
  if (logical.members.empty())
    throw std::invalid_argument("project_logical: lattice was not built by contraction");
  Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(
      samples.n_reads(), logical.n_sites());
  for (int r = 0; r < samples.n_reads(); ++r)
    for (int s = 0; s < logical.n_sites(); ++s)
      out(r, s) = samples.spins(r, logical.members[s][0]);
  return out;
}

OrderParamResult order_parameters(const SampleSet& samples, const Lattice& lattice,
                                  const std::vector<SublatticeMap>& maps) {
  OrderParamResult res;
  for (const auto& map : maps) {
    switch (map.scheme) {
      case SublatticeScheme::AFM: {
        res.m_afm = afm_order_parameter(samples, map);
        res.m_afm_mean = res.m_afm->mean();
        break;
      }
      case SublatticeScheme::Tri: {
        TriLattice logical = contract_to_triangular(lattice);
        auto lreads = project_logical(samples, logical);
        res.m_tri = tri_order_parameter(lreads, map);
        res.m_tri_mean = res.m_tri->mean();
        break;
      }
      case SublatticeScheme::Vil: {
        res.m_vil = vil_order_parameter(samples, map);
        res.m_vil_mean = res.m_vil->mean();
        break;
      }
    }
  }
  return res;
}

DefectField pseudospin_field(
    const Eigen::Ref<const Eigen::Matrix<int8_t, Eigen::Dynamic, 1>>& logical_spins,
    const TriLattice& logical) {
  if (logical.tri_label.empty())
    throw std::invalid_argument("pseudospin_field: lattice has no consistent 3-coloring");
  if (logical_spins.size() != logical.n_sites())
    throw std::invalid_argument("pseudospin_field: spin vector does not match lattice");

  const int nf = static_cast<int>(logical.faces.size());
  DefectField field;
  field.theta.resize(nf);
  field.degenerate.assign(nf, 0);

  const cd w = std::polar(1.0, 2.0 * kPi / 3.0);
  for (int f = 0; f < nf; ++f) {
    // Order the triangle corners by sublattice label.
    std::array<int, 3> by_label{-1, -1, -1};
    for (int s : logical.faces[f]) by_label[logical.tri_label[s]] = s;
    for (int s : by_label)
      if (s < 0) throw std::runtime_error("pseudospin_field: face misses a sublattice label");
    double s0 = logical_spins[by_label[0]], s1 = logical_spins[by_label[1]],
           s2 = logical_spins[by_label[2]];
    cd psi = (s0 + w * s1 + w * w * s2) / std::sqrt(3.0);
    if (std::abs(psi) < 0.5) {  // all three spins equal: psi is exactly zero
      field.degenerate[f] = 1;
      field.theta[f] = 0.0;
      ++field.n_degenerate;
    } else {
      field.theta[f] = std::arg(psi);
    }
  }

  // Degenerate faces take the phase of the nearest assigned face
  // (deterministic multi-source BFS over face adjacency).
  if (field.n_degenerate > 0 && field.n_degenerate < nf) {
    std::deque<int> queue;
    std::vector<uint8_t> assigned(nf, 0);
    for (int f = 0; f < nf; ++f)
      if (!field.degenerate[f]) {
        assigned[f] = 1;
        queue.push_back(f);
      }
    while (!queue.empty()) {
      int f = queue.front();
      queue.pop_front();
      for (int g : logical.face_adjacent[f]) {
        if (g < 0 || assigned[g]) continue;
        field.theta[g] = field.theta[f];
        assigned[g] = 1;
        queue.push_back(g);
      }
    }
  }
  return field;
}

DefectCount count_defects(const DefectField& field, const TriLattice& logical) {
  const int n_loops = static_cast<int>(logical.dual_faces.size());
  DefectCount out;
  out.winding.resize(n_loops);
  if (static_cast<int>(field.degenerate.size()) != static_cast<int>(logical.faces.size()))
    throw std::invalid_argument("count_defects: field does not match lattice");

  // Wrapped difference in (-pi, pi]; an exact pi tie breaks antisymmetrically
  // by phase value so that opposite traversals of a dual edge cancel exactly.
  auto wrapped = [](double p, double q) {
    double d = std::fmod(q - p, 2.0 * kPi);
    if (d > kPi) d -= 2.0 * kPi;
    if (d <= -kPi) d += 2.0 * kPi;
    if (std::abs(std::abs(d) - kPi) < 1e-9) d = (p < q) ? kPi : -kPi;
    return d;
  };

  for (int L = 0; L < n_loops; ++L) {
    const auto& loop = logical.dual_faces[L];
    bool touches_degenerate = false;
    double total = 0.0;
    const int k = static_cast<int>(loop.size());
    for (int i = 0; i < k; ++i) {
      int f = loop[i], g = loop[(i + 1) % k];
      if (field.degenerate[f]) touches_degenerate = true;
      total += wrapped(field.theta[f], field.theta[g]);
    }
    int w = static_cast<int>(std::lround(total / (2.0 * kPi)));
    out.winding[L] = w;
    if (w > 0) out.n_vortex += w;
    if (w < 0) out.n_antivortex -= w;
    if (std::abs(w) > 1) ++out.n_overwound;
    if (touches_degenerate) ++out.n_loops_degenerate;
  }
  out.density = n_loops > 0
                    ? static_cast<double>(out.n_vortex + out.n_antivortex) / n_loops
                    : 0.0;
  return out;
}

StructureFactor structure_factor(
    const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& reads, int nx,
    int ny, bool keep_per_read) {
  const int n = nx * ny;
  if (reads.cols() != n)
    throw std::invalid_argument("structure_factor: reads do not match nx * ny sites");
  if (reads.rows() == 0) throw std::invalid_argument("structure_factor: empty sample set");

  Eigen::MatrixXcd wx(nx, nx), wy(ny, ny);
  for (int k = 0; k < nx; ++k)
    for (int x = 0; x < nx; ++x) wx(k, x) = std::polar(1.0, -2.0 * kPi * k * x / nx);
  for (int k = 0; k < ny; ++k)
    for (int y = 0; y < ny; ++y) wy(k, y) = std::polar(1.0, -2.0 * kPi * k * y / ny);

  StructureFactor sf;
  sf.nx = nx;
  sf.ny = ny;
  sf.mean = Eigen::ArrayXXd::Zero(nx, ny);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int r = 0; r < reads.rows(); ++r) {
    // Site order is x-major with y fastest, i.e. column-major (ny, nx).
    Eigen::MatrixXd grid =
        Eigen::Map<const Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic>>(
            reads.row(r).data(), ny, nx)
            .cast<double>();
    Eigen::MatrixXcd f = wy * grid.cast<cd>() * wx.transpose();  // (ky, kx)
    Eigen::ArrayXXd s(nx, ny);
    for (int kx = 0; kx < nx; ++kx)
      for (int ky = 0; ky < ny; ++ky) s(kx, ky) = std::norm(f(ky, kx)) * norm;
    sf.mean += s;
    if (keep_per_read) sf.per_read.push_back(std::move(s));
  }
  sf.mean /= static_cast<double>(reads.rows());
  return sf;
}

std::vector<std::pair<double, double>> sf_slice(const StructureFactor& sf, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("sf_slice: axis must be 0 or 1");
  int pkx = 0, pky = 0;
  sf.mean.maxCoeff(&pkx, &pky);
  const int len = axis == 0 ? sf.nx : sf.ny;
  const int peak = axis == 0 ? pkx : pky;
  std::vector<std::pair<double, double>> slice;
  slice.reserve(len);
  for (int off = -len / 2; off < (len + 1) / 2; ++off) {
    int kw = (((peak + off) % len) + len) % len;
    double q = 2.0 * kPi * (peak + off) / len;
    double val = axis == 0 ? sf.mean(kw, pky) : sf.mean(pkx, kw);
    slice.emplace_back(q, val);
  }
  return slice;
}

}  // namespace fiq
