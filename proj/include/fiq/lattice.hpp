#pragma once

#include <array>
#include <string>
#include <vector>

// Cylinder lattice with the alternating J1/J2 coupler pattern, its
// contraction to a triangular lattice of logical sites, sublattice
// assignments for the order parameters, and coupler symmetry orbits.
//
// Site indexing is column-major with y fastest: id = x * ly + y.
// The vertical bond (x,y)-(x,y+1) carries J2 when (x+y) is even and J1
// otherwise, which places exactly one J2 bond on every square plaquette.

namespace fiq {

enum class ModelKind { Triangular, Villain, Custom };
enum class Topology { Cylinder, Ring };

struct Bond {
  int a = 0;
  int b = 0;
  double j = 0.0;
};

struct Lattice {
  int lx = 0;  // open horizontal extent
  int ly = 0;  // periodic vertical extent (even)
  double j1 = 0.0;
  double j2 = 0.0;
  ModelKind kind = ModelKind::Custom;
  Topology topology = Topology::Cylinder;
  std::vector<Bond> bonds;

  int n_sites() const { return topology == Topology::Ring ? lx : lx * ly; }
  int site_id(int x, int y) const { return x * ly + y; }
  int site_x(int id) const { return topology == Topology::Ring ? id : id / ly; }
  int site_y(int id) const { return topology == Topology::Ring ? 0 : id % ly; }
};

// Triangular lattice of logical sites, either from contracting a cylinder
// (open u, periodic v) or built directly with chosen periodicity (used for
// defect analysis on tori). Geometry is kept in axial coordinates; `grid`
// carries the (column, row) coordinates used for structure factors.
struct TriLattice {
  int lu = 0;
  int lv = 0;
  bool periodic_u = false;
  bool periodic_v = true;

  std::vector<std::array<int, 2>> members;  // physical pair per site; empty if standalone
  std::vector<std::array<int, 2>> axial;    // (u, v) per site
  std::vector<std::array<int, 2>> grid;     // (column, row) per site
  std::vector<std::vector<int>> neighbors;

  std::vector<std::array<int, 3>> faces;            // logical triangles
  std::vector<std::array<double, 2>> face_axial;    // face centroid, axial coords
  std::vector<std::vector<int>> site_faces;         // incident faces per site
  std::vector<std::array<int, 3>> face_adjacent;    // edge-sharing faces, -1 padded

  std::vector<std::vector<int>> dual_faces;  // ordered face loop per dual face
  std::vector<int> dual_center;              // logical site each loop surrounds

  std::vector<int> tri_label;  // canonical 3-coloring; empty if inconsistent

  int n_sites() const { return lu * lv; }
};

enum class SublatticeScheme { AFM, Tri, Vil };

struct SublatticeMap {
  SublatticeScheme scheme = SublatticeScheme::AFM;
  bool on_logical = false;  // Tri labels logical sites, AFM/Vil physical ones
  int n_classes = 0;
  std::vector<int> labels;
};

struct OrbitPartition {
  std::vector<int> orbit_of_bond;          // bond index -> orbit id
  std::vector<std::vector<int>> members;   // orbit id -> bond indices
  int n_orbits() const { return static_cast<int>(members.size()); }
};

Lattice build_cylinder(int lx, int ly, double j1, double j2);
Lattice build_ring(int n, double j);

TriLattice contract_to_triangular(const Lattice& lattice);
TriLattice make_triangular(int lu, int lv, bool periodic_u, bool periodic_v);

SublatticeMap assign_sublattices(const Lattice& lattice, SublatticeScheme scheme);
SublatticeMap assign_sublattices_logical(const TriLattice& logical);

OrbitPartition compute_orbits(const Lattice& lattice);

// Square plaquettes of the cylinder as (x,y),(x+1,y),(x,y+1),(x+1,y+1) site
// quadruples, y wrapping periodically.
std::vector<std::array<int, 4>> plaquettes(const Lattice& lattice);

// Index of the bond joining sites a and b, or -1.
int find_bond(const Lattice& lattice, int a, int b);

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

void save_lattice(const std::string& path, const Lattice& lattice);
Lattice load_lattice(const std::string& path);

}  // namespace fiq
