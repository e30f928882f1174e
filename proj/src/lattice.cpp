#include "fiq/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fiq {

namespace {

int mod(int a, int m) { return ((a % m) + m) % m; }

// Axial -> euclidean embedding of the triangular lattice.
std::array<double, 2> axial_to_euclid(double u, double v) {
  return {u + 0.5 * v, v * std::numbers::sqrt3 / 2.0};
}

// Shared construction of neighbors, faces, dual faces and the canonical
// 3-coloring from an axial (u,v) -> site id lookup.
template <typename IdAt>
void finish_triangular(TriLattice& tri, IdAt&& id_at) {
  const int lu = tri.lu, lv = tri.lv;
  const int n = lu * lv;

  static constexpr int kNbr[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
  tri.neighbors.assign(n, {});
  for (int id = 0; id < n; ++id) {
    auto [u, v] = tri.axial[id];
    for (auto& d : kNbr) {
      int nb = id_at(u + d[0], v + d[1]);
      if (nb >= 0) tri.neighbors[id].push_back(nb);
    }
    std::sort(tri.neighbors[id].begin(), tri.neighbors[id].end());
  }

  tri.site_faces.assign(n, {});
  int u_end = tri.periodic_u ? lu : lu - 1;
  int v_end = tri.periodic_v ? lv : lv - 1;
  for (int u = 0; u < u_end; ++u)
    for (int v = 0; v < v_end; ++v) {
      int s00 = id_at(u, v), s10 = id_at(u + 1, v);
      int s01 = id_at(u, v + 1), s11 = id_at(u + 1, v + 1);
      std::array<std::array<int, 3>, 2> two = {{{s00, s10, s01}, {s10, s01, s11}}};
      std::array<std::array<double, 2>, 2> cen = {
          {{u + 1.0 / 3.0, v + 1.0 / 3.0}, {u + 2.0 / 3.0, v + 2.0 / 3.0}}};
      for (int f = 0; f < 2; ++f) {
        int fid = static_cast<int>(tri.faces.size());
        tri.faces.push_back(two[f]);
        tri.face_axial.push_back(cen[f]);
        for (int s : two[f]) tri.site_faces[s].push_back(fid);
      }
    }

  // Faces sharing an edge (two common sites).
  {
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (size_t f = 0; f < tri.faces.size(); ++f) {
      const auto& fc = tri.faces[f];
      for (int e = 0; e < 3; ++e) {
        int a = fc[e], b = fc[(e + 1) % 3];
        edge_faces[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(f));
      }
    }
    tri.face_adjacent.assign(tri.faces.size(), {-1, -1, -1});
    std::vector<int> fill(tri.faces.size(), 0);
    for (const auto& [edge, fs] : edge_faces) {
      if (fs.size() != 2) continue;
      tri.face_adjacent[fs[0]][fill[fs[0]]++] = fs[1];
      tri.face_adjacent[fs[1]][fill[fs[1]]++] = fs[0];
    }
  }

  // Dual faces: the ring of six triangles around a site, ordered by angle.
  auto wrap_half = [](double d, double period, bool periodic) {
    if (!periodic) return d;
    d = std::fmod(d, period);
    if (d > period / 2) d -= period;
    if (d <= -period / 2) d += period;
    return d;
  };
  for (int s = 0; s < n; ++s) {
    if (tri.site_faces[s].size() != 6) continue;
    auto [su, sv] = tri.axial[s];
    std::vector<std::pair<double, int>> ring;
    for (int fid : tri.site_faces[s]) {
      double du = wrap_half(tri.face_axial[fid][0] - su, lu, tri.periodic_u);
      double dv = wrap_half(tri.face_axial[fid][1] - sv, lv, tri.periodic_v);
      auto e = axial_to_euclid(du, dv);
      ring.emplace_back(std::atan2(e[1], e[0]), fid);
    }
    std::sort(ring.begin(), ring.end());
    // Consecutive triangles around the ring must share an edge through s.
    bool ok = true;
    for (int k = 0; k < 6 && ok; ++k) {
      const auto& fa = tri.faces[ring[k].second];
      const auto& fb = tri.faces[ring[(k + 1) % 6].second];
      int common = 0;
      for (int a : fa)
        for (int b : fb)
          if (a == b) ++common;
      ok = (common == 2) && (ring[k].second != ring[(k + 1) % 6].second);
    }
    if (!ok) continue;
    std::vector<int> loop(6);
    for (int k = 0; k < 6; ++k) loop[k] = ring[k].second;
    tri.dual_faces.push_back(std::move(loop));
    tri.dual_center.push_back(s);
  }

  // Canonical 3-coloring (u - v) mod 3; kept only if consistent across the
  // periodic boundaries.
  bool consistent = (!tri.periodic_u || lu % 3 == 0) && (!tri.periodic_v || lv % 3 == 0);
  if (consistent) {
    tri.tri_label.resize(n);
    for (int id = 0; id < n; ++id)
      tri.tri_label[id] = mod(tri.axial[id][0] - tri.axial[id][1], 3);
  }
}

}  // namespace

Lattice build_cylinder(int lx, int ly, double j1, double j2) {
  if (lx < 2) throw std::invalid_argument("build_cylinder: lx must be >= 2");
  if (ly < 4) throw std::invalid_argument("build_cylinder: ly must be >= 4");
  if (ly % 2 != 0)
    throw std::invalid_argument(
        "build_cylinder: ly must be even so the alternating vertical J1/J2 "
        "pattern closes around the cylinder");

  Lattice lat;
  lat.lx = lx;
  lat.ly = ly;
  lat.j1 = j1;
  lat.j2 = j2;
  lat.topology = Topology::Cylinder;
  if (j1 == 0.9 && j2 == -2.0)
    lat.kind = ModelKind::Triangular;
  else if (j1 == 0.9 && j2 == -0.9)
    lat.kind = ModelKind::Villain;
  else
    lat.kind = ModelKind::Custom;

  lat.bonds.reserve(lx * ly + (lx - 1) * ly);
  // Vertical bonds wrap periodically; J2 sits where (x+y) is even.
  for (int x = 0; x < lx; ++x)
    for (int y = 0; y < ly; ++y) {
      double j = ((x + y) % 2 == 0) ? j2 : j1;
      lat.bonds.push_back({lat.site_id(x, y), lat.site_id(x, (y + 1) % ly), j});
    }
  // Horizontal bonds are open in x and all carry J1.
  for (int x = 0; x + 1 < lx; ++x)
    for (int y = 0; y < ly; ++y)
      lat.bonds.push_back({lat.site_id(x, y), lat.site_id(x + 1, y), j1});
  return lat;
}

Lattice build_ring(int n, double j) {
  if (n < 3) throw std::invalid_argument("build_ring: need at least 3 sites");
  Lattice lat;
  lat.lx = n;
  lat.ly = 1;
  lat.j1 = j;
  lat.j2 = j;
  lat.kind = ModelKind::Custom;
  lat.topology = Topology::Ring;
  for (int i = 0; i < n; ++i) lat.bonds.push_back({i, (i + 1) % n, j});
  return lat;
}

TriLattice make_triangular(int lu, int lv, bool periodic_u, bool periodic_v) {
  if (lu < 2 || lv < 2) throw std::invalid_argument("make_triangular: lu, lv must be >= 2");
  TriLattice tri;
  tri.lu = lu;
  tri.lv = lv;
  tri.periodic_u = periodic_u;
  tri.periodic_v = periodic_v;
  int n = lu * lv;
  tri.axial.resize(n);
  tri.grid.resize(n);
  for (int u = 0; u < lu; ++u)
    for (int v = 0; v < lv; ++v) {
      tri.axial[u * lv + v] = {u, v};
      tri.grid[u * lv + v] = {u, v};
    }

  auto id_at = [&](int u, int v) -> int {
    if (periodic_u) u = mod(u, lu);
    if (periodic_v) v = mod(v, lv);
    if (u < 0 || u >= lu || v < 0 || v >= lv) return -1;
    return u * lv + v;
  };
  finish_triangular(tri, id_at);
  return tri;
}

TriLattice contract_to_triangular(const Lattice& lattice) {
  if (lattice.topology != Topology::Cylinder)
    throw std::invalid_argument("contract_to_triangular: requires a cylinder lattice");
  const int lx = lattice.lx, ly = lattice.ly, lv = ly / 2;

  TriLattice tri;
  tri.lu = lx;
  tri.lv = lv;
  tri.periodic_u = false;
  tri.periodic_v = true;

  int n = lx * lv;
  tri.members.resize(n);
  tri.axial.resize(n);
  tri.grid.resize(n);
  // Logical site (x, r) joins the two endpoints of one J2 bond: rows
  // (2r, 2r+1) in even columns, (2r+1, 2r+2) in odd ones. Its axial v is
  // r - floor(x/2), which turns the brick adjacency into the standard
  // triangular one.
  for (int x = 0; x < lx; ++x)
    for (int r = 0; r < lv; ++r) {
      int id = x * lv + r;
      int y0 = (x % 2 == 0) ? 2 * r : 2 * r + 1;
      tri.members[id] = {lattice.site_id(x, y0), lattice.site_id(x, (y0 + 1) % ly)};
      tri.grid[id] = {x, r};
      tri.axial[id] = {x, mod(r - x / 2, lv)};
    }

  std::vector<int> by_axial(n, -1);
  for (int id = 0; id < n; ++id) by_axial[tri.axial[id][0] * lv + tri.axial[id][1]] = id;
  auto id_at = [&](int u, int v) -> int {
    if (u < 0 || u >= lx) return -1;
    return by_axial[u * lv + mod(v, lv)];
  };
  finish_triangular(tri, id_at);
  return tri;
}

SublatticeMap assign_sublattices_logical(const TriLattice& logical) {
  if (logical.lu % 3 != 0 || logical.lv % 3 != 0)
    throw std::invalid_argument(
        "assign_sublattices: Tri order parameter requires logical dimensions "
        "that are multiples of 3");
  if (logical.tri_label.empty())
    throw std::invalid_argument("assign_sublattices: lattice has no consistent 3-coloring");
  SublatticeMap map;
  map.scheme = SublatticeScheme::Tri;
  map.on_logical = true;
  map.n_classes = 3;
  map.labels = logical.tri_label;
  return map;
}

SublatticeMap assign_sublattices(const Lattice& lattice, SublatticeScheme scheme) {
  if (lattice.topology != Topology::Cylinder)
    throw std::invalid_argument("assign_sublattices: requires a cylinder lattice");
  SublatticeMap map;
  map.scheme = scheme;
  const int lx = lattice.lx, ly = lattice.ly;
  switch (scheme) {
    case SublatticeScheme::AFM: {
      map.n_classes = 2;
      map.labels.resize(lx * ly);
      for (int x = 0; x < lx; ++x)
        for (int y = 0; y < ly; ++y) map.labels[lattice.site_id(x, y)] = (x + y) % 2;
      break;
    }
    case SublatticeScheme::Vil: {
      if (lx % 4 != 0 || ly % 4 != 0)
        throw std::invalid_argument(
            "assign_sublattices: Vil order parameter requires physical "
            "dimensions that are multiples of 4");
      map.n_classes = 4;
      map.labels.resize(lx * ly);
      // Class c is class 0 translated by (c, 0).
      for (int x = 0; x < lx; ++x)
        for (int y = 0; y < ly; ++y) map.labels[lattice.site_id(x, y)] = mod(x + 2 * y, 4);
      break;
    }
    case SublatticeScheme::Tri:
      return assign_sublattices_logical(contract_to_triangular(lattice));
  }
  return map;
}

OrbitPartition compute_orbits(const Lattice& lattice) {
  OrbitPartition part;
  part.orbit_of_bond.resize(lattice.bonds.size());
  if (lattice.topology == Topology::Ring) {
    // A ring is rotationally invariant: one orbit.
    part.members.assign(1, {});
    for (size_t i = 0; i < lattice.bonds.size(); ++i) {
      part.orbit_of_bond[i] = 0;
      part.members[0].push_back(static_cast<int>(i));
    }
    return part;
  }
  // The coupler pattern is invariant under vertical translation by two rows
  // only, so bonds share an orbit exactly when they sit in the same column
  // (or column pair), have the same orientation, and the same row parity.
  std::map<std::array<int, 3>, int> orbit_ids;
  for (size_t i = 0; i < lattice.bonds.size(); ++i) {
    const Bond& b = lattice.bonds[i];
    int xa = lattice.site_x(b.a), ya = lattice.site_y(b.a);
    int xb = lattice.site_x(b.b);
    int vertical = (xa == xb) ? 1 : 0;
    std::array<int, 3> key = {vertical, xa, ya % 2};
    auto [it, inserted] = orbit_ids.try_emplace(key, static_cast<int>(part.members.size()));
    if (inserted) part.members.emplace_back();
    part.orbit_of_bond[i] = it->second;
    part.members[it->second].push_back(static_cast<int>(i));
  }
  return part;
}

std::vector<std::array<int, 4>> plaquettes(const Lattice& lattice) {
  std::vector<std::array<int, 4>> out;
  if (lattice.topology != Topology::Cylinder) return out;
  for (int x = 0; x + 1 < lattice.lx; ++x)
    for (int y = 0; y < lattice.ly; ++y) {
      int yp = (y + 1) % lattice.ly;
      out.push_back({lattice.site_id(x, y), lattice.site_id(x + 1, y),
                     lattice.site_id(x, yp), lattice.site_id(x + 1, yp)});
    }
  return out;
}

int find_bond(const Lattice& lattice, int a, int b) {
  for (size_t i = 0; i < lattice.bonds.size(); ++i) {
    const Bond& bd = lattice.bonds[i];
    if ((bd.a == a && bd.b == b) || (bd.a == b && bd.b == a)) return static_cast<int>(i);
  }
  return -1;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Triangular: return "triangular";
    case ModelKind::Villain: return "villain";
    case ModelKind::Custom: return "custom";
  }
  return "custom";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "triangular") return ModelKind::Triangular;
  if (name == "villain") return ModelKind::Villain;
  if (name == "custom") return ModelKind::Custom;
  throw std::invalid_argument("unknown model kind: " + name);
}

void save_lattice(const std::string& path, const Lattice& lattice) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "fiq-lattice v1\n";
  out.precision(17);
  std::string kind = lattice.topology == Topology::Ring ? "ring" : model_kind_name(lattice.kind);
  out << lattice.lx << ' ' << lattice.ly << ' ' << lattice.j1 << ' ' << lattice.j2 << ' '
      << kind << '\n';
  for (const Bond& b : lattice.bonds) out << b.a << ' ' << b.b << ' ' << b.j << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Lattice load_lattice(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "fiq-lattice v1")
    throw std::runtime_error(path + ": not a fiq lattice file (bad header)");
  int lx, ly;
  double j1, j2;
  std::string kind;
  if (!(in >> lx >> ly >> j1 >> j2 >> kind))
    throw std::runtime_error(path + ": malformed lattice header line");
  Lattice lat = (kind == "ring") ? build_ring(lx, j1) : build_cylinder(lx, ly, j1, j2);
  // Bonds are regenerated from the dimensions; verify the file agrees.
  size_t i = 0;
  int a, b;
  double j;
  while (in >> a >> b >> j) {
    if (i >= lat.bonds.size() || lat.bonds[i].a != a || lat.bonds[i].b != b ||
        std::abs(lat.bonds[i].j - j) > 1e-12)
      throw std::runtime_error(path + ": bond list does not match lattice dimensions");
    ++i;
  }
  if (i != lat.bonds.size())
    throw std::runtime_error(path + ": truncated bond list");
  return lat;
}

}  // namespace fiq
