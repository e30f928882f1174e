#include "fiq/clockmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fiq/fitting.hpp"
#include "fiq/parallel.hpp"
#include "fiq/rng.hpp"

namespace fiq {

namespace {

// 2 * cos(2 pi d / 6): the six-state bond energies are half-integers, so all
// acceptance tests run in exact integer arithmetic.
constexpr int kCos2[6] = {2, 1, -1, -2, -1, 1};

inline int bond2(int qa, int qb) { return kCos2[(qa - qb + 6) % 6]; }

}  // namespace

HoneycombLattice build_honeycomb(int l) {
  if (l < 4 || l % 2 != 0)
    throw std::invalid_argument("build_honeycomb: l must be even and >= 4");
  HoneycombLattice lat;
  lat.l = l;
  const int n = l * l;
  lat.neighbors.assign(n, {-1, -1, -1});
  std::vector<int> fill(n, 0);
  auto add_edge = [&](int a, int b) {
    lat.edges.push_back({a, b});
    lat.neighbors[a][fill[a]++] = b;
    lat.neighbors[b][fill[b]++] = a;
  };
  for (int x = 0; x < l; ++x)
    for (int y = 0; y < l; ++y) {
      add_edge(lat.site_id(x, y), lat.site_id((x + 1) % l, y));
      if ((x + y) % 2 == 0) add_edge(lat.site_id(x, y), lat.site_id(x, (y + 1) % l));
    }
  return lat;
}

ClockConfig random_clock_config(const HoneycombLattice& lattice, uint64_t seed) {
  ClockConfig cfg;
  cfg.seed = seed;
  cfg.q.resize(lattice.n_sites());
  Rng rng(hash_u64(seed, 0x696e6974ULL));  // init stream
  for (auto& q : cfg.q) q = static_cast<uint8_t>(rng.next_below(6));
  return cfg;
}

double clock_energy(const ClockConfig& config, const HoneycombLattice& lattice) {
  long long total2 = 0;
  for (const auto& e : lattice.edges) total2 += bond2(config.q[e[0]], config.q[e[1]]);
  return -0.5 * static_cast<double>(total2);
}

double clock_sweep(ClockConfig& config, const HoneycombLattice& lattice) {
  // Fresh deterministic stream per time step, so trajectories replay from
  // (seed, step) alone.
  Rng rng(hash_u64(config.seed, static_cast<uint64_t>(config.step), 0x73776565ULL));
  auto& q = config.q;
  long long delta2 = 0;

  // Edge pass: propose new angles for both endpoints at once.
  static thread_local std::vector<int> perm;
  perm.resize(lattice.edges.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int ei : perm) {
    const int i = lattice.edges[ei][0], j = lattice.edges[ei][1];
    const int qi = q[i], qj = q[j];
    const int pi = static_cast<int>(rng.next_below(6));
    const int pj = static_cast<int>(rng.next_below(6));
    int e_old = bond2(qi, qj), e_new = bond2(pi, pj);
    for (int k : lattice.neighbors[i])
      if (k != j) {
        e_old += bond2(qi, q[k]);
        e_new += bond2(pi, q[k]);
      }
    for (int k : lattice.neighbors[j])
      if (k != i) {
        e_old += bond2(qj, q[k]);
        e_new += bond2(pj, q[k]);
      }
    if (e_new >= e_old) {  // energy is -sum/2: not increased
      q[i] = static_cast<uint8_t>(pi);
      q[j] = static_cast<uint8_t>(pj);
      delta2 += e_new - e_old;
    }
  }

  // Site pass: single-spin proposals.
  perm.resize(lattice.n_sites());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int i : perm) {
    const int qi = q[i];
    const int pi = static_cast<int>(rng.next_below(6));
    int e_old = 0, e_new = 0;
    for (int k : lattice.neighbors[i]) {
      e_old += bond2(qi, q[k]);
      e_new += bond2(pi, q[k]);
    }
    if (e_new >= e_old) {
      q[i] = static_cast<uint8_t>(pi);
      delta2 += e_new - e_old;
    }
  }

  ++config.step;
  return -0.5 * static_cast<double>(delta2);
}

double correlation_length(const Eigen::VectorXd& corr, int r_min) {
  // Truncate at the first non-positive value; fit log C against r.
  std::vector<double> rs, lc;
  for (int k = 0; k < corr.size(); ++k) {
    if (corr[k] <= 0.0) break;
    rs.push_back(r_min + k);
    lc.push_back(std::log(corr[k]));
  }
  if (rs.size() < 4) return std::numeric_limits<double>::quiet_NaN();
  Eigen::Map<Eigen::VectorXd> x(rs.data(), rs.size()), y(lc.data(), lc.size());
  double slope = linear_fit(x, y).first;
  if (slope >= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -1.0 / slope;
}

CoarsenResult run_coarsening(const CoarsenParams& params) {
  if (params.replicas < 1) throw std::invalid_argument("run_coarsening: replicas must be >= 1");
  if (params.steps < 0) throw std::invalid_argument("run_coarsening: steps must be >= 0");
  if (params.r_min < 1 || params.r_max < params.r_min)
    throw std::invalid_argument("run_coarsening: bad correlation distance range");
  const HoneycombLattice lattice = build_honeycomb(params.l);
  const int n = lattice.n_sites();
  const int l = params.l;
  const int n_rec = params.steps + 1;
  const int n_dist = params.r_max - params.r_min + 1;
  if (params.r_max >= l / 2)
    throw std::invalid_argument("run_coarsening: r_max must be below l/2");

  double cth[6], sth[6];
  for (int d = 0; d < 6; ++d) {
    cth[d] = std::cos(2.0 * std::numbers::pi * d / 6.0);
    sth[d] = std::sin(2.0 * std::numbers::pi * d / 6.0);
  }

  CoarsenResult res;
  res.step.resize(n_rec);
  for (int s = 0; s < n_rec; ++s) res.step[s] = s;
  res.m_replica.resize(n_rec, params.replicas);
  std::vector<Eigen::MatrixXd> corr(params.replicas);

  parallel_for(static_cast<size_t>(params.replicas), params.threads ? params.threads
                                                                    : default_threads(),
               [&](size_t rep) {
    // Documented seed split: replica r runs on hash(master_seed, r, 'rep').
    ClockConfig cfg = random_clock_config(lattice, hash_u64(params.seed, rep, 0x726570ULL));
    Eigen::MatrixXd& cr = corr[rep];
    cr.resize(n_rec, n_dist);
    for (int s = 0; s < n_rec; ++s) {
      if (s > 0) clock_sweep(cfg, lattice);
      double mx = 0.0, my = 0.0;
      for (int i = 0; i < n; ++i) {
        mx += cth[cfg.q[i]];
        my += sth[cfg.q[i]];
      }
      res.m_replica(s, static_cast<int>(rep)) = std::hypot(mx / n, my / n);
      // Pair correlations along the two axes of the embedding grid, where
      // the Euclidean distance is exactly r.
      for (int k = 0; k < n_dist; ++k) {
        const int r = params.r_min + k;
        long long acc2 = 0;
        for (int x = 0; x < l; ++x) {
          const int xr = (x + r) % l;
          for (int y = 0; y < l; ++y) {
            const int yr = (y + r) % l;
            acc2 += bond2(cfg.q[x * l + y], cfg.q[xr * l + y]);
            acc2 += bond2(cfg.q[x * l + y], cfg.q[x * l + yr]);
          }
        }
        cr(s, k) = 0.5 * static_cast<double>(acc2) / (2.0 * n);
      }
    }
  });

  res.corr_mean = Eigen::MatrixXd::Zero(n_rec, n_dist);
  for (int rep = 0; rep < params.replicas; ++rep) res.corr_mean += corr[rep];
  res.corr_mean /= params.replicas;

  res.m_mean.resize(n_rec);
  res.m_lo.resize(n_rec);
  res.m_hi.resize(n_rec);
  res.xi.resize(n_rec);
  res.xi_lo.resize(n_rec);
  res.xi_hi.resize(n_rec);

  const int nb = params.bootstrap_resamples;
  const int nr = params.replicas;
  std::vector<double> boot_m(nb), boot_xi(nb);
  auto pct = [](std::vector<double>& v, double p) {
    std::sort(v.begin(), v.end());
    double pos = p * (v.size() - 1);
    size_t i = static_cast<size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    double w = pos - i;
    return v[i] * (1.0 - w) + v[i + 1] * w;
  };

  Eigen::VectorXd cmean(n_dist);
  for (int s = 0; s < n_rec; ++s) {
    res.m_mean[s] = res.m_replica.row(s).mean();
    res.xi[s] = correlation_length(res.corr_mean.row(s).transpose(), params.r_min);

    Rng rng(hash_u64(params.seed, static_cast<uint64_t>(s), 0x626f6f74ULL));
    for (int b = 0; b < nb; ++b) {
      double msum = 0.0;
      cmean.setZero();
      for (int k = 0; k < nr; ++k) {
        int rep = static_cast<int>(rng.next_below(static_cast<uint32_t>(nr)));
        msum += res.m_replica(s, rep);
        cmean += corr[rep].row(s).transpose();
      }
      boot_m[b] = msum / nr;
      boot_xi[b] = correlation_length(cmean / nr, params.r_min);
    }
    res.m_lo[s] = pct(boot_m, 0.025);
    res.m_hi[s] = pct(boot_m, 0.975);
    // NaN fits (no decaying regime yet) are dropped from the xi interval.
    std::vector<double> xi_ok;
    for (double v : boot_xi)
      if (std::isfinite(v)) xi_ok.push_back(v);
    if (xi_ok.size() >= 10) {
      res.xi_lo[s] = pct(xi_ok, 0.025);
      res.xi_hi[s] = pct(xi_ok, 0.975);
    } else {
      res.xi_lo[s] = res.xi_hi[s] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return res;
}

}  // namespace fiq
