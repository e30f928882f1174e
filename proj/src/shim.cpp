#include "fiq/shim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "fiq/parallel.hpp"
#include "fiq/rng.hpp"

namespace fiq {

MockErrors zero_errors(const Lattice& lattice, int n_lines) {
  MockErrors e;
  e.qubit_bias = Eigen::VectorXd::Zero(lattice.n_sites());
  e.bond_gain = Eigen::VectorXd::Ones(static_cast<int>(lattice.bonds.size()));
  e.line_timing = Eigen::VectorXd::Zero(n_lines);
  return e;
}

GibbsMockSampler::GibbsMockSampler(Lattice lattice, MockErrors errors, MockSamplerConfig config)
    : lattice_(std::move(lattice)), errors_(std::move(errors)), config_(config) {
  const int n = lattice_.n_sites();
  if (errors_.qubit_bias.size() != n ||
      errors_.bond_gain.size() != static_cast<int>(lattice_.bonds.size()) ||
      errors_.line_timing.size() != config_.n_lines)
    throw std::invalid_argument("GibbsMockSampler: error vectors do not match the lattice");
  line_of_qubit_.resize(n);
  for (int i = 0; i < n; ++i) line_of_qubit_[i] = i % config_.n_lines;
}

SampleSet GibbsMockSampler::sample_with(const SamplerRequest& request) {
  const int n = lattice_.n_sites();
  const int nb = static_cast<int>(lattice_.bonds.size());
  if (request.flux_bias.size() != n || request.couplers.size() != nb ||
      request.line_offsets.size() != config_.n_lines)
    throw std::invalid_argument("sample_with: request does not match the lattice");
  if (request.n_samples < 1) throw std::invalid_argument("sample_with: n_samples must be >= 1");

  // Effective model: fields h_i = b_i + kappa phi_i; couplers scaled by the
  // hidden gain and by the line mismatch factor.
  Eigen::VectorXd h = errors_.qubit_bias + config_.flux_to_field * request.flux_bias;
  Eigen::VectorXd jeff(nb);
  for (int b = 0; b < nb; ++b) {
    const Bond& bd = lattice_.bonds[b];
    double mis = 0.5 * ((errors_.line_timing[line_of_qubit_[bd.a]] -
                         request.line_offsets[line_of_qubit_[bd.a]]) +
                        (errors_.line_timing[line_of_qubit_[bd.b]] -
                         request.line_offsets[line_of_qubit_[bd.b]]));
    jeff[b] = request.couplers[b] * errors_.bond_gain[b] * (1.0 + config_.line_coupling * mis);
  }

  std::vector<std::vector<std::pair<int, double>>> nbr(n);
  for (int b = 0; b < nb; ++b) {
    nbr[lattice_.bonds[b].a].emplace_back(lattice_.bonds[b].b, jeff[b]);
    nbr[lattice_.bonds[b].b].emplace_back(lattice_.bonds[b].a, jeff[b]);
  }

  SampleSet out;
  out.meta.lx = lattice_.lx;
  out.meta.ly = lattice_.ly;
  out.meta.j1 = lattice_.j1;
  out.meta.j2 = lattice_.j2;
  out.meta.model = model_kind_name(lattice_.kind);
  out.meta.seed = request.seed;
  out.meta.reads = request.n_samples;
  out.spins.resize(request.n_samples, n);

  const double beta = config_.beta;
  unsigned threads = config_.threads ? config_.threads : default_threads();
  parallel_for(static_cast<size_t>(request.n_samples), threads, [&](size_t r) {
    Rng rng(hash_u64(request.seed, r, 0x67626273ULL));
    std::vector<int8_t> s(n);
    for (int i = 0; i < n; ++i) s[i] = rng.next_double() < 0.5 ? int8_t{1} : int8_t{-1};
    for (int k = 0; k < config_.equil_sweeps; ++k) {
      for (int i = 0; i < n; ++i) {
        double local = -h[i];
        for (auto [j, jij] : nbr[i]) local += jij * s[j];
        // Heat bath: P(s_i = +1) with E_i = s_i * local.
        double p_up = 1.0 / (1.0 + std::exp(2.0 * beta * local));
        s[i] = rng.next_double() < p_up ? int8_t{1} : int8_t{-1};
      }
    }
    for (int i = 0; i < n; ++i) out.spins(static_cast<int>(r), i) = s[i];
  });
  return out;
}

ShimState initial_shim_state(const Lattice& lattice, int n_lines) {
  ShimState st;
  st.flux = Eigen::VectorXd::Zero(lattice.n_sites());
  st.couplers.resize(static_cast<int>(lattice.bonds.size()));
  for (size_t b = 0; b < lattice.bonds.size(); ++b)
    st.couplers[static_cast<int>(b)] = lattice.bonds[b].j;
  st.offsets = Eigen::VectorXd::Zero(n_lines);
  return st;
}

double frustration_probability(const SampleSet& samples, const Bond& bond) {
  if (samples.n_reads() == 0) throw std::invalid_argument("frustration_probability: no reads");
  double mm = 0.0;
  for (int r = 0; r < samples.n_reads(); ++r)
    mm += samples.spins(r, bond.a) * samples.spins(r, bond.b);
  mm /= samples.n_reads();
  double sign = bond.j >= 0 ? 1.0 : -1.0;
  return (sign * mm + 1.0) / 2.0;
}

Eigen::VectorXd bond_frustrations(const SampleSet& samples, const Lattice& lattice,
                                  const Eigen::VectorXd& applied) {
  const int nb = static_cast<int>(lattice.bonds.size());
  if (applied.size() != nb)
    throw std::invalid_argument("bond_frustrations: applied couplers do not match lattice");
  Eigen::VectorXd f(nb);
  for (int b = 0; b < nb; ++b) {
    Bond bd = lattice.bonds[b];
    bd.j = applied[b];
    f[b] = frustration_probability(samples, bd);
  }
  return f;
}

ShimState flux_shim_step(const ShimState& state, const Eigen::VectorXd& mean_magnetizations) {
  if (mean_magnetizations.size() != state.flux.size())
    throw std::invalid_argument("flux_shim_step: one magnetization per qubit required");
  ShimState next = state;
  next.flux = state.flux - (state.delta_phi * state.flux_gain_scale) * mean_magnetizations;
  return next;
}

ShimState coupler_shim_step(const ShimState& state, const Eigen::VectorXd& frustrations,
                            const OrbitPartition& orbits) {
  if (frustrations.size() != state.couplers.size())
    throw std::invalid_argument("coupler_shim_step: one frustration per bond required");
  if (static_cast<int>(orbits.orbit_of_bond.size()) != state.couplers.size())
    throw std::invalid_argument("coupler_shim_step: orbit partition does not cover the bonds");
  Eigen::VectorXd orbit_mean = Eigen::VectorXd::Zero(orbits.n_orbits());
  for (int o = 0; o < orbits.n_orbits(); ++o) {
    double sum = 0.0;
    for (int b : orbits.members[o]) sum += frustrations[b];
    orbit_mean[o] = sum / static_cast<double>(orbits.members[o].size());
  }
  ShimState next = state;
  for (int b = 0; b < state.couplers.size(); ++b) {
    double sign = state.couplers[b] >= 0 ? 1.0 : -1.0;
    next.couplers[b] =
        state.couplers[b] +
        sign * state.delta_f * (frustrations[b] - orbit_mean[orbits.orbit_of_bond[b]]);
  }
  return next;
}

ShimState offset_shim_step(const ShimState& state, const Eigen::VectorXd& per_line) {
  if (per_line.size() != state.offsets.size())
    throw std::invalid_argument("offset_shim_step: one frustration per line required");
  ShimState next = state;
  double mean = per_line.mean();
  next.offsets = state.offsets - state.delta_o * (per_line.array() - mean).matrix();
  next.offsets.array() -= next.offsets.mean();  // pin the gauge
  return next;
}

Eigen::VectorXd per_line_frustration(const Eigen::VectorXd& frustrations, const Lattice& lattice,
                                     const std::vector<int>& line_of_qubit, int n_lines) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n_lines);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(n_lines);
  for (size_t b = 0; b < lattice.bonds.size(); ++b) {
    const Bond& bd = lattice.bonds[b];
    for (int line : {line_of_qubit[bd.a], line_of_qubit[bd.b]}) {
      sum[line] += frustrations[static_cast<int>(b)];
      count[line] += 1.0;
    }
  }
  for (int l = 0; l < n_lines; ++l)
    if (count[l] > 0) sum[l] /= count[l];
  return sum;
}

double orbit_frustration_spread(const Eigen::VectorXd& frustrations,
                                const OrbitPartition& orbits) {
  double spread = 0.0;
  for (int o = 0; o < orbits.n_orbits(); ++o) {
    double mean = 0.0;
    for (int b : orbits.members[o]) mean += frustrations[b];
    mean /= static_cast<double>(orbits.members[o].size());
    for (int b : orbits.members[o]) spread = std::max(spread, std::abs(frustrations[b] - mean));
  }
  return spread;
}

ShimRunResult run_shim(SamplerInterface& sampler, const ShimState& start, int iterations,
                       int samples_per_iter, uint64_t seed, const ShimOptions& options) {
  const Lattice& lat = sampler.lattice();
  const int n = lat.n_sites();
  const int nb = static_cast<int>(lat.bonds.size());
  const int nl = static_cast<int>(start.offsets.size());
  const OrbitPartition orbits = compute_orbits(lat);

  ShimRunResult res;
  res.final_state = start;
  if (options.record_history) {
    res.flux_history.resize(iterations, n);
    res.coupler_history.resize(iterations, nb);
    res.offset_history.resize(iterations, nl);
    res.magnetization_history.resize(iterations, n);
    res.frustration_history.resize(iterations, nb);
  }

  auto assess = [&](uint64_t stream) {
    SamplerRequest req;
    req.flux_bias = res.final_state.flux;
    req.couplers = res.final_state.couplers;
    req.line_offsets = res.final_state.offsets;
    req.n_samples = options.assess_samples;
    req.seed = hash_u64(seed, stream, 0x617373ULL);
    SampleSet ss = sampler.sample_with(req);
    Eigen::VectorXd mag = ss.spins.cast<double>().colwise().mean();
    Eigen::VectorXd fr = bond_frustrations(ss, lat, res.final_state.couplers);
    return std::make_pair(mag, fr);
  };
  if (options.assess_samples > 0)
    std::tie(res.mag_before, res.frus_before) = assess(0xb4);

  // Iterations continue the numbering of the start state, so a resumed run
  // draws the same per-iteration sample streams as an uninterrupted one.
  const int k_first = start.iteration + 1;
  for (int k = k_first; k < k_first + iterations; ++k) {
    SamplerRequest req;
    req.flux_bias = res.final_state.flux;
    req.couplers = res.final_state.couplers;
    req.line_offsets = res.final_state.offsets;
    req.n_samples = samples_per_iter;
    req.seed = hash_u64(seed, static_cast<uint64_t>(k));
    SampleSet ss;
    try {
      ss = sampler.sample_with(req);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_shim: sampler failed at iteration " + std::to_string(k) +
                               ": " + e.what());
    }

    Eigen::VectorXd mag = ss.spins.cast<double>().colwise().mean();
    Eigen::VectorXd fr = bond_frustrations(ss, lat, res.final_state.couplers);

    res.final_state.flux_gain_scale =
        options.flux_decay_k0 > 0 ? std::min(1.0, static_cast<double>(options.flux_decay_k0) / k)
                                  : 1.0;
    if (options.flux) res.final_state = flux_shim_step(res.final_state, mag);
    if (options.couplers) res.final_state = coupler_shim_step(res.final_state, fr, orbits);
    if (options.offsets) {
      Eigen::VectorXd fl = per_line_frustration(fr, lat, sampler.line_of_qubit(), nl);
      res.final_state = offset_shim_step(res.final_state, fl);
    }
    res.final_state.iteration = k;

    if (options.record_history) {
      int row = k - k_first;
      res.flux_history.row(row) = res.final_state.flux.transpose();
      res.coupler_history.row(row) = res.final_state.couplers.transpose();
      res.offset_history.row(row) = res.final_state.offsets.transpose();
      res.magnetization_history.row(row) = mag.transpose();
      res.frustration_history.row(row) = fr.transpose();
    }
  }
  if (options.assess_samples > 0)
    std::tie(res.mag_after, res.frus_after) = assess(0xa5);
  return res;
}

ShimRunResult run_offset_shim(GibbsMockSampler& ring_sampler, int iterations,
                              int samples_per_iter, uint64_t seed, double delta_o) {
  ShimState st = initial_shim_state(ring_sampler.lattice(), ring_sampler.config().n_lines);
  st.delta_o = delta_o;
  ShimOptions opt;
  opt.flux = false;
  opt.couplers = false;
  opt.offsets = true;
  return run_shim(ring_sampler, st, iterations, samples_per_iter, seed, opt);
}

void save_shim_state(const std::string& path, const ShimState& state, uint64_t seed) {
  nlohmann::json j;
  j["iteration"] = state.iteration;
  j["delta_phi"] = state.delta_phi;
  j["delta_f"] = state.delta_f;
  j["delta_o"] = state.delta_o;
  j["seed"] = seed;
  j["flux"] = std::vector<double>(state.flux.data(), state.flux.data() + state.flux.size());
  j["couplers"] =
      std::vector<double>(state.couplers.data(), state.couplers.data() + state.couplers.size());
  j["offsets"] =
      std::vector<double>(state.offsets.data(), state.offsets.data() + state.offsets.size());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

std::pair<ShimState, uint64_t> load_shim_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  ShimState st;
  st.iteration = j.at("iteration").get<int>();
  st.delta_phi = j.at("delta_phi").get<double>();
  st.delta_f = j.at("delta_f").get<double>();
  st.delta_o = j.at("delta_o").get<double>();
  auto flux = j.at("flux").get<std::vector<double>>();
  auto coup = j.at("couplers").get<std::vector<double>>();
  auto offs = j.at("offsets").get<std::vector<double>>();
  st.flux = Eigen::Map<Eigen::VectorXd>(flux.data(), static_cast<int>(flux.size()));
  st.couplers = Eigen::Map<Eigen::VectorXd>(coup.data(), static_cast<int>(coup.size()));
  st.offsets = Eigen::Map<Eigen::VectorXd>(offs.data(), static_cast<int>(offs.size()));
  return {st, j.at("seed").get<uint64_t>()};
}

}  // namespace fiq
