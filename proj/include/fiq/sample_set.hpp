#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>

namespace fiq {

struct SampleMeta {
  int lx = 0;
  int ly = 0;
  double j1 = 0.0;
  double j2 = 0.0;
  std::string model = "custom";
  double t_a = 0.0;
  uint64_t seed = 0;
  int reads = 0;
};

// Measured +-1 spin configurations, one row per read, columns in canonical
// site order (column-major sites, y fastest).
struct SampleSet {
  SampleMeta meta;
  Eigen::Matrix<int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> spins;

  int n_reads() const { return static_cast<int>(spins.rows()); }
  int n_sites() const { return static_cast<int>(spins.cols()); }
};

// File format: first line is JSON metadata {lx, ly, j1, j2, model, t_a,
// seed, reads}; each following line is one read of space-separated +-1.
void save_samples(const std::string& path, const SampleSet& samples);
SampleSet load_samples(const std::string& path);

}  // namespace fiq
