#include "fiq/sample_set.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace fiq {

void save_samples(const std::string& path, const SampleSet& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  nlohmann::json meta = {
      {"lx", samples.meta.lx},   {"ly", samples.meta.ly},     {"j1", samples.meta.j1},
      {"j2", samples.meta.j2},   {"model", samples.meta.model}, {"t_a", samples.meta.t_a},
      {"seed", samples.meta.seed}, {"reads", samples.meta.reads}};
  out << meta.dump() << '\n';
  for (int r = 0; r < samples.n_reads(); ++r) {
    for (int i = 0; i < samples.n_sites(); ++i) {
      if (i) out << ' ';
      out << static_cast<int>(samples.spins(r, i));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty sample file");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": bad metadata line: " + e.what());
  }
  SampleSet ss;
  ss.meta.lx = meta.value("lx", 0);
  ss.meta.ly = meta.value("ly", 0);
  ss.meta.j1 = meta.value("j1", 0.0);
  ss.meta.j2 = meta.value("j2", 0.0);
  ss.meta.model = meta.value("model", "custom");
  ss.meta.t_a = meta.value("t_a", 0.0);
  ss.meta.seed = meta.value("seed", uint64_t{0});
  ss.meta.reads = meta.value("reads", 0);

  std::vector<std::vector<int8_t>> rows;
  int width = -1;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<int8_t> row;
    int v;
    while (ls >> v) {
      if (v != 1 && v != -1)
        throw std::runtime_error(path + ": spin must be +1 or -1 at line " +
                                 std::to_string(lineno));
      row.push_back(static_cast<int8_t>(v));
    }
    if (width < 0) width = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != width)
      throw std::runtime_error(path + ": inconsistent read length at line " +
                               std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  ss.spins.resize(static_cast<int>(rows.size()), width < 0 ? 0 : width);
  for (size_t r = 0; r < rows.size(); ++r)
    for (int i = 0; i < width; ++i) ss.spins(static_cast<int>(r), i) = rows[r][i];
  return ss;
}

}  // namespace fiq
