#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

// Minimal SVG writer for line/scatter plots and heatmaps. Plots are a
// convenience; the CSVs remain the data contract.

namespace fiq {

struct SvgSeries {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  std::string label;
  bool line = true;
  bool markers = true;
};

struct SvgPlot {
  std::string title;
  std::string x_label, y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<SvgSeries> series;

  void save(const std::string& path, int width = 640, int height = 480) const;
};

void save_heatmap_svg(const std::string& path, const Eigen::ArrayXXd& values,
                      const std::string& title, int cell = 12);

}  // namespace fiq
