#include "fiq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fiq {

namespace {

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

}  // namespace

void SvgPlot::save(const std::string& path, int width, int height) const {
  const double ml = 70, mr = 20, mt = title.empty() ? 20 : 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      double x = s.x[i], y = s.y[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (log_x && x <= 0) continue;
      if (log_y && y <= 0) continue;
      x = log_x ? std::log10(x) : x;
      y = log_y ? std::log10(y) : y;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin < xmax)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymin < ymax)) {
    ymin -= 1;
    ymax += 1;
  }
  auto px = [&](double x) {
    x = log_x ? std::log10(x) : x;
    return ml + (x - xmin) / (xmax - xmin) * pw;
  };
  auto py = [&](double y) {
    y = log_y ? std::log10(y) : y;
    return mt + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif' font-size='12'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  if (!title.empty())
    svg << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='15'>"
        << esc(title) << "</text>\n";
  svg << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
      << "' fill='none' stroke='black'/>\n";

  // Ticks: 5 per axis in the plotted (possibly log) coordinates.
  for (int t = 0; t <= 4; ++t) {
    double fx = xmin + (xmax - xmin) * t / 4.0;
    double fy = ymin + (ymax - ymin) * t / 4.0;
    double vx = log_x ? std::pow(10.0, fx) : fx;
    double vy = log_y ? std::pow(10.0, fy) : fy;
    double sx = ml + pw * t / 4.0, sy = mt + ph - ph * t / 4.0;
    svg << "<line x1='" << sx << "' y1='" << mt + ph << "' x2='" << sx << "' y2='" << mt + ph + 5
        << "' stroke='black'/>\n";
    svg << "<text x='" << sx << "' y='" << mt + ph + 18 << "' text-anchor='middle'>";
    svg.precision(3);
    svg << vx << "</text>\n";
    svg << "<line x1='" << ml - 5 << "' y1='" << sy << "' x2='" << ml << "' y2='" << sy
        << "' stroke='black'/>\n";
    svg << "<text x='" << ml - 8 << "' y='" << sy + 4 << "' text-anchor='end'>" << vy
        << "</text>\n";
  }
  if (!x_label.empty())
    svg << "<text x='" << ml + pw / 2 << "' y='" << height - 8 << "' text-anchor='middle'>"
        << esc(x_label) << "</text>\n";
  if (!y_label.empty())
    svg << "<text x='14' y='" << mt + ph / 2 << "' text-anchor='middle' transform='rotate(-90 14 "
        << mt + ph / 2 << ")'>" << esc(y_label) << "</text>\n";

  double legend_y = mt + 14;
  for (const auto& s : series) {
    if (s.line && s.x.size() > 1) {
      svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
        svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      svg << "'/>\n";
    }
    if (s.markers)
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
        svg << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
            << "' r='3' fill='" << s.color << "'/>\n";
      }
    if (!s.label.empty()) {
      svg << "<rect x='" << ml + pw - 150 << "' y='" << legend_y - 9 << "' width='12' height='4' fill='"
          << s.color << "'/>\n";
      svg << "<text x='" << ml + pw - 133 << "' y='" << legend_y - 2 << "'>" << esc(s.label)
          << "</text>\n";
      legend_y += 16;
    }
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << svg.str();
}

void save_heatmap_svg(const std::string& path, const Eigen::ArrayXXd& values,
                      const std::string& title, int cell) {
  const int nx = static_cast<int>(values.rows());
  const int ny = static_cast<int>(values.cols());
  const int mt = title.empty() ? 10 : 34;
  const int width = nx * cell + 20, height = ny * cell + mt + 10;
  double vmax = values.maxCoeff(), vmin = values.minCoeff();
  if (!(vmax > vmin)) vmax = vmin + 1;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif' font-size='12'>\n";
  if (!title.empty())
    out << "<text x='" << width / 2 << "' y='20' text-anchor='middle'>" << esc(title)
        << "</text>\n";
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double t = (values(i, j) - vmin) / (vmax - vmin);
      int r = static_cast<int>(255 * t);
      int b = static_cast<int>(255 * (1.0 - t));
      int g = static_cast<int>(80 * (1.0 - std::abs(2 * t - 1)));
      out << "<rect x='" << 10 + i * cell << "' y='" << mt + (ny - 1 - j) * cell << "' width='"
          << cell << "' height='" << cell << "' fill='rgb(" << r << ',' << g << ',' << b
          << ")'/>\n";
    }
  out << "</svg>\n";
}

}  // namespace fiq
