#pragma once

#include <string>
#include <vector>

namespace fiberamp {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color;     // "#rrggbb"; empty picks from a fixed palette
  std::string dash;      // SVG dash pattern, empty = solid
};

struct PlotStyle {
  int width = 860, height = 560;
  std::string title, x_label, y_label;
  bool log_y = false;
};

/// Static line plot; output depends only on the inputs.
std::string svg_line_plot(const std::vector<PlotSeries>& series,
                          const PlotStyle& style);

struct HeatmapStyle {
  int width = 760, height = 560;
  std::string title, x_label, y_label;
  bool log_color = true;
};

/// Filled-cell panel for a value grid (values row-major, ys-major), with a
/// color bar. Cells with non-finite value are hatched gray.
std::string svg_grid_heatmap(const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const std::vector<double>& values,
                             const HeatmapStyle& style);

}  // namespace fiberamp
