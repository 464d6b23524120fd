#pragma once
// PNG output: w0 heatmaps (x horizontal, p upward, diverging colours
// centred at zero, potential regions shaded gray) and line overlays.
// Every image gets a JSON sidecar describing its scale.

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dw/phase_grid.hpp"

namespace dw {

using Rgb = std::array<unsigned char, 3>;

/// Percentile of |w0| that maps to the ends of the colour range.
inline constexpr double kHeatmapPercentile = 99.5;

/// Diverging map: -1 -> blue, 0 -> white, +1 -> red; clamps outside [-1, 1].
Rgb diverging_color(double v);

/// The q-th percentile (0..100) of |values|, nearest rank.
double abs_percentile(const std::vector<double>& values, double q);

struct HeatmapInfo {
  double scale = 0.0;  // |w0| mapped to full colour
  int width = 0, height = 0;
};

/// values: n_x*n_p samples (x outer, p inner).  Writes path and path + ".json".
HeatmapInfo write_heatmap(const std::filesystem::path& path, const std::vector<double>& values, const PhaseGrid& grid,
                          double time, const std::vector<std::pair<double, double>>& gray_regions = {});

struct LineSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Overlay plot of several series; the sidecar lists each label and colour.
void write_line_plot(const std::filesystem::path& path, const std::vector<LineSeries>& series, const std::string& y_name,
                     int width = 800, int height = 500);

void write_png(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& rgb);

}  // namespace dw
