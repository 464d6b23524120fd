#include "dw/heatmap.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dw/errors.hpp"
#include "json.hpp"

namespace dw {

namespace {

const std::array<Rgb, 5> kAnchors = {Rgb{5, 48, 97}, Rgb{103, 169, 207}, Rgb{247, 247, 247}, Rgb{239, 138, 98},
                                     Rgb{103, 0, 31}};

const std::array<Rgb, 8> kLineColors = {Rgb{31, 119, 180}, Rgb{255, 127, 14}, Rgb{44, 160, 44}, Rgb{214, 39, 40},
                                        Rgb{148, 103, 189}, Rgb{140, 86, 75}, Rgb{227, 119, 194}, Rgb{127, 127, 127}};

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace

Rgb diverging_color(double v) {
  if (std::isnan(v)) return {0, 0, 0};
  const double t = (std::clamp(v, -1.0, 1.0) + 1.0) * 2.0;  // 0..4
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  Rgb out;
  for (int c = 0; c < 3; ++c)
    out[c] = static_cast<unsigned char>(std::lround((1 - f) * kAnchors[k][c] + f * kAnchors[k + 1][c]));
  return out;
}

double abs_percentile(const std::vector<double>& values, double q) {
  if (values.empty()) return 0.0;
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::abs(v); });
  const double rank = std::ceil(q / 100.0 * static_cast<double>(a.size()));
  const std::size_t k = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(a.size()))) - 1;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end());
  return a[k];
}

void write_png(const std::filesystem::path& path, int width, int height, const std::vector<unsigned char>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw IoError("write_png: buffer size mismatch");
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::fclose(fp);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < height; ++r)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(r) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw IoError("write failed for " + path.string());
}

HeatmapInfo write_heatmap(const std::filesystem::path& path, const std::vector<double>& values, const PhaseGrid& grid,
                          double time, const std::vector<std::pair<double, double>>& gray_regions) {
  if (values.size() != grid.points()) throw ConfigError("write_heatmap: value count does not match the grid");
  HeatmapInfo info;
  info.width = grid.n_x;
  info.height = grid.n_p;
  info.scale = abs_percentile(values, kHeatmapPercentile);
  const double inv = info.scale > 0.0 ? 1.0 / info.scale : 0.0;
  std::vector<unsigned char> rgb(static_cast<std::size_t>(info.width) * info.height * 3);
  for (int i = 0; i < grid.n_x; ++i) {
    bool gray = false;
    for (const auto& [lo, hi] : gray_regions) gray = gray || (grid.x(i) >= lo && grid.x(i) <= hi);
    for (int j = 0; j < grid.n_p; ++j) {
      Rgb c = diverging_color(values[static_cast<std::size_t>(i) * grid.n_p + j] * inv);
      if (gray)
        for (auto& ch : c) ch = static_cast<unsigned char>(std::lround(0.65 * ch + 0.35 * 128));
      const int row = grid.n_p - 1 - j;
      std::copy(c.begin(), c.end(), rgb.begin() + (static_cast<std::ptrdiff_t>(row) * info.width + i) * 3);
    }
  }
  write_png(path, info.width, info.height, rgb);
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& [lo, hi] : gray_regions) regions.push_back({lo, hi});
  write_json(path.string() + ".json", {{"image", path.filename().string()},
                                       {"quantity", "w0"},
                                       {"time", time},
                                       {"x_range", {grid.x_min, grid.x_max}},
                                       {"p_range", {grid.p_min, grid.p_max}},
                                       {"orientation", "x horizontal (left to right), p vertical (bottom to top)"},
                                       {"colormap", "diverging blue-white-red, centred at 0"},
                                       {"color_range", {-info.scale, info.scale}},
                                       {"abs_percentile", kHeatmapPercentile},
                                       {"gray_regions", regions}});
  return info;
}

void write_line_plot(const std::filesystem::path& path, const std::vector<LineSeries>& series, const std::string& y_name,
                     int width, int height) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!(x1 > x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const int margin = 20;
  std::vector<unsigned char> rgb(static_cast<std::size_t>(width) * height * 3, 255);
  auto plot = [&](int px, int py, const Rgb& c) {
    if (px < 0 || py < 0 || px >= width || py >= height) return;
    std::copy(c.begin(), c.end(), rgb.begin() + (static_cast<std::ptrdiff_t>(py) * width + px) * 3);
  };
  auto to_px = [&](double x, double y) {
    return std::pair<double, double>{margin + (x - x0) / (x1 - x0) * (width - 2 * margin),
                                     height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)};
  };
  const Rgb black{0, 0, 0};
  for (int px = margin; px <= width - margin; ++px) plot(px, height - margin, black), plot(px, margin, black);
  for (int py = margin; py <= height - margin; ++py) plot(margin, py, black), plot(width - margin, py, black);
  nlohmann::json legend = nlohmann::json::array();
  for (std::size_t s = 0; s < series.size(); ++s) {
    const Rgb c = kLineColors[s % kLineColors.size()];
    legend.push_back({{"label", series[s].label}, {"color", hex(c)}});
    const auto& xs = series[s].x;
    const auto& ys = series[s].y;
    for (std::size_t k = 1; k < xs.size() && k < ys.size(); ++k) {
      if (!std::isfinite(ys[k]) || !std::isfinite(ys[k - 1])) continue;
      const auto [ax, ay] = to_px(xs[k - 1], ys[k - 1]);
      const auto [bx, by] = to_px(xs[k], ys[k]);
      const int n = 1 + static_cast<int>(std::max(std::abs(bx - ax), std::abs(by - ay)));
      for (int u = 0; u <= n; ++u) {
        const double f = static_cast<double>(u) / n;
        const int px = static_cast<int>(std::lround(ax + f * (bx - ax)));
        const int py = static_cast<int>(std::lround(ay + f * (by - ay)));
        plot(px, py, c);
        plot(px, py + 1, c);
      }
    }
  }
  write_png(path, width, height, rgb);
  write_json(path.string() + ".json", {{"image", path.filename().string()},
                                       {"x_name", "t"},
                                       {"y_name", y_name},
                                       {"x_range", {x0, x1}},
                                       {"y_range", {y0, y1}},
                                       {"series", legend}});
}

}  // namespace dw
