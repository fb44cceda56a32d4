#include "sceneptp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sceneptp/errors.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

constexpr double kCanvas = 640.0;
constexpr std::size_t kMaxCells = 32;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string num(double v) {
  // Two decimals are plenty for display coordinates.
  return text::format_double(std::round(v * 100.0) / 100.0);
}

}  // namespace

Extent annotation_extent(std::span<const AnnotationRecord> records, double margin) {
  if (records.empty()) return {};
  Extent e{records[0].x, records[0].x, records[0].y, records[0].y};
  for (const auto& r : records) {
    e.x_min = std::min(e.x_min, r.x);
    e.x_max = std::max(e.x_max, r.x);
    e.y_min = std::min(e.y_min, r.y);
    e.y_max = std::max(e.y_max, r.y);
  }
  e.x_min -= margin;
  e.x_max += margin;
  e.y_min -= margin;
  e.y_max += margin;
  return e;
}

std::string render_svg(const TrajectoryWindow& window, std::span<const double> predicted, const Extent& extent,
                       const FrameRaster* raster) {
  const std::size_t n = window.num_peds();
  if (predicted.size() != n * window.pred_len * 2)
    throw DimensionError("predicted trajectories do not match the window");
  const double wx = std::max(extent.x_max - extent.x_min, 1e-9);
  const double wy = std::max(extent.y_max - extent.y_min, 1e-9);
  const double scale = kCanvas / std::max(wx, wy);
  const double width = wx * scale, height = wy * scale;
  // World y points up, SVG y points down.
  auto px = [&](double x) { return (x - extent.x_min) * scale; };
  auto py = [&](double y) { return height - (y - extent.y_min) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  os << "<title>" << window.scene_name << " frame " << window.anchor_frame << "</title>\n";

  if (raster && raster->height && raster->width) {
    const std::size_t rows = std::min(kMaxCells, raster->height), cols = std::min(kMaxCells, raster->width);
    const double cw = width / static_cast<double>(cols), ch = height / static_cast<double>(rows);
    os << "<g class=\"raster\" opacity=\"0.5\">\n";
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t sr = r * raster->height / rows, sc = c * raster->width / cols;
        int rgb[3];
        for (std::size_t k = 0; k < 3; ++k) {
          const std::size_t ch_idx = std::min(k, raster->channels - 1);
          const double v = raster->values[(ch_idx * raster->height + sr) * raster->width + sc];
          rgb[k] = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        }
        os << "<rect x=\"" << num(static_cast<double>(c) * cw) << "\" y=\"" << num(static_cast<double>(r) * ch)
           << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"rgb(" << rgb[0] << ',' << rgb[1]
           << ',' << rgb[2] << ")\"/>\n";
      }
    os << "</g>\n";
  }

  auto polyline = [&](const char* cls, const char* color, const char* dash, auto&& point, std::size_t count,
                      double ax, double ay) {
    os << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (*dash) os << " stroke-dasharray=\"" << dash << "\" stroke-linecap=\"round\"";
    os << " points=\"";
    if (!std::isnan(ax)) os << num(px(ax)) << ',' << num(py(ay)) << ' ';
    for (std::size_t t = 0; t < count; ++t) {
      const auto [x, y] = point(t);
      os << (t ? " " : "") << num(px(x)) << ',' << num(py(y));
    }
    os << "\"/>\n";
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const std::size_t to = window.obs_len, tp = window.pred_len;
    const double lx = window.obs[(i * to + to - 1) * 2], ly = window.obs[(i * to + to - 1) * 2 + 1];
    os << "<g class=\"pedestrian\" data-ped=\"" << window.ped_ids[i] << "\">\n";
    polyline("observed", color, "", [&](std::size_t t) {
      return std::pair{window.obs[(i * to + t) * 2], window.obs[(i * to + t) * 2 + 1]};
    }, to, NAN, NAN);
    polyline("truth", color, "6 4", [&](std::size_t t) {
      return std::pair{window.fut[(i * tp + t) * 2], window.fut[(i * tp + t) * 2 + 1]};
    }, tp, lx, ly);
    polyline("predicted", color, "1 4", [&](std::size_t t) {
      return std::pair{predicted[(i * tp + t) * 2], predicted[(i * tp + t) * 2 + 1]};
    }, tp, lx, ly);
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace sceneptp
