#pragma once

#include <span>
#include <string>
#include <vector>

#include "sceneptp/annotations.hpp"
#include "sceneptp/scene_assets.hpp"

namespace sceneptp {

struct Extent {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

/// Bounding box of all annotated positions, padded by margin meters.
Extent annotation_extent(std::span<const AnnotationRecord> records, double margin = 0.5);

/// One <g> per pedestrian holding observed (solid), ground-truth (dashed) and
/// predicted (dotted) polylines, over a coarse rendering of the raster
/// stretched across extent. predicted is [N, pred_len, 2].
std::string render_svg(const TrajectoryWindow& window, std::span<const double> predicted, const Extent& extent,
                       const FrameRaster* raster);

}  // namespace sceneptp
