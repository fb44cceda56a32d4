#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sceneptp {

/// Frame raster [channels, height, width], values in [0, 1] (FGRID format).
struct FrameRaster {
  std::size_t channels = 0, height = 0, width = 0;
  std::vector<double> values;
  bool operator==(const FrameRaster&) const = default;
};

/// Semantic class-id grid [height, width], ids in [0, class_count) (SGRID format).
struct SemanticGrid {
  std::size_t height = 0, width = 0, class_count = 0;
  std::vector<int> ids;
  int at(std::size_t r, std::size_t c) const { return ids[r * width + c]; }
  bool operator==(const SemanticGrid&) const = default;
};

/// Static per-scene context: one representative raster and, optionally, its
/// semantic grid.
struct SceneAssets {
  std::string name;
  FrameRaster frame;
  std::optional<SemanticGrid> semantic;
};

SemanticGrid load_semantic_grid(std::istream& in);
void write_semantic_grid(std::ostream& out, const SemanticGrid& grid);

FrameRaster load_frame_raster(std::istream& in);
void write_frame_raster(std::ostream& out, const FrameRaster& raster);

/// [class_count, height, width] one-hot planes.
std::vector<double> one_hot(const SemanticGrid& grid);

/// Nearest-neighbour resample to (height, width). Only a common integer
/// up- or down-scaling factor on both axes is accepted; anything else is a
/// ConfigError.
SemanticGrid align_semantic(const SemanticGrid& grid, std::size_t height, std::size_t width);

}  // namespace sceneptp
