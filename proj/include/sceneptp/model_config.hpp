#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sceneptp {

/// Architecture hyperparameters. Everything here is saved in checkpoints.
struct ModelConfig {
  std::size_t obs_len = 8;
  std::size_t pred_len = 12;
  std::size_t d_graph = 64;
  std::size_t d_scene = 64;
  std::size_t d_k = 64;
  std::size_t d_v = 64;
  std::size_t sparsity_k = 4;
  std::size_t graph_layers = 2;
  std::size_t image_channels = 3;
  std::size_t semantic_classes = 8;
  std::vector<std::size_t> encoder_channels{16, 32, 64};
  std::size_t tcn_kernel = 3;
  std::vector<std::size_t> tcn_dilations{1, 2};
  bool use_semantic = true;

  void validate() const;
  // key=value lines, one per field.
  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);
  bool operator==(const ModelConfig&) const = default;
};

/// Rasters smaller than this on either side are rejected by the scene encoder.
inline constexpr std::size_t kMinRasterExtent = 32;

}  // namespace sceneptp
