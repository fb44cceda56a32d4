#pragma once

#include <vector>

#include "sceneptp/model_config.hpp"
#include "sceneptp/ops.hpp"
#include "sceneptp/parameters.hpp"
#include "sceneptp/scene_assets.hpp"

// Scene representation: strided conv encoders over the frame raster and the
// one-hot semantic grid, channel concatenation, and a per-cell MLP producing
// S = H' * W' scene tokens.
namespace sceneptp {

template <Real T>
struct ConvLayer {
  Tensor<T> weight;  // [C_out, C_in, 3, 3]
  Tensor<T> bias;
  Tensor<T> slope;
};

/// Each layer: conv2d (3x3, stride 2) followed by PReLU.
template <Real T>
struct ConvStack {
  std::vector<ConvLayer<T>> layers;
  std::size_t stride = 2;

  static ConvStack create(ParameterSet<T>& params, const std::string& prefix, std::size_t in_channels,
                          const std::vector<std::size_t>& channels);
  std::size_t total_stride() const;
};

template <Real T>
struct SceneEncoderParams {
  ConvStack<T> frame;
  ConvStack<T> semantic;  // empty when semantic maps are disabled
  Tensor<T> mlp_weight1, mlp_bias1, mlp_slope;
  Tensor<T> mlp_weight2, mlp_bias2;
  bool use_semantic = true;
  std::size_t semantic_classes = 0;

  static SceneEncoderParams create(ParameterSet<T>& params, const ModelConfig& config);
};

/// x [C, H, W] -> [C_last, ceil(H / total_stride), ceil(W / total_stride)].
template <Real T>
Tensor<T> conv_stack_forward(const ConvStack<T>& stack, const Tensor<T>& x);

template <Real T>
Tensor<T> raster_tensor(const FrameRaster& raster);

/// Frame raster branch. Rasters under kMinRasterExtent on a side are a
/// ConfigError.
template <Real T>
Tensor<T> encode_frame(const ConvStack<T>& stack, const FrameRaster& raster);

/// Semantic branch: align the grid to (height, width) of the raster, expand to
/// one-hot class_count channels and run the conv stack.
template <Real T>
Tensor<T> encode_semantic(const ConvStack<T>& stack, const SemanticGrid& grid, std::size_t height, std::size_t width);

/// Concatenate channels (frame only when use_semantic is false), apply the
/// per-cell MLP and flatten the grid into tokens [S, D_s].
template <Real T>
Tensor<T> fuse_scene(const SceneEncoderParams<T>& params, const Tensor<T>& frame_features,
                     const Tensor<T>& semantic_features);

/// Full scene encoding of one SceneAssets into tokens [S, D_s].
template <Real T>
Tensor<T> encode_scene(const SceneEncoderParams<T>& params, const SceneAssets& assets);

}  // namespace sceneptp
