#include "sceneptp/scene_encoder.hpp"

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
ConvStack<T> ConvStack<T>::create(ParameterSet<T>& params, const std::string& prefix, std::size_t in_channels,
                                  const std::vector<std::size_t>& channels) {
  ConvStack stack;
  std::size_t c_in = in_channels;
  for (std::size_t l = 0; l < channels.size(); ++l) {
    const std::string name = prefix + ".conv" + std::to_string(l);
    stack.layers.push_back({params.he_uniform(name + ".weight", {channels[l], c_in, 3, 3}, c_in * 9),
                            params.zeros(name + ".bias", {channels[l]}),
                            params.constant(name + ".slope", {1}, T(0.25))});
    c_in = channels[l];
  }
  return stack;
}

template <Real T>
std::size_t ConvStack<T>::total_stride() const {
  std::size_t s = 1;
  for (std::size_t i = 0; i < layers.size(); ++i) s *= stride;
  return s;
}

template <Real T>
SceneEncoderParams<T> SceneEncoderParams<T>::create(ParameterSet<T>& params, const ModelConfig& config) {
  SceneEncoderParams p;
  p.use_semantic = config.use_semantic;
  p.semantic_classes = config.semantic_classes;
  p.frame = ConvStack<T>::create(params, "scene.frame", config.image_channels, config.encoder_channels);
  std::size_t fused = config.encoder_channels.back();
  if (config.use_semantic) {
    p.semantic = ConvStack<T>::create(params, "scene.semantic", config.semantic_classes, config.encoder_channels);
    fused += config.encoder_channels.back();
  }
  p.mlp_weight1 = params.he_uniform("scene.mlp.weight1", {fused, config.d_scene}, fused);
  p.mlp_bias1 = params.zeros("scene.mlp.bias1", {config.d_scene});
  p.mlp_slope = params.constant("scene.mlp.slope", {1}, T(0.25));
  p.mlp_weight2 = params.he_uniform("scene.mlp.weight2", {config.d_scene, config.d_scene}, config.d_scene);
  p.mlp_bias2 = params.zeros("scene.mlp.bias2", {config.d_scene});
  return p;
}

template <Real T>
Tensor<T> conv_stack_forward(const ConvStack<T>& stack, const Tensor<T>& x) {
  if (x.rank() != 3) throw DimensionError("conv stack expects [C, H, W], got " + shape_str(x.shape()));
  Tensor<T> h = reshape(x, {1, x.dim(0), x.dim(1), x.dim(2)});
  for (const auto& layer : stack.layers) h = prelu(conv2d(h, layer.weight, layer.bias, stack.stride), layer.slope);
  return reshape(h, {h.dim(1), h.dim(2), h.dim(3)});
}

template <Real T>
Tensor<T> raster_tensor(const FrameRaster& raster) {
  return Tensor<T>::from({raster.channels, raster.height, raster.width},
                         std::vector<T>(raster.values.begin(), raster.values.end()));
}

template <Real T>
Tensor<T> encode_frame(const ConvStack<T>& stack, const FrameRaster& raster) {
  if (raster.height < kMinRasterExtent || raster.width < kMinRasterExtent)
    throw ConfigError("frame raster " + std::to_string(raster.height) + "x" + std::to_string(raster.width) +
                      " is smaller than the " + std::to_string(kMinRasterExtent) + "x" +
                      std::to_string(kMinRasterExtent) + " minimum");
  return conv_stack_forward(stack, raster_tensor<T>(raster));
}

template <Real T>
Tensor<T> encode_semantic(const ConvStack<T>& stack, const SemanticGrid& grid, std::size_t height, std::size_t width) {
  const SemanticGrid aligned = align_semantic(grid, height, width);
  const auto planes = one_hot(aligned);
  return conv_stack_forward(
      stack, Tensor<T>::from({aligned.class_count, height, width}, std::vector<T>(planes.begin(), planes.end())));
}

template <Real T>
Tensor<T> fuse_scene(const SceneEncoderParams<T>& p, const Tensor<T>& frame_features,
                     const Tensor<T>& semantic_features) {
  Tensor<T> maps = frame_features;
  if (p.use_semantic) {
    if (!semantic_features.defined()) throw ContractError("fuse_scene: semantic features required");
    if (semantic_features.dim(1) != frame_features.dim(1) || semantic_features.dim(2) != frame_features.dim(2))
      throw DimensionError("fuse_scene: frame grid " + shape_str(frame_features.shape()) +
                           " does not match semantic grid " + shape_str(semantic_features.shape()));
    maps = concat<T>({frame_features, semantic_features}, 0);
  }
  const std::size_t channels = maps.dim(0), cells = maps.dim(1) * maps.dim(2);
  const Tensor<T> cells_by_channel = transpose(reshape(maps, {channels, cells}));  // [S, C]
  const Tensor<T> hidden = prelu(linear(cells_by_channel, p.mlp_weight1, p.mlp_bias1), p.mlp_slope);
  return linear(hidden, p.mlp_weight2, p.mlp_bias2);
}

template <Real T>
Tensor<T> encode_scene(const SceneEncoderParams<T>& p, const SceneAssets& assets) {
  if (assets.frame.channels != p.frame.layers.front().weight.dim(1))
    throw ConfigError("scene '" + assets.name + "' raster has " + std::to_string(assets.frame.channels) +
                      " channels, model expects " + std::to_string(p.frame.layers.front().weight.dim(1)));
  const Tensor<T> frame = encode_frame(p.frame, assets.frame);
  Tensor<T> semantic;
  if (p.use_semantic) {
    if (!assets.semantic) throw ConfigError("scene '" + assets.name + "' has no semantic grid");
    if (assets.semantic->class_count != p.semantic_classes)
      throw ConfigError("scene '" + assets.name + "' semantic grid has " +
                        std::to_string(assets.semantic->class_count) + " classes, model expects " +
                        std::to_string(p.semantic_classes));
    semantic = encode_semantic(p.semantic, *assets.semantic, assets.frame.height, assets.frame.width);
  }
  return fuse_scene(p, frame, semantic);
}

#define INSTANTIATE(T)                                                                                   \
  template struct ConvStack<T>;                                                                          \
  template struct SceneEncoderParams<T>;                                                                 \
  template Tensor<T> conv_stack_forward(const ConvStack<T>&, const Tensor<T>&);                         \
  template Tensor<T> raster_tensor<T>(const FrameRaster&);                                               \
  template Tensor<T> encode_frame(const ConvStack<T>&, const FrameRaster&);                             \
  template Tensor<T> encode_semantic(const ConvStack<T>&, const SemanticGrid&, std::size_t, std::size_t); \
  template Tensor<T> fuse_scene(const SceneEncoderParams<T>&, const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> encode_scene(const SceneEncoderParams<T>&, const SceneAssets&);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
