#include "sceneptp/fusion.hpp"

#include <cmath>

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
FusionParams<T> FusionParams<T>::create(ParameterSet<T>& params, const ModelConfig& c) {
  FusionParams p;
  p.w_query = params.he_uniform("fusion.query", {c.d_graph, c.d_k}, c.d_graph);
  p.w_key = params.he_uniform("fusion.key", {c.d_scene, c.d_k}, c.d_scene);
  p.w_value = params.he_uniform("fusion.value", {c.d_scene, c.d_v}, c.d_scene);
  p.w_output = params.he_uniform("fusion.output", {c.d_v, c.d_graph}, c.d_v);
  return p;
}

template <Real T>
AttentionOutput<T> cross_attention(const Tensor<T>& graph_features, const Tensor<T>& scene_tokens,
                                   const FusionParams<T>& p) {
  if (!scene_tokens.defined()) throw ContractError("cross_attention: no scene tokens");
  if (scene_tokens.rank() != 2) throw DimensionError("cross_attention: tokens must be [S, D_s], got " +
                                                     shape_str(scene_tokens.shape()));
  if (graph_features.rank() != 3)
    throw DimensionError("cross_attention: graph features must be [N, T, D_g], got " +
                         shape_str(graph_features.shape()));
  const Tensor<T> q = matmul(graph_features, p.w_query);  // [N, T, d_k]
  const Tensor<T> k = matmul(scene_tokens, p.w_key);      // [S, d_k]
  const Tensor<T> v = matmul(scene_tokens, p.w_value);    // [S, d_v]
  const T inv_sqrt_dk = T(1) / std::sqrt(static_cast<T>(k.dim(1)));
  AttentionOutput<T> out;
  out.weights = softmax(scale(matmul(q, transpose(k)), inv_sqrt_dk), -1);
  out.values = matmul(matmul(out.weights, v), p.w_output);
  return out;
}

template <Real T>
Tensor<T> residual_fuse(const Tensor<T>& attended, const Tensor<T>& graph_features) {
  if (attended.shape() != graph_features.shape())
    throw DimensionError("residual_fuse: " + shape_str(attended.shape()) + " vs " + shape_str(graph_features.shape()));
  return add(attended, graph_features);
}

#define INSTANTIATE(T)                                                                                    \
  template struct FusionParams<T>;                                                                        \
  template AttentionOutput<T> cross_attention(const Tensor<T>&, const Tensor<T>&, const FusionParams<T>&); \
  template Tensor<T> residual_fuse(const Tensor<T>&, const Tensor<T>&);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
