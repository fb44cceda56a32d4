#pragma once

#include "sceneptp/model_config.hpp"
#include "sceneptp/ops.hpp"
#include "sceneptp/parameters.hpp"

namespace sceneptp {

template <Real T>
struct FusionParams {
  Tensor<T> w_query;   // [D_g, d_k]
  Tensor<T> w_key;     // [D_s, d_k]
  Tensor<T> w_value;   // [D_s, d_v]
  Tensor<T> w_output;  // [d_v, D_g]

  static FusionParams create(ParameterSet<T>& params, const ModelConfig& config);
};

template <Real T>
struct AttentionOutput {
  Tensor<T> values;   // H_attn [N, T, D_g]
  Tensor<T> weights;  // [N, T, S], rows sum to 1
};

/// Graph features query the scene tokens:
///   A = softmax(Q K^T / sqrt(d_k)), H_attn = (A V) W_o
/// with Q = H_graph W_q, K = H_scene W_k, V = H_scene W_v.
template <Real T>
AttentionOutput<T> cross_attention(const Tensor<T>& graph_features, const Tensor<T>& scene_tokens,
                                   const FusionParams<T>& params);

/// H_fused = H_attn + H_graph; shapes must be identical.
template <Real T>
Tensor<T> residual_fuse(const Tensor<T>& attended, const Tensor<T>& graph_features);

}  // namespace sceneptp
