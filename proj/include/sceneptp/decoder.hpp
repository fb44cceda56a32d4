#pragma once

#include <vector>

#include "sceneptp/model_config.hpp"
#include "sceneptp/ops.hpp"
#include "sceneptp/parameters.hpp"

namespace sceneptp {

template <Real T>
struct TcnBlock {
  Tensor<T> weight;  // [D, D, k]
  Tensor<T> bias;
  Tensor<T> slope;
  std::size_t dilation = 1;
};

/// Residual dilated causal blocks over the observed time axis, a time
/// expansion convolution (observed steps as input channels, predicted steps
/// as output channels) and a linear head to 2-D displacements.
template <Real T>
struct DecoderParams {
  std::vector<TcnBlock<T>> blocks;
  Tensor<T> expand_weight;  // [pred_len, obs_len, k]
  Tensor<T> expand_bias;
  Tensor<T> expand_slope;
  Tensor<T> head_weight;  // [D, 2]
  Tensor<T> head_bias;

  static DecoderParams create(ParameterSet<T>& params, const ModelConfig& config);
};

/// H_fused [N, T_obs, D] -> displacements [N, T_pred, 2].
template <Real T>
Tensor<T> tcn_decode(const DecoderParams<T>& params, const Tensor<T>& fused);

/// Cumulative sum of displacements [N, P, 2] anchored at last_observed [N, 2].
template <Real T>
Tensor<T> integrate(const Tensor<T>& displacements, const Tensor<T>& last_observed);

}  // namespace sceneptp
