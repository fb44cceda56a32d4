#pragma once

#include <vector>

#include "sceneptp/model_config.hpp"
#include "sceneptp/ops.hpp"
#include "sceneptp/parameters.hpp"

// Learned sparse spatial/temporal interaction graphs over observed
// displacements, producing the graph features used as attention queries.
namespace sceneptp {

enum class GraphMode { kSpatial, kTemporal };

/// Dense scores plus the entries each row may connect to (causality for the
/// temporal graph; everything for the spatial graph).
template <Real T>
struct GraphScores {
  Tensor<T> scores;  // spatial [T, N, N], temporal [N, T, T]
  Mask allowed;
};

/// Row-stochastic sparse adjacency and its support.
template <Real T>
struct SparseAdjacency {
  Tensor<T> weights;
  Mask support;
};

template <Real T>
struct SparseGraphSet {
  SparseAdjacency<T> spatial;   // [T_obs, N, N]
  SparseAdjacency<T> temporal;  // [N, T_obs, T_obs]
};

template <Real T>
struct GraphFeatures {
  Tensor<T> values;  // [N, T_obs, D_g]
  SparseGraphSet<T> graphs;
};

/// obs_disp [N, T, 2] -> PReLU(obs_disp W + b) [N, T, D_g].
template <Real T>
Tensor<T> embed_displacements(const Tensor<T>& obs_disp, const Tensor<T>& weight, const Tensor<T>& bias,
                              const Tensor<T>& slope);

/// Scaled dot-product self-attention scores over pedestrians (per timestep)
/// or over timesteps (per pedestrian, causal). features is [N, T, D].
template <Real T>
GraphScores<T> attention_scores(const Tensor<T>& features, const Tensor<T>& w_query, const Tensor<T>& w_key,
                                GraphMode mode);

/// Keeps the top-k allowed scores of each row plus the self entry (ties go to
/// the lower index) and renormalises the survivors with a softmax. A row of
/// a [B, L, L] score tensor has its self entry on the diagonal.
template <Real T>
SparseAdjacency<T> sparsify(const GraphScores<T>& scores, std::size_t k);

/// PReLU((A x) W) for batched features x [B, L, D] and adjacency [B, L, L].
template <Real T>
Tensor<T> graph_conv(const Tensor<T>& features, const SparseAdjacency<T>& adjacency, const Tensor<T>& weight,
                     const Tensor<T>& slope);

template <Real T>
struct GraphConvLayer {
  Tensor<T> weight;
  Tensor<T> slope;
};

template <Real T>
struct InteractionParams {
  Tensor<T> embed_weight, embed_bias, embed_slope;
  Tensor<T> spatial_query, spatial_key;
  std::vector<GraphConvLayer<T>> spatial_layers;
  Tensor<T> temporal_query, temporal_key;
  std::vector<GraphConvLayer<T>> temporal_layers;
  Tensor<T> fuse_weight, fuse_bias;
  std::size_t sparsity_k = 4;

  static InteractionParams create(ParameterSet<T>& params, const ModelConfig& config);
};

/// Embedding, spatial graph convolutions, then temporal graph convolutions
/// on the spatial output; both outputs are concatenated and projected back
/// to D_g.
template <Real T>
GraphFeatures<T> interaction_forward(const InteractionParams<T>& params, const Tensor<T>& obs_disp);

}  // namespace sceneptp
