#include "sceneptp/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
Tensor<T> embed_displacements(const Tensor<T>& obs_disp, const Tensor<T>& weight, const Tensor<T>& bias,
                              const Tensor<T>& slope) {
  if (obs_disp.rank() != 3 || obs_disp.dim(2) != 2)
    throw DimensionError("embed_displacements: expected [N, T, 2], got " + shape_str(obs_disp.shape()));
  return prelu(linear(obs_disp, weight, bias), slope);
}

template <Real T>
GraphScores<T> attention_scores(const Tensor<T>& features, const Tensor<T>& w_query, const Tensor<T>& w_key,
                                GraphMode mode) {
  if (features.rank() != 3) throw DimensionError("attention_scores: expected [N, T, D], got " + shape_str(features.shape()));
  if (features.dim(0) == 0) throw ContractError("attention_scores: no pedestrians");
  const Tensor<T> x = mode == GraphMode::kSpatial ? permute(features, {1, 0, 2}) : features;
  const Tensor<T> q = matmul(x, w_query);
  const Tensor<T> k = matmul(x, w_key);
  const T inv_sqrt_d = T(1) / std::sqrt(static_cast<T>(q.dim(-1)));
  GraphScores<T> out{scale(matmul(q, transpose(k)), inv_sqrt_d), {}};
  const std::size_t batch = out.scores.dim(0), len = out.scores.dim(1);
  out.allowed.shape = out.scores.shape();
  out.allowed.keep.assign(batch * len * len, 1);
  if (mode == GraphMode::kTemporal)
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t t = 0; t < len; ++t)
        for (std::size_t s = t + 1; s < len; ++s) out.allowed.keep[(b * len + t) * len + s] = 0;
  return out;
}

template <Real T>
SparseAdjacency<T> sparsify(const GraphScores<T>& scores, std::size_t k) {
  if (k < 1) throw ContractError("sparsify: k must be at least 1");
  const Tensor<T>& s = scores.scores;
  if (s.rank() != 3 || s.dim(1) != s.dim(2))
    throw DimensionError("sparsify: expected square score rows [B, L, L], got " + shape_str(s.shape()));
  const std::size_t batch = s.dim(0), len = s.dim(1);
  const auto values = s.data();
  Mask support{s.shape(), std::vector<std::uint8_t>(s.numel(), 0)};
  std::vector<std::size_t> candidates;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t r = 0; r < len; ++r) {
      const std::size_t base = (b * len + r) * len;
      candidates.clear();
      for (std::size_t c = 0; c < len; ++c)
        if (scores.allowed.keep[base + c]) candidates.push_back(c);
      const std::size_t keep_n = std::min(k, candidates.size());
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep_n), candidates.end(),
                        [&](std::size_t a, std::size_t c) {
                          const T va = values[base + a], vc = values[base + c];
                          return va > vc || (va == vc && a < c);
                        });
      for (std::size_t i = 0; i < keep_n; ++i) support.keep[base + candidates[i]] = 1;
      support.keep[base + r] = 1;
    }
  return {masked_softmax(s, support), std::move(support)};
}

template <Real T>
Tensor<T> graph_conv(const Tensor<T>& features, const SparseAdjacency<T>& adjacency, const Tensor<T>& weight,
                     const Tensor<T>& slope) {
  return prelu(matmul(sparse_aggregate(adjacency.weights, adjacency.support, features), weight), slope);
}

template <Real T>
InteractionParams<T> InteractionParams<T>::create(ParameterSet<T>& params, const ModelConfig& config) {
  const std::size_t d = config.d_graph;
  InteractionParams p;
  p.sparsity_k = config.sparsity_k;
  p.embed_weight = params.he_uniform("interaction.embed.weight", {2, d}, 2);
  p.embed_bias = params.zeros("interaction.embed.bias", {d});
  p.embed_slope = params.constant("interaction.embed.slope", {1}, T(0.25));
  p.spatial_query = params.he_uniform("interaction.spatial.query", {d, d}, d);
  p.spatial_key = params.he_uniform("interaction.spatial.key", {d, d}, d);
  for (std::size_t l = 0; l < config.graph_layers; ++l) {
    const std::string prefix = "interaction.spatial.conv" + std::to_string(l);
    p.spatial_layers.push_back({params.he_uniform(prefix + ".weight", {d, d}, d),
                                params.constant(prefix + ".slope", {1}, T(0.25))});
  }
  p.temporal_query = params.he_uniform("interaction.temporal.query", {d, d}, d);
  p.temporal_key = params.he_uniform("interaction.temporal.key", {d, d}, d);
  for (std::size_t l = 0; l < config.graph_layers; ++l) {
    const std::string prefix = "interaction.temporal.conv" + std::to_string(l);
    p.temporal_layers.push_back({params.he_uniform(prefix + ".weight", {d, d}, d),
                                 params.constant(prefix + ".slope", {1}, T(0.25))});
  }
  p.fuse_weight = params.he_uniform("interaction.fuse.weight", {2 * d, d}, 2 * d);
  p.fuse_bias = params.zeros("interaction.fuse.bias", {d});
  return p;
}

template <Real T>
GraphFeatures<T> interaction_forward(const InteractionParams<T>& p, const Tensor<T>& obs_disp) {
  const Tensor<T> embedded = embed_displacements(obs_disp, p.embed_weight, p.embed_bias, p.embed_slope);

  GraphFeatures<T> out;
  out.graphs.spatial =
      sparsify(attention_scores(embedded, p.spatial_query, p.spatial_key, GraphMode::kSpatial), p.sparsity_k);
  Tensor<T> spatial = permute(embedded, {1, 0, 2});  // [T, N, D]
  // Layers are stacked residually; without the identity path a near-uniform
  // adjacency averages every pedestrian into the same feature vector.
  for (const auto& layer : p.spatial_layers)
    spatial = add(spatial, graph_conv(spatial, out.graphs.spatial, layer.weight, layer.slope));
  spatial = permute(spatial, {1, 0, 2});  // [N, T, D]

  out.graphs.temporal =
      sparsify(attention_scores(spatial, p.temporal_query, p.temporal_key, GraphMode::kTemporal), p.sparsity_k);
  Tensor<T> temporal = spatial;
  for (const auto& layer : p.temporal_layers)
    temporal = add(temporal, graph_conv(temporal, out.graphs.temporal, layer.weight, layer.slope));

  out.values = linear(concat<T>({spatial, temporal}, -1), p.fuse_weight, p.fuse_bias);
  return out;
}

#define INSTANTIATE(T)                                                                                         \
  template Tensor<T> embed_displacements(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template GraphScores<T> attention_scores(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, GraphMode);    \
  template SparseAdjacency<T> sparsify(const GraphScores<T>&, std::size_t);                                    \
  template Tensor<T> graph_conv(const Tensor<T>&, const SparseAdjacency<T>&, const Tensor<T>&, const Tensor<T>&); \
  template struct InteractionParams<T>;                                                                         \
  template GraphFeatures<T> interaction_forward(const InteractionParams<T>&, const Tensor<T>&);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
