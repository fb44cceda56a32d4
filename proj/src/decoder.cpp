#include "sceneptp/decoder.hpp"

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
DecoderParams<T> DecoderParams<T>::create(ParameterSet<T>& params, const ModelConfig& c) {
  DecoderParams p;
  const std::size_t d = c.d_graph, k = c.tcn_kernel;
  for (std::size_t b = 0; b < c.tcn_dilations.size(); ++b) {
    const std::string prefix = "decoder.block" + std::to_string(b);
    p.blocks.push_back({params.he_uniform(prefix + ".weight", {d, d, k}, d * k), params.zeros(prefix + ".bias", {d}),
                        params.constant(prefix + ".slope", {1}, T(0.25)), c.tcn_dilations[b]});
  }
  p.expand_weight = params.he_uniform("decoder.expand.weight", {c.pred_len, c.obs_len, k}, c.obs_len * k);
  p.expand_bias = params.zeros("decoder.expand.bias", {c.pred_len});
  p.expand_slope = params.constant("decoder.expand.slope", {1}, T(0.25));
  p.head_weight = params.he_uniform("decoder.head.weight", {d, 2}, d);
  p.head_bias = params.zeros("decoder.head.bias", {2});
  return p;
}

template <Real T>
Tensor<T> tcn_decode(const DecoderParams<T>& p, const Tensor<T>& fused) {
  if (fused.rank() != 3) throw DimensionError("tcn_decode: expected [N, T, D], got " + shape_str(fused.shape()));
  if (fused.dim(1) != p.expand_weight.dim(1))
    throw DimensionError("tcn_decode: expected " + std::to_string(p.expand_weight.dim(1)) + " observed steps, got " +
                         shape_str(fused.shape()));
  if (fused.dim(2) != p.head_weight.dim(0))
    throw DimensionError("tcn_decode: feature width " + std::to_string(fused.dim(2)) + " does not match decoder " +
                         std::to_string(p.head_weight.dim(0)));
  Tensor<T> h = permute(fused, {0, 2, 1});  // [N, D, T_obs]
  for (const auto& block : p.blocks)
    h = add(h, prelu(conv1d(h, block.weight, block.bias, block.dilation, Padding::kCausal), block.slope));
  h = permute(h, {0, 2, 1});  // [N, T_obs, D]: time as channels
  const std::size_t k = p.expand_weight.dim(2);
  const Padding pad = k % 2 ? Padding::kSymmetric : Padding::kCausal;
  h = prelu(conv1d(h, p.expand_weight, p.expand_bias, 1, pad), p.expand_slope);  // [N, T_pred, D]
  return linear(h, p.head_weight, p.head_bias);
}

template <Real T>
Tensor<T> integrate(const Tensor<T>& displacements, const Tensor<T>& last_observed) {
  if (displacements.rank() != 3 || displacements.dim(2) != 2)
    throw DimensionError("integrate: displacements must be [N, P, 2], got " + shape_str(displacements.shape()));
  if (last_observed.rank() != 2 || last_observed.dim(0) != displacements.dim(0) || last_observed.dim(1) != 2)
    throw DimensionError("integrate: anchor " + shape_str(last_observed.shape()) + " does not match " +
                         shape_str(displacements.shape()));
  const Tensor<T> steps_first = permute(cumsum(displacements, 1), {1, 0, 2});  // [P, N, 2]
  return permute(add(steps_first, last_observed), {1, 0, 2});
}

#define INSTANTIATE(T)                                                    \
  template struct DecoderParams<T>;                                       \
  template Tensor<T> tcn_decode(const DecoderParams<T>&, const Tensor<T>&); \
  template Tensor<T> integrate(const Tensor<T>&, const Tensor<T>&);
INSTANTIATE(float)
INSTANTIATE(double)
#undef INSTANTIATE

}  // namespace sceneptp
