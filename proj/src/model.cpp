#include "sceneptp/model.hpp"

#include "sceneptp/errors.hpp"

namespace sceneptp {

template <Real T>
TrajectoryModel<T>::TrajectoryModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config), params_(seed) {
  config_.validate();
  interaction_ = InteractionParams<T>::create(params_, config_);
  scene_ = SceneEncoderParams<T>::create(params_, config_);
  fusion_ = FusionParams<T>::create(params_, config_);
  decoder_ = DecoderParams<T>::create(params_, config_);
}

template <Real T>
Tensor<T> TrajectoryModel<T>::encode_scene(const SceneAssets& assets) const {
  return sceneptp::encode_scene(scene_, assets);
}

template <Real T>
ForwardPass<T> TrajectoryModel<T>::forward(const Tensor<T>& obs_disp, const Tensor<T>& last_obs,
                                           const Tensor<T>& scene_tokens) const {
  if (obs_disp.rank() != 3 || obs_disp.dim(1) != config_.obs_len)
    throw DimensionError("model expects displacements [N, " + std::to_string(config_.obs_len) + ", 2], got " +
                         shape_str(obs_disp.shape()));
  ForwardPass<T> out;
  out.graph = interaction_forward(interaction_, obs_disp);
  out.attention = cross_attention(out.graph.values, scene_tokens, fusion_);
  out.fused = residual_fuse(out.attention.values, out.graph.values);
  out.displacements = tcn_decode(decoder_, out.fused);
  out.positions = integrate(out.displacements, last_obs);
  return out;
}

template <Real T>
ForwardPass<T> TrajectoryModel<T>::forward(const TrajectoryWindow& window, const Tensor<T>& scene_tokens) const {
  if (window.pred_len != config_.pred_len)
    throw ConfigError("window predicts " + std::to_string(window.pred_len) + " steps, model " +
                      std::to_string(config_.pred_len));
  return forward(window.disp_tensor<T>(), last_observed<T>(window), scene_tokens);
}

template <Real T>
Tensor<T> TrajectoryModel<T>::predict(const TrajectoryWindow& window, const Tensor<T>& scene_tokens) const {
  return forward(window, scene_tokens).positions;
}

template <Real T>
Tensor<T> last_observed(const TrajectoryWindow& window) {
  const std::size_t n = window.num_peds(), t = window.obs_len;
  std::vector<T> v(n * 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 2; ++c) v[i * 2 + c] = static_cast<T>(window.obs[(i * t + t - 1) * 2 + c]);
  return Tensor<T>::from({n, 2}, std::move(v));
}

template class TrajectoryModel<float>;
template class TrajectoryModel<double>;
template Tensor<float> last_observed<float>(const TrajectoryWindow&);
template Tensor<double> last_observed<double>(const TrajectoryWindow&);

}  // namespace sceneptp
