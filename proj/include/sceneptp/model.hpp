#pragma once

#include <cstdint>

#include "sceneptp/annotations.hpp"
#include "sceneptp/decoder.hpp"
#include "sceneptp/fusion.hpp"
#include "sceneptp/interaction.hpp"
#include "sceneptp/model_config.hpp"
#include "sceneptp/scene_assets.hpp"
#include "sceneptp/scene_encoder.hpp"

namespace sceneptp {

/// Intermediate values of one forward pass.
template <Real T>
struct ForwardPass {
  GraphFeatures<T> graph;
  AttentionOutput<T> attention;
  Tensor<T> fused;          // [N, T_obs, D_g]
  Tensor<T> displacements;  // [N, T_pred, 2]
  Tensor<T> positions;      // [N, T_pred, 2], world meters
};

/// Interaction graph -> cross-attention over scene tokens -> TCN decoder.
template <Real T>
class TrajectoryModel {
 public:
  TrajectoryModel(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ParameterSet<T>& parameters() { return params_; }
  const ParameterSet<T>& parameters() const { return params_; }

  const InteractionParams<T>& interaction() const { return interaction_; }
  const SceneEncoderParams<T>& scene_encoder() const { return scene_; }
  const FusionParams<T>& fusion() const { return fusion_; }
  const DecoderParams<T>& decoder() const { return decoder_; }

  /// Scene tokens [S, D_s] for one scene.
  Tensor<T> encode_scene(const SceneAssets& assets) const;

  /// obs_disp [N, T_obs, 2], last_observed [N, 2], tokens [S, D_s].
  ForwardPass<T> forward(const Tensor<T>& obs_disp, const Tensor<T>& last_observed,
                         const Tensor<T>& scene_tokens) const;
  ForwardPass<T> forward(const TrajectoryWindow& window, const Tensor<T>& scene_tokens) const;

  /// Predicted absolute positions [N, T_pred, 2].
  Tensor<T> predict(const TrajectoryWindow& window, const Tensor<T>& scene_tokens) const;

 private:
  ModelConfig config_;
  ParameterSet<T> params_;
  InteractionParams<T> interaction_;
  SceneEncoderParams<T> scene_;
  FusionParams<T> fusion_;
  DecoderParams<T> decoder_;
};

extern template class TrajectoryModel<float>;
extern template class TrajectoryModel<double>;

/// [N, 2] last observed positions of a window.
template <Real T>
Tensor<T> last_observed(const TrajectoryWindow& window);

}  // namespace sceneptp
