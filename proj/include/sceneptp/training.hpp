#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sceneptp/corpus.hpp"
#include "sceneptp/model.hpp"

namespace sceneptp {

struct TrainConfig {
  double lr = 0.01;
  std::size_t epochs = 64;
  double grad_clip = 1.0;       // <= 0 disables clipping
  std::size_t max_steps = 0;    // 0 means no limit
  bool shuffle = true;
  // Learning rate decays geometrically from lr to lr * final_lr_scale over
  // the planned steps (max_steps, or epochs * windows). 1 keeps it constant.
  double final_lr_scale = 1.0;
};

struct TrainingLog {
  std::vector<double> epoch_loss;  // mean pre-update loss of the windows seen in each epoch
  std::size_t steps = 0;
};

/// Plain SGD, one window per step. The shuffle draws from the model's
/// parameter generator, so a run is reproducible from the model seed.
template <Real T>
TrainingLog train(TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows, const SceneMap& scenes,
                  const TrainConfig& config);

/// Forward-only mean training objective over windows.
template <Real T>
double mean_loss(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                 const SceneMap& scenes);

/// Scene tokens for every scene referenced by windows, without gradients.
template <Real T>
std::map<std::string, Tensor<T>> scene_tokens(const TrajectoryModel<T>& model,
                                              const std::vector<TrajectoryWindow>& windows, const SceneMap& scenes);

/// Predicted positions for each window; windows are processed in parallel.
template <Real T>
std::vector<Tensor<T>> predict_windows(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                                       const SceneMap& scenes);

struct MetricsReport {
  std::string scene;
  double ade = 0.0;
  double fde = 0.0;
  std::size_t n_windows = 0;
  std::size_t n_peds = 0;  // pedestrian trajectories pooled into the means
};

/// ADE/FDE pooled over every predicted pedestrian of every window.
template <Real T>
MetricsReport evaluate(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                       const SceneMap& scenes, const std::string& label);

struct ExperimentReport {
  std::string configuration;
  std::vector<MetricsReport> scenes;
  MetricsReport average;  // unweighted mean over scenes; n_windows is the total

  static ExperimentReport from_scenes(std::string configuration, std::vector<MetricsReport> scenes);
  void write_csv(std::ostream& out) const;
};

/// Trains on all but one scene and evaluates on the held-out scene, once
/// per scene. Each split starts from a fresh model built with model_seed.
template <Real T>
ExperimentReport run_leave_one_out(const ModelConfig& model_config, const TrainConfig& train_config,
                                   const Corpus& corpus, std::uint64_t model_seed, const std::string& configuration);

struct AblationReport {
  ExperimentReport with_maps;
  ExperimentReport without_maps;
  void write_csv(std::ostream& out) const;
};

/// Leave-one-out with and without the semantic branch, same seed.
template <Real T>
AblationReport run_ablation(const ModelConfig& model_config, const TrainConfig& train_config, const Corpus& corpus,
                            std::uint64_t model_seed);

}  // namespace sceneptp
