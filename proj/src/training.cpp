#include "sceneptp/training.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>

#include "sceneptp/errors.hpp"
#include "sceneptp/metrics.hpp"
#include "sceneptp/tape.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

const SceneAssets& assets_for(const SceneMap& scenes, const std::string& name) {
  auto it = scenes.find(name);
  if (it == scenes.end()) throw ConfigError("no scene assets for '" + name + "'");
  return it->second;
}

}  // namespace

template <Real T>
TrainingLog train(TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows, const SceneMap& scenes,
                  const TrainConfig& config) {
  if (windows.empty()) throw ConfigError("no training windows");
  if (!(config.lr >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(config.final_lr_scale > 0.0)) throw ConfigError("final_lr_scale must be > 0");
  for (const auto& w : windows) assets_for(scenes, w.scene_name);

  auto& params = model.parameters();
  const std::size_t n = windows.size();
  TrainingLog log;
  const std::size_t planned = config.max_steps != 0 ? config.max_steps : config.epochs * n;
  auto lr_at = [&](std::size_t step) {
    if (config.final_lr_scale == 1.0 || planned < 2) return config.lr;
    return config.lr * std::pow(config.final_lr_scale, static_cast<double>(step) / static_cast<double>(planned - 1));
  };
  std::vector<double> losses(n);
  std::vector<char> seen(n);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.max_steps != 0 && log.steps >= config.max_steps) break;
    std::vector<std::size_t> order(n);
    if (config.shuffle) {
      order = params.rng().permutation(n);
    } else {
      std::iota(order.begin(), order.end(), std::size_t{0});
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t idx : order) {
      if (config.max_steps != 0 && log.steps >= config.max_steps) break;
      const auto& w = windows[idx];
      Tensor<T> tokens = model.encode_scene(assets_for(scenes, w.scene_name));
      ForwardPass<T> fp = model.forward(w, tokens);
      Tensor<T> loss = composite_loss(fp.positions, w.fut_tensor<T>());
      backward(loss);
      if (config.grad_clip > 0.0) clip_grad_norm(params, config.grad_clip);
      sgd_step(params, lr_at(log.steps));
      losses[idx] = static_cast<double>(loss.item());
      seen[idx] = 1;
      ++log.steps;
    }
    // Summed in window order so the value does not depend on the shuffle.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) continue;
      sum += losses[i];
      ++count;
    }
    if (count > 0) log.epoch_loss.push_back(sum / static_cast<double>(count));
  }
  return log;
}

template <Real T>
std::map<std::string, Tensor<T>> scene_tokens(const TrajectoryModel<T>& model,
                                              const std::vector<TrajectoryWindow>& windows, const SceneMap& scenes) {
  NoGradGuard guard;
  std::map<std::string, Tensor<T>> tokens;
  for (const auto& w : windows) {
    if (tokens.count(w.scene_name)) continue;
    tokens.emplace(w.scene_name, model.encode_scene(assets_for(scenes, w.scene_name)));
  }
  return tokens;
}

template <Real T>
std::vector<Tensor<T>> predict_windows(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                                       const SceneMap& scenes) {
  const auto tokens = scene_tokens(model, windows, scenes);
  std::vector<Tensor<T>> out(windows.size());
  std::exception_ptr failure;
  const long n = static_cast<long>(windows.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      NoGradGuard guard;
      const auto& w = windows[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = model.predict(w, tokens.at(w.scene_name));
    } catch (...) {
#pragma omp critical(sceneptp_predict_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

template <Real T>
double mean_loss(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                 const SceneMap& scenes) {
  if (windows.empty()) throw ConfigError("no windows");
  const auto preds = predict_windows(model, windows, scenes);
  NoGradGuard guard;
  double sum = 0.0;
  for (std::size_t i = 0; i < windows.size(); ++i)
    sum += static_cast<double>(composite_loss(preds[i], windows[i].fut_tensor<T>()).item());
  return sum / static_cast<double>(windows.size());
}

template <Real T>
MetricsReport evaluate(const TrajectoryModel<T>& model, const std::vector<TrajectoryWindow>& windows,
                       const SceneMap& scenes, const std::string& label) {
  if (windows.empty()) throw ConfigError("no evaluation windows for '" + label + "'");
  const auto preds = predict_windows(model, windows, scenes);
  DisplacementSums total;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const DisplacementSums s = displacement_sums(preds[i], windows[i].fut_tensor<T>());
    total.all_steps += s.all_steps;
    total.final_step += s.final_step;
    total.peds += s.peds;
    total.steps = s.steps;
  }
  MetricsReport r;
  r.scene = label;
  r.n_windows = windows.size();
  r.n_peds = total.peds;
  r.ade = total.all_steps / static_cast<double>(total.peds * total.steps);
  r.fde = total.final_step / static_cast<double>(total.peds);
  return r;
}

ExperimentReport ExperimentReport::from_scenes(std::string configuration, std::vector<MetricsReport> scenes) {
  if (scenes.empty()) throw ContractError("experiment report needs at least one scene");
  ExperimentReport rep;
  rep.configuration = std::move(configuration);
  rep.scenes = std::move(scenes);
  rep.average.scene = "AVG";
  for (const auto& s : rep.scenes) {
    rep.average.ade += s.ade;
    rep.average.fde += s.fde;
    rep.average.n_windows += s.n_windows;
    rep.average.n_peds += s.n_peds;
  }
  rep.average.ade /= static_cast<double>(rep.scenes.size());
  rep.average.fde /= static_cast<double>(rep.scenes.size());
  return rep;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "scene,ade_m,fde_m,n_windows\n";
  auto row = [&](const MetricsReport& m) {
    out << m.scene << ',' << text::format_double(m.ade) << ',' << text::format_double(m.fde) << ',' << m.n_windows << '\n';
  };
  for (const auto& s : scenes) row(s);
  row(average);
}

void AblationReport::write_csv(std::ostream& out) const {
  out << "# configuration: " << with_maps.configuration << '\n';
  with_maps.write_csv(out);
  out << "# configuration: " << without_maps.configuration << '\n';
  without_maps.write_csv(out);
}

template <Real T>
ExperimentReport run_leave_one_out(const ModelConfig& model_config, const TrainConfig& train_config,
                                   const Corpus& corpus, std::uint64_t model_seed, const std::string& configuration) {
  model_config.validate();
  std::vector<MetricsReport> rows;
  for (const auto& split : leave_one_out_splits(corpus.scene_names)) {
    TrajectoryModel<T> model(model_config, model_seed);
    train(model, corpus.gather(split.train_scenes), corpus.assets, train_config);
    rows.push_back(evaluate(model, corpus.windows_of(split.test_scene), corpus.assets, split.test_scene));
  }
  return ExperimentReport::from_scenes(configuration, std::move(rows));
}

template <Real T>
AblationReport run_ablation(const ModelConfig& model_config, const TrainConfig& train_config, const Corpus& corpus,
                            std::uint64_t model_seed) {
  ModelConfig with = model_config;
  with.use_semantic = true;
  ModelConfig without = model_config;
  without.use_semantic = false;
  AblationReport rep;
  rep.with_maps = run_leave_one_out<T>(with, train_config, corpus, model_seed, "w/ Maps");
  rep.without_maps = run_leave_one_out<T>(without, train_config, corpus, model_seed, "w/o Maps");
  return rep;
}

#define SCENEPTP_INSTANTIATE(T)                                                                                   \
  template TrainingLog train(TrajectoryModel<T>&, const std::vector<TrajectoryWindow>&, const SceneMap&,       \
                             const TrainConfig&);                                                                \
  template double mean_loss(const TrajectoryModel<T>&, const std::vector<TrajectoryWindow>&, const SceneMap&);  \
  template std::map<std::string, Tensor<T>> scene_tokens(const TrajectoryModel<T>&,                             \
                                                         const std::vector<TrajectoryWindow>&, const SceneMap&); \
  template std::vector<Tensor<T>> predict_windows(const TrajectoryModel<T>&, const std::vector<TrajectoryWindow>&, \
                                                  const SceneMap&);                                              \
  template MetricsReport evaluate(const TrajectoryModel<T>&, const std::vector<TrajectoryWindow>&, const SceneMap&, \
                                  const std::string&);                                                           \
  template ExperimentReport run_leave_one_out<T>(const ModelConfig&, const TrainConfig&, const Corpus&,          \
                                                 std::uint64_t, const std::string&);                            \
  template AblationReport run_ablation<T>(const ModelConfig&, const TrainConfig&, const Corpus&, std::uint64_t);

SCENEPTP_INSTANTIATE(float)
SCENEPTP_INSTANTIATE(double)

#undef SCENEPTP_INSTANTIATE

}  // namespace sceneptp
