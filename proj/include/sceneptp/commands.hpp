#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sceneptp/run_config.hpp"

namespace sceneptp {

/// Loads every configured scene and prints one line per scene (counts or
/// the error). Returns the number of scenes that failed.
std::size_t cmd_validate(const RunConfig& cfg, std::ostream& out);

struct TrainOutputs {
  std::filesystem::path checkpoint;
  std::filesystem::path loss_curve;
};

/// Trains on every configured scene; writes the checkpoint (default
/// <output_dir>/model.ckpt) and <output_dir>/loss_curve.csv.
TrainOutputs cmd_train(const RunConfig& cfg, const std::optional<std::filesystem::path>& checkpoint,
                       std::ostream& out);

/// With a checkpoint, evaluates it on every configured scene. Without one,
/// runs the full leave-one-out protocol. Writes <output_dir>/report.csv and
/// echoes it to out.
std::filesystem::path cmd_eval(const RunConfig& cfg, const std::optional<std::filesystem::path>& checkpoint,
                               std::ostream& out);

/// Leave-one-out with and without semantic maps; writes
/// <output_dir>/ablation.csv and echoes it.
std::filesystem::path cmd_ablate(const RunConfig& cfg, std::ostream& out);

struct PredictOutputs {
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Predicts the window of scene anchored at frame. Writes
/// <output_dir>/predict_<scene>_<frame>.csv and .svg.
PredictOutputs cmd_predict(const RunConfig& cfg, const std::filesystem::path& checkpoint, const std::string& scene,
                           std::int64_t frame, std::ostream& out);

}  // namespace sceneptp
