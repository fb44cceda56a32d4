#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sceneptp/annotations.hpp"
#include "sceneptp/model_config.hpp"
#include "sceneptp/training.hpp"

namespace sceneptp {

inline constexpr const char* kSeedEnv = "SCENE_PTP_SEED";

/// Everything a CLI run depends on. Sources are applied in order: defaults,
/// config file, SCENE_PTP_SEED, command-line flags.
struct RunConfig {
  std::filesystem::path scene_root = "data";
  std::vector<std::string> scenes = default_scenes();
  std::size_t obs_len = 8;
  std::size_t pred_len = 12;
  bool use_semantic = true;
  std::size_t sparsity_k = 4;
  std::size_t d_graph = 64;
  std::size_t d_scene = 64;
  std::size_t d_k = 64;
  std::size_t d_v = 64;
  double lr = 0.01;
  std::size_t epochs = 64;
  double grad_clip = 1.0;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";

  /// Sets one field from its key=value spelling; ConfigError on unknown keys
  /// or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  ModelConfig model_config() const;
  TrainConfig train_config() const;
  WindowConfig window_config() const;

  std::string to_text() const;
};

/// Reads key=value lines into cfg. '#' starts a comment line.
void apply_config_text(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);
/// Applies SCENE_PTP_SEED when it is set.
void apply_seed_env(RunConfig& cfg);

/// The keys accepted by RunConfig::set, in declaration order.
const std::vector<std::string>& run_config_keys();

}  // namespace sceneptp
