#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sceneptp/corpus.hpp"

namespace sceneptp {

/// A generated scene: annotations plus raster and semantic grid.
struct SyntheticScene {
  std::string name;
  std::vector<AnnotationRecord> records;
  SceneAssets assets;
};

/// Two crossing and two parallel pedestrians over 27 frames, which gives
/// 8 windows with the default 8 + 12 horizon.
SyntheticScene crossing_scene();

/// Small randomized scene of walkers with gently curving paths. The raster
/// and semantic grids vary in size and resolution between scene names.
SyntheticScene toy_scene(const std::string& name, std::uint64_t seed);

/// Builds windows for every scene in memory.
Corpus make_corpus(const std::vector<SyntheticScene>& scenes, const WindowConfig& windows = {});

/// Writes one scene in the on-disk corpus layout.
void write_scene(const std::filesystem::path& root, const SyntheticScene& scene);

/// Writes ETH, HOTEL, ZARA1 and ZARA2 toy scenes below root.
void write_toy_corpus(const std::filesystem::path& root, std::uint64_t seed);

}  // namespace sceneptp
