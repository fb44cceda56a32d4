#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sceneptp/annotations.hpp"
#include "sceneptp/scene_assets.hpp"

namespace sceneptp {

using SceneMap = std::map<std::string, SceneAssets>;

/// Windows and scene assets for a set of named scenes.
struct Corpus {
  std::vector<std::string> scene_names;
  SceneMap assets;
  std::map<std::string, std::vector<AnnotationRecord>> records;
  std::map<std::string, std::vector<TrajectoryWindow>> windows;

  const std::vector<TrajectoryWindow>& windows_of(const std::string& scene) const;
  // Windows of every listed scene, in list order.
  std::vector<TrajectoryWindow> gather(const std::vector<std::string>& scenes) const;
};

/// Directory layout of one scene below the corpus root.
struct SceneFiles {
  std::filesystem::path annotations;  // <root>/<scene>/annotations.txt
  std::filesystem::path frame;        // <root>/<scene>/frame.fgrid
  std::filesystem::path semantic;     // <root>/<scene>/semantic.sgrid
};

SceneFiles scene_files(const std::filesystem::path& root, const std::string& scene);

/// Loads one scene. The semantic grid is read when present and required
/// when need_semantic is set.
void load_scene(Corpus& corpus, const std::filesystem::path& root, const std::string& scene,
                const WindowConfig& windows, bool need_semantic);

Corpus load_corpus(const std::filesystem::path& root, const std::vector<std::string>& scenes,
                   const WindowConfig& windows, bool need_semantic);

}  // namespace sceneptp
