#include "sceneptp/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "sceneptp/errors.hpp"

namespace sceneptp {

namespace {
std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}
}  // namespace

const std::vector<TrajectoryWindow>& Corpus::windows_of(const std::string& scene) const {
  auto it = windows.find(scene);
  if (it == windows.end()) throw ConfigError("scene '" + scene + "' is not loaded");
  return it->second;
}

std::vector<TrajectoryWindow> Corpus::gather(const std::vector<std::string>& scenes) const {
  std::vector<TrajectoryWindow> out;
  for (const auto& s : scenes) {
    const auto& w = windows_of(s);
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

SceneFiles scene_files(const std::filesystem::path& root, const std::string& scene) {
  const auto dir = root / scene;
  return {dir / "annotations.txt", dir / "frame.fgrid", dir / "semantic.sgrid"};
}

void load_scene(Corpus& corpus, const std::filesystem::path& root, const std::string& scene,
                const WindowConfig& window_config, bool need_semantic) {
  const SceneFiles files = scene_files(root, scene);
  if (!std::filesystem::is_directory(root / scene)) throw IoError("scene directory " + (root / scene).string() + " not found");
  if (!std::filesystem::exists(files.annotations)) throw IoError("missing " + files.annotations.string());
  if (!std::filesystem::exists(files.frame)) throw IoError("missing " + files.frame.string());

  SceneAssets assets;
  assets.name = scene;
  {
    auto in = open_input(files.frame);
    try {
      assets.frame = load_frame_raster(in);
    } catch (const FormatError& e) {
      throw FormatError(files.frame.string() + ": " + e.what());
    }
  }
  if (std::filesystem::exists(files.semantic)) {
    auto in = open_input(files.semantic);
    try {
      assets.semantic = load_semantic_grid(in);
    } catch (const FormatError& e) {
      throw FormatError(files.semantic.string() + ": " + e.what());
    }
  } else if (need_semantic) {
    throw IoError("missing " + files.semantic.string() + " (semantic maps enabled)");
  }

  std::vector<AnnotationRecord> records;
  {
    auto in = open_input(files.annotations);
    try {
      records = parse_annotations(in);
    } catch (const ParseError& e) {
      const std::string m = e.what();
      throw ParseError(e.line(), files.annotations.string() + ": " + m.substr(m.find(": ") + 2));
    }
  }
  corpus.windows[scene] = build_windows(records, scene, window_config);
  corpus.records[scene] = std::move(records);
  corpus.assets[scene] = std::move(assets);
  if (std::find(corpus.scene_names.begin(), corpus.scene_names.end(), scene) == corpus.scene_names.end())
    corpus.scene_names.push_back(scene);
}

Corpus load_corpus(const std::filesystem::path& root, const std::vector<std::string>& scenes,
                   const WindowConfig& window_config, bool need_semantic) {
  if (scenes.empty()) throw ConfigError("no scenes configured");
  Corpus corpus;
  for (const auto& s : scenes) load_scene(corpus, root, s, window_config, need_semantic);
  return corpus;
}

}  // namespace sceneptp
