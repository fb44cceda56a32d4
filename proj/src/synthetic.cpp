#include "sceneptp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "sceneptp/errors.hpp"
#include "sceneptp/parameters.hpp"

namespace sceneptp {

namespace {

constexpr std::int64_t kFrameStep = 10;

struct Walker {
  std::int64_t id;
  double x, y;          // start position
  double speed;         // meters per frame step
  double heading;       // radians
  double turn;          // heading change per step
  std::int64_t first;   // first step index present
  std::int64_t last;    // last step index present (inclusive)
};

std::vector<AnnotationRecord> walk(const std::vector<Walker>& walkers, std::int64_t steps) {
  std::vector<AnnotationRecord> records;
  for (const auto& w : walkers) {
    double x = w.x, y = w.y, h = w.heading;
    for (std::int64_t s = 0; s < steps; ++s) {
      if (s >= w.first && s <= w.last) records.push_back({s * kFrameStep, w.id, x, y});
      x += w.speed * std::cos(h);
      y += w.speed * std::sin(h);
      h += w.turn;
    }
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.frame_id != b.frame_id ? a.frame_id < b.frame_id : a.ped_id < b.ped_id;
  });
  return records;
}

// Quantized to 1/1024 so the text form is short and exact.
double quantize(double v) { return std::round(v * 1024.0) / 1024.0; }

FrameRaster make_raster(std::size_t h, std::size_t w, double phase) {
  FrameRaster r{3, h, w, std::vector<double>(3 * h * w)};
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const double u = static_cast<double>(i) / static_cast<double>(h);
        const double v = static_cast<double>(j) / static_cast<double>(w);
        const double s = std::sin(2.0 * std::numbers::pi * (u * (c + 1) + v * (2 - c * 0.5)) + phase);
        r.values[(c * h + i) * w + j] = std::clamp(quantize(0.5 + 0.45 * s), 0.0, 1.0);
      }
  return r;
}

// Horizontal walkway, a vertical road, and scattered obstacles.
SemanticGrid make_semantic(std::size_t h, std::size_t w, std::size_t classes, Rng& rng) {
  SemanticGrid g{h, w, classes, std::vector<int>(h * w, 0)};
  const std::size_t band_lo = h / 3, band_hi = 2 * h / 3;
  const std::size_t road_lo = w / 2, road_hi = w / 2 + std::max<std::size_t>(1, w / 8);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      int id = 0;
      if (i >= band_lo && i < band_hi) id = 1;
      if (j >= road_lo && j < road_hi) id = 2;
      g.ids[i * w + j] = id;
    }
  const std::size_t blobs = 3 + static_cast<std::size_t>(rng.uniform() * 3.0);
  for (std::size_t b = 0; b < blobs; ++b) {
    const std::size_t ci = static_cast<std::size_t>(rng.uniform() * static_cast<double>(h));
    const std::size_t cj = static_cast<std::size_t>(rng.uniform() * static_cast<double>(w));
    const int id = 3 + static_cast<int>(rng.uniform() * static_cast<double>(classes - 3));
    for (std::size_t i = ci; i < std::min(h, ci + 3); ++i)
      for (std::size_t j = cj; j < std::min(w, cj + 3); ++j) g.ids[i * w + j] = id;
  }
  return g;
}

struct GridSizes {
  std::size_t raster, semantic;
};

GridSizes sizes_for(const std::string& name) {
  if (name == "HOTEL") return {48, 24};
  if (name == "ZARA1") return {64, 64};
  if (name == "ZARA2") return {32, 64};
  return {32, 32};
}

template <typename Grid>
void write_file(const std::filesystem::path& p, const Grid& g, void (*writer)(std::ostream&, const Grid&)) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  writer(out, g);
  if (!out) throw IoError("failed writing " + p.string());
}

}  // namespace

SyntheticScene crossing_scene() {
  const std::vector<Walker> walkers = {
      {1, -4.0, 0.25, 0.36, 0.0, 0.004, 0, 26},
      {2, 0.5, -4.5, 0.34, std::numbers::pi / 2, -0.004, 0, 26},
      {3, -5.0, 2.0, 0.30, 0.05, 0.003, 0, 26},
      {4, -5.0, 2.7, 0.30, 0.05, 0.003, 0, 26},
  };
  SyntheticScene s;
  s.name = "SYNTH";
  s.records = walk(walkers, 27);
  for (auto& r : s.records) {
    r.x = quantize(r.x);
    r.y = quantize(r.y);
  }
  Rng rng(7);
  s.assets.name = s.name;
  s.assets.frame = make_raster(32, 32, 0.3);
  s.assets.semantic = make_semantic(32, 32, 8, rng);
  return s;
}

SyntheticScene toy_scene(const std::string& name, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char c : name) h = h * 131 + static_cast<unsigned char>(c);
  Rng rng(h);
  const std::int64_t steps = 28 + static_cast<std::int64_t>(rng.uniform() * 6.0);
  const std::int64_t n = 3 + static_cast<std::int64_t>(rng.uniform() * 3.0);
  std::vector<Walker> walkers;
  for (std::int64_t i = 0; i < n; ++i) {
    Walker w;
    w.id = i + 1;
    w.x = rng.uniform(-6.0, 6.0);
    w.y = rng.uniform(-6.0, 6.0);
    w.speed = rng.uniform(0.2, 0.5);
    w.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    w.turn = rng.uniform(-0.03, 0.03);
    w.first = 0;
    w.last = steps - 1;
    walkers.push_back(w);
  }
  // One late arrival and one early departure so windows see varying N.
  walkers.back().first = 4;
  walkers.front().last = steps - 5;

  SyntheticScene s;
  s.name = name;
  s.records = walk(walkers, steps);
  for (auto& r : s.records) {
    r.x = quantize(r.x);
    r.y = quantize(r.y);
  }
  const GridSizes g = sizes_for(name);
  s.assets.name = name;
  s.assets.frame = make_raster(g.raster, g.raster, rng.uniform(0.0, 6.0));
  s.assets.semantic = make_semantic(g.semantic, g.semantic, 8, rng);
  return s;
}

Corpus make_corpus(const std::vector<SyntheticScene>& scenes, const WindowConfig& window_config) {
  Corpus c;
  for (const auto& s : scenes) {
    c.scene_names.push_back(s.name);
    c.assets[s.name] = s.assets;
    c.records[s.name] = s.records;
    c.windows[s.name] = build_windows(s.records, s.name, window_config);
  }
  return c;
}

void write_scene(const std::filesystem::path& root, const SyntheticScene& scene) {
  const SceneFiles files = scene_files(root, scene.name);
  std::filesystem::create_directories(files.annotations.parent_path());
  {
    std::ofstream out(files.annotations);
    if (!out) throw IoError("cannot open " + files.annotations.string() + " for writing");
    out << "# frame ped x y\n";
    write_annotations(out, scene.records);
  }
  write_file(files.frame, scene.assets.frame, &write_frame_raster);
  if (scene.assets.semantic) write_file(files.semantic, *scene.assets.semantic, &write_semantic_grid);
}

void write_toy_corpus(const std::filesystem::path& root, std::uint64_t seed) {
  for (const auto& name : default_scenes()) write_scene(root, toy_scene(name, seed));
}

}  // namespace sceneptp
