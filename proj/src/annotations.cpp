#include "sceneptp/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "sceneptp/errors.hpp"
#include "sceneptp/text.hpp"

namespace sceneptp {

namespace {

// Frame and pedestrian ids may be written as integral decimals ("780.0").
std::optional<std::int64_t> parse_id(std::string_view s) {
  if (auto i = text::parse_int(s)) return *i;
  auto d = text::parse_double(s);
  if (!d || *d != std::floor(*d) || std::fabs(*d) > 9.0e15) return std::nullopt;
  return static_cast<std::int64_t>(*d);
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::istream& in) {
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split_ws(body);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 fields (frame ped x y), got " + std::to_string(fields.size()));
    const auto frame = parse_id(fields[0]);
    const auto ped = parse_id(fields[1]);
    const auto x = text::parse_double(fields[2]);
    const auto y = text::parse_double(fields[3]);
    if (!frame || !ped || !x || !y) throw ParseError(line_no, "non-numeric field in '" + std::string(body) + "'");
    if (*frame < 0) throw ParseError(line_no, "frame id must be nonnegative");
    if (*ped < 1) throw ParseError(line_no, "pedestrian id must be positive");
    records.push_back({*frame, *ped, *x, *y});
  }
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return a.frame_id != b.frame_id ? a.frame_id < b.frame_id : a.ped_id < b.ped_id;
  });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].frame_id == records[i - 1].frame_id && records[i].ped_id == records[i - 1].ped_id)
      throw IntegrityError("duplicate annotation for frame " + std::to_string(records[i].frame_id) + ", pedestrian " +
                           std::to_string(records[i].ped_id));
  return records;
}

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records) {
  for (const auto& r : records)
    out << r.frame_id << ' ' << r.ped_id << ' ' << text::format_double(r.x) << ' ' << text::format_double(r.y) << '\n';
}

std::int64_t frame_step(std::span<const AnnotationRecord> records) {
  std::int64_t step = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const std::int64_t gap = records[i].frame_id - records[i - 1].frame_id;
    if (gap > 0) step = std::gcd(step, gap);
  }
  return step > 0 ? step : 1;
}

std::vector<TrajectoryWindow> build_windows(std::span<const AnnotationRecord> records, const std::string& scene_name,
                                            const WindowConfig& config) {
  if (config.obs_len < 1 || config.pred_len < 1) throw ConfigError("obs_len and pred_len must be at least 1");
  if (config.stride < 1) throw ConfigError("window stride must be at least 1");
  const std::size_t span_len = config.obs_len + config.pred_len;
  const std::int64_t step = frame_step(records);

  std::map<std::int64_t, std::map<std::int64_t, std::pair<double, double>>> by_frame;
  for (const auto& r : records) by_frame[r.frame_id][r.ped_id] = {r.x, r.y};
  std::vector<std::int64_t> frames;
  for (const auto& [f, peds] : by_frame) frames.push_back(f);

  std::vector<TrajectoryWindow> windows;
  for (std::size_t a = 0; a < frames.size(); a += config.stride) {
    const std::int64_t anchor = frames[a];
    std::vector<const std::map<std::int64_t, std::pair<double, double>>*> span;
    for (std::size_t j = 0; j < span_len; ++j) {
      auto it = by_frame.find(anchor + static_cast<std::int64_t>(j) * step);
      if (it == by_frame.end()) break;
      span.push_back(&it->second);
    }
    if (span.size() < span_len) continue;

    TrajectoryWindow w;
    w.scene_name = scene_name;
    w.anchor_frame = anchor;
    w.obs_len = config.obs_len;
    w.pred_len = config.pred_len;
    for (const auto& [ped, pos] : *span.front()) {
      const bool everywhere =
          std::all_of(span.begin(), span.end(), [ped = ped](const auto* frame) { return frame->count(ped) != 0; });
      if (!everywhere) continue;
      w.ped_ids.push_back(ped);
      for (std::size_t j = 0; j < span_len; ++j) {
        const auto& p = span[j]->at(ped);
        auto& dst = j < config.obs_len ? w.obs : w.fut;
        dst.push_back(p.first);
        dst.push_back(p.second);
      }
    }
    if (w.ped_ids.empty()) continue;
    to_relative(w);
    windows.push_back(std::move(w));
  }
  return windows;
}

void to_relative(TrajectoryWindow& window) {
  const std::size_t n = window.num_peds(), t_obs = window.obs_len;
  if (window.obs.size() != n * t_obs * 2) throw DimensionError("to_relative: observation buffer has wrong size");
  window.obs_disp.assign(n * t_obs * 2, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 1; t < t_obs; ++t)
      for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t p = (i * t_obs + t) * 2 + c;
        window.obs_disp[p] = window.obs[p] - window.obs[p - 2];
      }
}

std::vector<LeaveOneOutSplit> leave_one_out_splits(const std::vector<std::string>& scenes) {
  if (scenes.size() < 2) throw ConfigError("leave-one-out needs at least 2 scenes, got " + std::to_string(scenes.size()));
  std::set<std::string> unique(scenes.begin(), scenes.end());
  if (unique.size() != scenes.size()) throw ConfigError("scene list contains duplicates");
  std::vector<LeaveOneOutSplit> splits;
  for (const auto& test : scenes) {
    LeaveOneOutSplit s{test, {}};
    for (const auto& other : scenes)
      if (other != test) s.train_scenes.push_back(other);
    splits.push_back(std::move(s));
  }
  return splits;
}

const std::vector<std::string>& default_scenes() {
  static const std::vector<std::string> scenes{"ETH", "HOTEL", "ZARA1", "ZARA2"};
  return scenes;
}

}  // namespace sceneptp
