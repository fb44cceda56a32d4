#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sceneptp/tensor.hpp"

namespace sceneptp {

/// One annotated position: frame, pedestrian, world meters.
struct AnnotationRecord {
  std::int64_t frame_id = 0;
  std::int64_t ped_id = 0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const AnnotationRecord&) const = default;
};

/// Reads "frame ped x y" lines. Lines starting with '#' and blank lines are
/// skipped. Result is sorted by (frame, ped).
std::vector<AnnotationRecord> parse_annotations(std::istream& in);
void write_annotations(std::ostream& out, std::span<const AnnotationRecord> records);

/// Spacing between consecutive annotation frames: the gcd of the gaps
/// between distinct frame ids (1 when there are fewer than two frames).
std::int64_t frame_step(std::span<const AnnotationRecord> records);

struct WindowConfig {
  std::size_t obs_len = 8;
  std::size_t pred_len = 12;
  std::size_t stride = 1;  // in annotation frames
};

/// N pedestrians, each present in obs_len + pred_len consecutive frames.
struct TrajectoryWindow {
  std::string scene_name;
  std::int64_t anchor_frame = 0;
  std::vector<std::int64_t> ped_ids;
  std::size_t obs_len = 0;
  std::size_t pred_len = 0;
  std::vector<double> obs;       // [N, obs_len, 2]
  std::vector<double> fut;       // [N, pred_len, 2]
  std::vector<double> obs_disp;  // [N, obs_len, 2]

  std::size_t num_peds() const { return ped_ids.size(); }

  template <Real T>
  Tensor<T> obs_tensor() const {
    return Tensor<T>::from({num_peds(), obs_len, 2}, std::vector<T>(obs.begin(), obs.end()));
  }
  template <Real T>
  Tensor<T> fut_tensor() const {
    return Tensor<T>::from({num_peds(), pred_len, 2}, std::vector<T>(fut.begin(), fut.end()));
  }
  template <Real T>
  Tensor<T> disp_tensor() const {
    return Tensor<T>::from({num_peds(), obs_len, 2}, std::vector<T>(obs_disp.begin(), obs_disp.end()));
  }
};

/// One window per anchor frame (every `stride`-th distinct frame). Only
/// pedestrians present in all obs_len + pred_len frames are included and
/// windows left with no pedestrian are dropped. Records must be sorted.
std::vector<TrajectoryWindow> build_windows(std::span<const AnnotationRecord> records, const std::string& scene_name,
                                            const WindowConfig& config = {});

/// Fills obs_disp: zero at the first step, first differences afterwards.
void to_relative(TrajectoryWindow& window);

struct LeaveOneOutSplit {
  std::string test_scene;
  std::vector<std::string> train_scenes;
};

std::vector<LeaveOneOutSplit> leave_one_out_splits(const std::vector<std::string>& scenes);

/// ETH, HOTEL, ZARA1, ZARA2. UNIV has no public frame data and is left out.
const std::vector<std::string>& default_scenes();

}  // namespace sceneptp
