#include "pointing/dataset/segmentation.hpp"

#include <algorithm>
#include <numeric>

#include "pointing/common/error.hpp"
#include "pointing/motion/observation.hpp"

namespace pointing::dataset {

std::vector<double> sagittal_displacement(const MotionClip& take, const SkeletonModel& skeleton, Handedness side) {
  const int hand = skeleton.pointing_links(side).hand;
  const auto world = link_trajectory(take, skeleton, hand);
  std::vector<double> out(world.size(), 0.0);
  if (world.empty()) return out;
  const Vec3 rest = motion::to_root_frame(take.frames[0], world[0]);
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Vec3 local = motion::to_root_frame(take.frames[i], world[i]);
    out[i] = std::hypot(local.y() - rest.y(), local.z() - rest.z());
  }
  return out;
}

double peak_prominence(const std::vector<double>& signal, int peak) {
  const auto n = static_cast<int>(signal.size());
  const double height = signal[static_cast<std::size_t>(peak)];
  double left_min = height;
  for (int i = peak - 1; i >= 0 && signal[static_cast<std::size_t>(i)] <= height; --i) {
    left_min = std::min(left_min, signal[static_cast<std::size_t>(i)]);
  }
  double right_min = height;
  for (int i = peak + 1; i < n && signal[static_cast<std::size_t>(i)] <= height; ++i) {
    right_min = std::min(right_min, signal[static_cast<std::size_t>(i)]);
  }
  return height - std::max(left_min, right_min);
}

std::vector<int> find_peaks(const std::vector<double>& signal, double min_prominence, int min_distance) {
  const auto n = static_cast<int>(signal.size());
  std::vector<int> candidates;
  int i = 1;
  while (i < n - 1) {
    if (signal[static_cast<std::size_t>(i - 1)] < signal[static_cast<std::size_t>(i)]) {
      int j = i;
      while (j + 1 < n && signal[static_cast<std::size_t>(j + 1)] == signal[static_cast<std::size_t>(i)]) ++j;
      if (j + 1 < n && signal[static_cast<std::size_t>(j + 1)] < signal[static_cast<std::size_t>(i)]) {
        candidates.push_back((i + j) / 2);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  std::vector<int> prominent;
  for (int p : candidates)
    if (peak_prominence(signal, p) >= min_prominence) prominent.push_back(p);

  std::vector<int> order(prominent.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return signal[static_cast<std::size_t>(prominent[static_cast<std::size_t>(a)])] >
           signal[static_cast<std::size_t>(prominent[static_cast<std::size_t>(b)])];
  });
  std::vector<int> kept;
  for (int k : order) {
    const int p = prominent[static_cast<std::size_t>(k)];
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](int q) { return std::abs(q - p) < min_distance; });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<MotionClip> segment_pointing_clips(const MotionClip& take, const SkeletonModel& skeleton,
                                               const SegmentConfig& config, std::span<const double> timestamps) {
  if (!(take.fps > 0.0)) throw Error(ErrorCode::invalid_argument, "take fps must be positive");
  if (!timestamps.empty()) {
    if (timestamps.size() != take.frames.size()) {
      throw Error(ErrorCode::dimension_mismatch, "timestamp count differs from frame count");
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (!(timestamps[i] > timestamps[i - 1])) {
        throw Error(ErrorCode::invalid_argument, "timestamps not strictly increasing at frame " + std::to_string(i));
      }
    }
  }
  auto time_of = [&](int i) {
    return timestamps.empty() ? i / take.fps : timestamps[static_cast<std::size_t>(i)] - timestamps[0];
  };
  if (take.frames.size() < 2 || time_of(take.frame_count() - 1) <= config.min_duration) {
    throw Error(ErrorCode::invalid_argument, "take is shorter than the minimum gesture duration");
  }
  const double dt = time_of(take.frame_count() - 1) / (take.frame_count() - 1);
  const int min_distance = std::max(1, static_cast<int>(std::ceil(config.min_separation / dt - 1e-9)));

  std::vector<Handedness> sides{Handedness::right};
  if (skeleton.has_mirror_map() && skeleton.mirror_of(skeleton.pointing_links().hand) != skeleton.pointing_links().hand) {
    sides.push_back(Handedness::left);
  }

  struct Span {
    int begin, end;
    Handedness side;
  };
  std::vector<Span> spans;
  for (Handedness side : sides) {
    const auto disp = sagittal_displacement(take, skeleton, side);
    const auto [lo, hi] = std::minmax_element(disp.begin(), disp.end());
    const double range = *hi - *lo;
    const double prominence = std::max(config.min_prominence_fraction * range, 1e-12);
    for (int p : find_peaks(disp, prominence, min_distance)) {
      const double peak = disp[static_cast<std::size_t>(p)];
      if (peak < config.min_peak_displacement) continue;
      const double rest = config.rest_fraction * peak;
      int b = p;
      while (b > 0 && disp[static_cast<std::size_t>(b)] > rest) --b;
      int e = p;
      while (e < take.frame_count() - 1 && disp[static_cast<std::size_t>(e)] > rest) ++e;
      if (time_of(e) - time_of(b) < config.min_duration) continue;
      spans.push_back({b, e, side});
    }
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.begin < b.begin; });

  std::vector<MotionClip> out;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    MotionClip clip;
    clip.source_id = take.source_id + "_seg" + std::to_string(k);
    clip.fps = take.fps;
    clip.handedness = spans[k].side;
    clip.is_mirrored = take.is_mirrored;
    clip.partition = take.partition;
    clip.frames.assign(take.frames.begin() + spans[k].begin, take.frames.begin() + spans[k].end + 1);
    out.push_back(std::move(clip));
  }
  return out;
}

}  // namespace pointing::dataset
