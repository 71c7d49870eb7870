#include "pointing/analysis/observer.hpp"

#include <algorithm>
#include <numbers>

#include "pointing/common/error.hpp"
#include "pointing/dataset/segmentation.hpp"

namespace pointing::analysis {

std::vector<int> observer_frames(const dataset::MotionClip& clip, const motion::SkeletonModel& skeleton,
                                 const dataset::HoldRule& rule) {
  const auto hand = dataset::hand_trajectory(clip, skeleton);
  const auto held = dataset::hold_mask(dataset::trajectory_speeds(hand, clip.fps), clip.fps, rule);
  const auto disp = dataset::sagittal_displacement(clip, skeleton, clip.handedness);
  double peak = 0.0;
  for (std::size_t i = 0; i < held.size(); ++i)
    if (held[i]) peak = std::max(peak, disp[i]);
  std::vector<int> frames;
  for (std::size_t i = 0; i < held.size(); ++i) {
    if (held[i] && (peak <= 0.0 || disp[i] >= 0.5 * peak)) frames.push_back(static_cast<int>(i));
  }
  return frames;
}

ObserverChoice simulated_observer(const dataset::MotionClip& clip, const motion::SkeletonModel& skeleton,
                                  const std::array<deixis::TargetPoint, 3>& candidates,
                                  const dataset::HoldRule& rule) {
  for (const auto& c : candidates)
    if (!c.allFinite()) throw Error(ErrorCode::non_finite, "candidate not finite");
  const auto frames = observer_frames(clip, skeleton, rule);
  if (frames.empty()) throw Error(ErrorCode::no_hold_detected, "clip '" + clip.source_id + "' never holds still");
  const auto hand = dataset::hand_trajectory(clip, skeleton);
  const auto elbow = dataset::elbow_trajectory(clip, skeleton);
  ObserverChoice out;
  out.frames_used = static_cast<int>(frames.size());
  for (std::size_t c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (int f : frames) {
      const auto i = static_cast<std::size_t>(f);
      double angle = std::numbers::pi;
      try {
        angle = deixis::alignment_measure({elbow[i], hand[i], candidates[c]}).angle;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate) throw;
      }
      sum += angle;
    }
    out.mean_angle[c] = sum / static_cast<double>(frames.size());
  }
  out.chosen = 0;
  for (int c = 1; c < 3; ++c)
    if (out.mean_angle[static_cast<std::size_t>(c)] < out.mean_angle[static_cast<std::size_t>(out.chosen)]) out.chosen = c;
  return out;
}

}  // namespace pointing::analysis
