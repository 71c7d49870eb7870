#include "pointing/dataset/accuracy.hpp"

#include <cmath>

#include "pointing/common/error.hpp"

namespace pointing::dataset {

std::vector<bool> hold_mask(const std::vector<double>& hand_speed, double fps, const HoldRule& rule) {
  const auto n = static_cast<long>(hand_speed.size());
  // Frames whose timestamp lies within half a window of the centre frame.
  const long half = static_cast<long>(std::floor(0.5 * rule.window * fps + 1e-9));
  std::vector<bool> mask(hand_speed.size(), false);
  for (long i = 0; i < n; ++i) {
    bool ok = true;
    for (long j = std::max(0L, i - half); j <= std::min(n - 1, i + half) && ok; ++j) {
      ok = hand_speed[static_cast<std::size_t>(j)] < rule.speed_threshold;
    }
    mask[static_cast<std::size_t>(i)] = ok;
  }
  return mask;
}

std::vector<double> frame_rewards(const MotionClip& clip, const SkeletonModel& skeleton,
                                  const deixis::TargetPoint& target) {
  const auto hands = hand_trajectory(clip, skeleton);
  const auto elbows = elbow_trajectory(clip, skeleton);
  std::vector<double> out(hands.size());
  for (std::size_t i = 0; i < hands.size(); ++i) {
    out[i] = deixis::alignment_measure({elbows[i], hands[i], target}).reward;
  }
  return out;
}

std::vector<double> frame_rewards(const MotionClip& clip, const SkeletonModel& skeleton) {
  if (!clip.target) throw Error(ErrorCode::invalid_argument, "clip '" + clip.source_id + "' has no target");
  return frame_rewards(clip, skeleton, *clip.target);
}

ClipAccuracy clip_accuracy(const MotionClip& clip, const SkeletonModel& skeleton, const HoldRule& rule) {
  const auto rewards = frame_rewards(clip, skeleton);
  const auto mask = hold_mask(trajectory_speeds(hand_trajectory(clip, skeleton), clip.fps), clip.fps, rule);
  ClipAccuracy acc;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (!mask[i]) continue;
    if (!acc.hold_detected || rewards[i] > acc.raw) {
      acc.raw = rewards[i];
      acc.best_frame = static_cast<int>(i);
    }
    acc.hold_detected = true;
  }
  acc.normalized = acc.raw / deixis::kMaxPointingReward;
  return acc;
}

}  // namespace pointing::dataset
