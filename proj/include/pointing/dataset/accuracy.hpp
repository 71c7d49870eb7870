#pragma once

#include <vector>

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

/// A frame is "held" when the hand speed stays below the threshold over the
/// whole window centred on it (frames within +-window/2 seconds).
struct HoldRule {
  double speed_threshold = 0.5;  // m/s
  double window = 0.15;          // s
};

std::vector<bool> hold_mask(const std::vector<double>& hand_speed, double fps, const HoldRule& rule = {});

/// Pointing reward (raw, unnormalized) of every frame of a clip toward its target.
std::vector<double> frame_rewards(const MotionClip& clip, const SkeletonModel& skeleton);
std::vector<double> frame_rewards(const MotionClip& clip, const SkeletonModel& skeleton,
                                  const deixis::TargetPoint& target);

struct ClipAccuracy {
  bool hold_detected = false;
  double raw = 0.0;         // max held-frame reward, in [0, (e-1)/e]
  double normalized = 0.0;  // raw / ((e-1)/e)
  int best_frame = -1;
};

/// Maximum pointing reward over held frames. A clip that never holds is
/// reported with hold_detected = false and accuracy 0.
ClipAccuracy clip_accuracy(const MotionClip& clip, const SkeletonModel& skeleton, const HoldRule& rule = {});

}  // namespace pointing::dataset
