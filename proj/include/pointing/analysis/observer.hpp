#pragma once

#include <array>

#include "pointing/dataset/accuracy.hpp"

namespace pointing::analysis {

struct ObserverChoice {
  int chosen = -1;
  std::array<double, 3> mean_angle{};  // rad, per candidate
  int frames_used = 0;
};

/// Machine referee for the referential game. Over the held frames whose
/// sagittal hand displacement is at least half the largest held displacement
/// (all held frames if that is zero), picks the candidate
/// with the smallest mean angle between the elbow->hand ray and the
/// hand->candidate ray; ties go to the lower index. Throws
/// Error(no_hold_detected) when no frame is held.
ObserverChoice simulated_observer(const dataset::MotionClip& clip, const motion::SkeletonModel& skeleton,
                                  const std::array<deixis::TargetPoint, 3>& candidates,
                                  const dataset::HoldRule& rule = {});

/// Frames the observer looks at.
std::vector<int> observer_frames(const dataset::MotionClip& clip, const motion::SkeletonModel& skeleton,
                                 const dataset::HoldRule& rule = {});

}  // namespace pointing::analysis
