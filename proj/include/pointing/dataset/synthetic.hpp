#pragma once

#include <span>
#include <string>

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

/// Default world placement of the fixed root for the built-in chains.
inline Vec3 default_root_position() { return Vec3(0.0, 1.4, 0.0); }

/// Phase durations (s) of a rest -> raise -> hold -> retract -> rest gesture.
struct GestureTiming {
  double lead = 0.3;
  double raise = 0.8;
  double hold = 1.0;
  double retract = 0.8;
  double tail = 0.3;

  double total() const { return lead + raise + hold + retract + tail; }
};

/// Joint angles that align the elbow->hand ray of one arm with the hand->target
/// ray, found by damped Gauss-Newton over the arm's DoFs starting from `seed`.
Eigen::VectorXd aim_pose(const SkeletonModel& skeleton, Handedness side, const deixis::TargetPoint& target,
                         const JointState& seed);

/// Minimum-jerk raise-hold-retract clip from the rest pose toward target.
MotionClip synthetic_pointing_clip(const SkeletonModel& skeleton, Handedness side, const deixis::TargetPoint& target,
                                   const GestureTiming& timing, double fps, const Vec3& root_position,
                                   const std::string& id);

/// Frames of all clips back to back (targets dropped); fps taken from the first.
MotionClip concatenate(std::span<const MotionClip> clips, const std::string& id);

/// One synthetic gesture per target, ids "<prefix>_<i>", root at default_root_position().
ClipLibrary synthetic_library(const SkeletonModel& skeleton, std::span<const deixis::TargetPoint> targets,
                              const GestureTiming& timing = {}, double fps = 30.0, Handedness side = Handedness::right,
                              const std::string& prefix = "demo");


}  // namespace pointing::dataset
