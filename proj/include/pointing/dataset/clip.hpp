#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pointing/deixis/pointing.hpp"
#include "pointing/motion/kinematics.hpp"

namespace pointing::dataset {

using motion::Handedness;
using motion::JointState;
using motion::SkeletonModel;
using motion::Vec3;

/// One demonstration: uniformly sampled joint states plus the annotated referent.
struct MotionClip {
  std::string source_id;
  double fps = 30.0;
  std::vector<JointState> frames;
  std::optional<deixis::TargetPoint> target;  // absent for raw takes
  Handedness handedness = Handedness::right;
  bool is_mirrored = false;
  std::string partition = "front";

  int frame_count() const { return static_cast<int>(frames.size()); }
  double duration() const { return frames.empty() ? 0.0 : (frame_count() - 1) / fps; }

  /// Throws Error(schema) naming the clip on any invariant violation.
  void validate(const SkeletonModel& skeleton) const;
};

/// Clips sharing one skeleton.
struct ClipLibrary {
  SkeletonModel skeleton;
  std::vector<MotionClip> clips;

  std::vector<deixis::TargetPoint> targets() const;
  std::size_t size() const { return clips.size(); }
};

/// Finite-difference joint velocities (central inside, one-sided at the ends).
void fill_velocities(MotionClip& clip);

std::vector<Vec3> link_trajectory(const MotionClip& clip, const SkeletonModel& skeleton, int link);
/// Pointing-arm hand and elbow world positions per frame, for the clip's handedness.
std::vector<Vec3> hand_trajectory(const MotionClip& clip, const SkeletonModel& skeleton);
std::vector<Vec3> elbow_trajectory(const MotionClip& clip, const SkeletonModel& skeleton);

/// Speed (m/s) of a sampled trajectory by finite differences.
std::vector<double> trajectory_speeds(const std::vector<Vec3>& positions, double fps);

/// Linear resampling of joint angles onto a new frame rate; velocities are re-derived.
MotionClip resample(const MotionClip& clip, double fps);

}  // namespace pointing::dataset
