#pragma once

#include <vector>

#include "pointing/motion/skeleton.hpp"

namespace pointing::motion {

/// Generalized coordinates of the chain plus the (fixed) root placement.
struct JointState {
  Eigen::VectorXd q;     // rad
  Eigen::VectorXd qdot;  // rad/s
  Vec3 root_position = Vec3::Zero();
  Quat root_orientation = Quat::Identity();

  static JointState rest(const SkeletonModel& skeleton, const Vec3& root_position = Vec3::Zero());
};

struct LinkPose {
  Vec3 position;
  Quat orientation;
};

struct LinkVelocity {
  Vec3 linear;
  Vec3 angular;
};

/// Throws Error(dimension_mismatch | non_finite).
void check_state(const SkeletonModel& skeleton, const JointState& state);

std::vector<LinkPose> forward_kinematics(const SkeletonModel& skeleton, const JointState& state);

/// World-frame linear and angular velocity of every link origin.
std::vector<LinkVelocity> link_velocities(const SkeletonModel& skeleton, const JointState& state);

/// Full kinematic sweep used by the dynamics: per-link frames and per-DoF world axes.
struct ChainFrames {
  std::vector<Vec3> position;
  std::vector<Mat3> rotation;
  std::vector<Vec3> dof_axis;  // world frame, indexed by DoF
};

ChainFrames compute_frames(const SkeletonModel& skeleton, const JointState& state);

/// Rotation of the root about world vertical (+y) only.
Quat heading_rotation(const Quat& root_orientation);

}  // namespace pointing::motion
