#pragma once

#include <vector>

#include "pointing/motion/kinematics.hpp"

namespace pointing::motion {

/// Per-link pose and velocity in the root's heading frame (root position at
/// the origin, root yaw removed).
struct CharacterState {
  static constexpr int kPerLink = 13;  // position 3 + quaternion 4 + linear 3 + angular 3

  std::vector<Vec3> position;
  std::vector<Quat> orientation;  // unit, canonical sign (w >= 0)
  std::vector<Vec3> linear_velocity;
  std::vector<Vec3> angular_velocity;

  int link_count() const { return static_cast<int>(position.size()); }
  Eigen::VectorXd flatten() const;
};

CharacterState observe(const SkeletonModel& skeleton, const JointState& state);

inline int observation_size(const SkeletonModel& skeleton) { return skeleton.link_count() * CharacterState::kPerLink; }

/// A world point expressed in the same root heading frame.
Vec3 to_root_frame(const JointState& state, const Vec3& world_point);

}  // namespace pointing::motion
