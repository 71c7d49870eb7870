#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "pointing/common/random.hpp"
#include "pointing/dataset/synthetic.hpp"
#include "pointing/motion/kinematics.hpp"

namespace pointing::test {

/// Demonstration targets of the toy-arm training fixture (right arm, in front of the character).
inline std::vector<deixis::TargetPoint> fixture_targets() {
  return {{0.45, 1.45, 0.9}, {0.05, 1.6, 0.85}, {0.7, 1.25, 0.75}};
}

inline dataset::ClipLibrary toy_library() {
  const auto targets = fixture_targets();
  return dataset::synthetic_library(motion::toy_arm(), targets);
}

inline Eigen::Vector3d random_unit(Rng& rng) {
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Joint state with every coordinate drawn uniformly inside its limits.
inline motion::JointState random_state(const motion::SkeletonModel& skel, Rng& rng, double speed = 1.0) {
  motion::JointState s = motion::JointState::rest(skel, dataset::default_root_position());
  for (int d = 0; d < skel.dof_count(); ++d) {
    s.q[d] = rng.uniform(skel.dof(d).lower, skel.dof(d).upper);
    s.qdot[d] = rng.uniform(-speed, speed);
  }
  return s;
}

/// Stationary clip of n identical frames.
inline dataset::MotionClip still_clip(const motion::SkeletonModel& skel, const motion::JointState& s, int n,
                                      double fps = 30.0) {
  dataset::MotionClip c;
  c.source_id = "still";
  c.fps = fps;
  motion::JointState f = s;
  f.qdot.setZero();
  c.frames.assign(static_cast<std::size_t>(n), f);
  (void)skel;
  return c;
}

}  // namespace pointing::test
