#pragma once

#include "pointing/motion/kinematics.hpp"

namespace pointing::motion {

/// PD set-points, one per DoF (rad).
struct Action {
  Eigen::VectorXd pd_targets;
};

struct SimConfig {
  double control_dt = 1.0 / 30.0;  // s
  int substeps = 4;
  Vec3 gravity = Vec3(0.0, -9.81, 0.0);
  double joint_damping = 0.0;  // N·m·s/rad applied to every DoF
  std::uint64_t seed = 0;      // seeds episode sampling in environments built on this config

  void validate() const;
};

/// Generalized forces for a given motion (recursive Newton-Euler over point
/// masses with isotropic rotational inertia), including armature.
Eigen::VectorXd inverse_dynamics(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& qddot,
                                 const Vec3& gravity);

/// Joint-space inertia matrix, assembled column by column from inverse dynamics.
Eigen::MatrixXd mass_matrix(const SkeletonModel& skeleton, const JointState& state);

Eigen::VectorXd forward_dynamics(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& tau,
                                 const Vec3& gravity);

/// Clamp set-points into joint limits.
Eigen::VectorXd clamp_to_limits(const SkeletonModel& skeleton, const Eigen::VectorXd& targets);

/// tau = clamp(kp (target - q) - kd qdot, +-torque_limit) per DoF.
Eigen::VectorXd pd_torque(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& targets);

/// Advance one control interval with semi-implicit Euler substeps. Targets are
/// clamped into joint limits first. Throws Error(simulation_divergence).
JointState step(const SkeletonModel& skeleton, const JointState& state, const Action& action, const SimConfig& config);

/// Translational plus rotational kinetic energy of all links (J).
double kinetic_energy(const SkeletonModel& skeleton, const JointState& state);

/// Gravitational potential energy relative to y = 0 (J).
double potential_energy(const SkeletonModel& skeleton, const JointState& state, const Vec3& gravity);

double phase_of(double t, double episode_length);

}  // namespace pointing::motion
