#include "pointing/motion/kinematics.hpp"

#include <cmath>
#include <string>

#include "pointing/common/error.hpp"

namespace pointing::motion {

JointState JointState::rest(const SkeletonModel& skeleton, const Vec3& root_position) {
  JointState s;
  s.q = Eigen::VectorXd::Zero(skeleton.dof_count());
  s.qdot = Eigen::VectorXd::Zero(skeleton.dof_count());
  s.root_position = root_position;
  return s;
}

void check_state(const SkeletonModel& skeleton, const JointState& state) {
  const auto n = skeleton.dof_count();
  if (state.q.size() != n || state.qdot.size() != n) {
    throw Error(ErrorCode::dimension_mismatch, "state has " + std::to_string(state.q.size()) + "/" +
                                                   std::to_string(state.qdot.size()) + " coordinates, skeleton '" +
                                                   skeleton.id() + "' has " + std::to_string(n));
  }
  if (!state.q.allFinite() || !state.qdot.allFinite() || !state.root_position.allFinite() ||
      !state.root_orientation.coeffs().allFinite()) {
    throw Error(ErrorCode::non_finite, "joint state contains non-finite values");
  }
}

ChainFrames compute_frames(const SkeletonModel& skeleton, const JointState& state) {
  check_state(skeleton, state);
  const auto links = static_cast<std::size_t>(skeleton.link_count());
  ChainFrames f;
  f.position.resize(links);
  f.rotation.resize(links);
  f.dof_axis.resize(static_cast<std::size_t>(skeleton.dof_count()));

  f.position[0] = state.root_position;
  f.rotation[0] = state.root_orientation.normalized().toRotationMatrix();
  for (std::size_t i = 1; i < links; ++i) {
    const auto& link = skeleton.links()[i];
    const auto parent = static_cast<std::size_t>(link.parent);
    f.position[i] = f.position[parent] + f.rotation[parent] * link.offset;
    Mat3 r = f.rotation[parent];
    int d = skeleton.dof_offset(static_cast<int>(i));
    for (const auto& dof : link.dofs) {
      f.dof_axis[static_cast<std::size_t>(d)] = r * dof.axis;
      r = r * Eigen::AngleAxisd(state.q[d], dof.axis).toRotationMatrix();
      ++d;
    }
    f.rotation[i] = r;
  }
  return f;
}

std::vector<LinkPose> forward_kinematics(const SkeletonModel& skeleton, const JointState& state) {
  const ChainFrames f = compute_frames(skeleton, state);
  std::vector<LinkPose> poses(f.position.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    poses[i].position = f.position[i];
    poses[i].orientation = Quat(f.rotation[i]).normalized();
  }
  return poses;
}

std::vector<LinkVelocity> link_velocities(const SkeletonModel& skeleton, const JointState& state) {
  const ChainFrames f = compute_frames(skeleton, state);
  std::vector<LinkVelocity> vel(f.position.size(), LinkVelocity{Vec3::Zero(), Vec3::Zero()});
  for (std::size_t i = 1; i < vel.size(); ++i) {
    const auto& link = skeleton.links()[i];
    const auto parent = static_cast<std::size_t>(link.parent);
    vel[i].linear = vel[parent].linear + vel[parent].angular.cross(f.position[i] - f.position[parent]);
    Vec3 w = vel[parent].angular;
    int d = skeleton.dof_offset(static_cast<int>(i));
    for (std::size_t k = 0; k < link.dofs.size(); ++k, ++d) w += f.dof_axis[static_cast<std::size_t>(d)] * state.qdot[d];
    vel[i].angular = w;
  }
  return vel;
}

Quat heading_rotation(const Quat& root_orientation) {
  const Vec3 forward = root_orientation.normalized() * Vec3::UnitZ();
  const double yaw = std::atan2(forward.x(), forward.z());
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitY()));
}

}  // namespace pointing::motion
