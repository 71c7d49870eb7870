#include "pointing/motion/observation.hpp"

namespace pointing::motion {

Eigen::VectorXd CharacterState::flatten() const {
  Eigen::VectorXd out(link_count() * kPerLink);
  for (int i = 0; i < link_count(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    auto seg = out.segment(i * kPerLink, kPerLink);
    seg.segment<3>(0) = position[k];
    seg[3] = orientation[k].w();
    seg[4] = orientation[k].x();
    seg[5] = orientation[k].y();
    seg[6] = orientation[k].z();
    seg.segment<3>(7) = linear_velocity[k];
    seg.segment<3>(10) = angular_velocity[k];
  }
  return out;
}

CharacterState observe(const SkeletonModel& skeleton, const JointState& state) {
  const auto poses = forward_kinematics(skeleton, state);
  const auto vel = link_velocities(skeleton, state);
  const Quat heading_inv = heading_rotation(state.root_orientation).conjugate();
  const Mat3 to_local = heading_inv.toRotationMatrix();
  const Vec3 root = poses[0].position;

  CharacterState cs;
  const auto n = poses.size();
  cs.position.resize(n);
  cs.orientation.resize(n);
  cs.linear_velocity.resize(n);
  cs.angular_velocity.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cs.position[i] = i == 0 ? Vec3::Zero() : Vec3(to_local * (poses[i].position - root));
    Quat q = (heading_inv * poses[i].orientation).normalized();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    cs.orientation[i] = q;
    cs.linear_velocity[i] = to_local * (vel[i].linear - vel[0].linear);
    cs.angular_velocity[i] = to_local * vel[i].angular;
  }
  return cs;
}

Vec3 to_root_frame(const JointState& state, const Vec3& world_point) {
  return heading_rotation(state.root_orientation).conjugate() * (world_point - state.root_position);
}

}  // namespace pointing::motion
