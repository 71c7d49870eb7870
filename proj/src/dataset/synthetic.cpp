#include "pointing/dataset/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "pointing/common/error.hpp"

namespace pointing::dataset {

namespace {

Vec3 aim_residual(const SkeletonModel& skeleton, const motion::PointingLinks& arm, const JointState& s,
                  const deixis::TargetPoint& target) {
  const auto f = motion::compute_frames(skeleton, s);
  const Vec3 e = f.position[static_cast<std::size_t>(arm.elbow)];
  const Vec3 h = f.position[static_cast<std::size_t>(arm.hand)];
  return (h - e).normalized() - (target - h).normalized();
}

double min_jerk(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

}  // namespace

Eigen::VectorXd aim_pose(const SkeletonModel& skeleton, Handedness side, const deixis::TargetPoint& target,
                         const JointState& seed) {
  const auto arm = skeleton.pointing_links(side);
  std::vector<int> dofs;
  for (int link = arm.hand; link > 0; link = skeleton.link(link).parent) {
    for (std::size_t k = 0; k < skeleton.link(link).dofs.size(); ++k) dofs.push_back(skeleton.dof_offset(link) + static_cast<int>(k));
  }
  if (dofs.empty()) throw Error(ErrorCode::invalid_argument, "pointing arm has no DoFs");

  JointState s = seed;
  s.qdot.setZero();
  // Start from a forward-raised arm so the solve avoids the hanging singularity.
  for (int d : dofs) {
    const auto& spec = skeleton.dof(d);
    if (std::abs(spec.axis.x()) > 0.5) s.q[d] = std::clamp(1.2, spec.lower, spec.upper);
  }
  const double eps = 1e-7;
  for (int iter = 0; iter < 200; ++iter) {
    const Vec3 r = aim_residual(skeleton, arm, s, target);
    if (r.norm() < 1e-12) break;
    Eigen::MatrixXd jac(3, static_cast<int>(dofs.size()));
    for (std::size_t k = 0; k < dofs.size(); ++k) {
      JointState p = s;
      p.q[dofs[k]] += eps;
      jac.col(static_cast<int>(k)) = (aim_residual(skeleton, arm, p, target) - r) / eps;
    }
    const Eigen::MatrixXd jjt = jac * jac.transpose() + 1e-6 * Eigen::Matrix3d::Identity();
    const Eigen::VectorXd delta = jac.transpose() * jjt.ldlt().solve(r);
    for (std::size_t k = 0; k < dofs.size(); ++k) {
      const auto& spec = skeleton.dof(dofs[k]);
      s.q[dofs[k]] = std::clamp(s.q[dofs[k]] - delta[static_cast<int>(k)], spec.lower, spec.upper);
    }
  }
  return s.q;
}

MotionClip synthetic_pointing_clip(const SkeletonModel& skeleton, Handedness side, const deixis::TargetPoint& target,
                                   const GestureTiming& timing, double fps, const Vec3& root_position,
                                   const std::string& id) {
  const JointState rest = JointState::rest(skeleton, root_position);
  const Eigen::VectorXd aimed = aim_pose(skeleton, side, target, rest);
  MotionClip clip;
  clip.source_id = id;
  clip.fps = fps;
  clip.target = target;
  clip.handedness = side;
  const int count = static_cast<int>(std::lround(timing.total() * fps)) + 1;
  const double raise_start = timing.lead;
  const double hold_start = raise_start + timing.raise;
  const double retract_start = hold_start + timing.hold;
  for (int k = 0; k < count; ++k) {
    const double t = k / fps;
    double s = 0.0;
    if (t >= retract_start) {
      s = 1.0 - min_jerk((t - retract_start) / timing.retract);
    } else if (t >= hold_start) {
      s = 1.0;
    } else {
      s = min_jerk((t - raise_start) / timing.raise);
    }
    JointState frame = rest;
    frame.q = rest.q + s * (aimed - rest.q);
    clip.frames.push_back(std::move(frame));
  }
  fill_velocities(clip);
  return clip;
}

MotionClip concatenate(std::span<const MotionClip> clips, const std::string& id) {
  if (clips.empty()) throw Error(ErrorCode::empty_input, "nothing to concatenate");
  MotionClip out;
  out.source_id = id;
  out.fps = clips.front().fps;
  out.handedness = clips.front().handedness;
  for (const auto& c : clips) out.frames.insert(out.frames.end(), c.frames.begin(), c.frames.end());
  fill_velocities(out);
  return out;
}

ClipLibrary synthetic_library(const SkeletonModel& skeleton, std::span<const deixis::TargetPoint> targets,
                              const GestureTiming& timing, double fps, Handedness side, const std::string& prefix) {
  if (targets.empty()) throw Error(ErrorCode::empty_input, "no targets for the synthetic library");
  ClipLibrary lib{skeleton, {}};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    lib.clips.push_back(synthetic_pointing_clip(skeleton, side, targets[i], timing, fps, default_root_position(),
                                                prefix + "_" + std::to_string(i)));
  }
  return lib;
}

}  // namespace pointing::dataset
