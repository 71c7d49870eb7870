#include "pointing/motion/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pointing/common/error.hpp"

namespace pointing::motion {

void SimConfig::validate() const {
  if (!(control_dt > 0.0)) throw Error(ErrorCode::invalid_argument, "control_dt must be positive");
  if (substeps < 1) throw Error(ErrorCode::invalid_argument, "substeps must be >= 1");
  if (!gravity.allFinite()) throw Error(ErrorCode::non_finite, "gravity not finite");
}

Eigen::VectorXd inverse_dynamics(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& qddot,
                                 const Vec3& gravity) {
  const ChainFrames f = compute_frames(skeleton, state);
  if (qddot.size() != skeleton.dof_count()) throw Error(ErrorCode::dimension_mismatch, "qddot size");
  const auto n = f.position.size();

  std::vector<Vec3> w(n), dw(n), acc(n);
  // The fixed root accelerates upward at -g, which folds gravity into every link force.
  w[0].setZero();
  dw[0].setZero();
  acc[0] = -gravity;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& link = skeleton.links()[i];
    const auto p = static_cast<std::size_t>(link.parent);
    const Vec3 r = f.position[i] - f.position[p];
    acc[i] = acc[p] + dw[p].cross(r) + w[p].cross(w[p].cross(r));
    Vec3 wi = w[p];
    Vec3 dwi = dw[p];
    int d = skeleton.dof_offset(static_cast<int>(i));
    for (std::size_t k = 0; k < link.dofs.size(); ++k, ++d) {
      const Vec3& axis = f.dof_axis[static_cast<std::size_t>(d)];
      dwi += wi.cross(axis) * state.qdot[d] + axis * qddot[d];
      wi += axis * state.qdot[d];
    }
    w[i] = wi;
    dw[i] = dwi;
  }

  std::vector<Vec3> force(n), moment(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& link = skeleton.links()[i];
    force[i] = link.mass * acc[i];
    moment[i] = link.inertia * dw[i];  // isotropic inertia: no gyroscopic term
  }
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(skeleton.dof_count());
  for (std::size_t i = n - 1; i >= 1; --i) {
    const auto& link = skeleton.links()[i];
    int d = skeleton.dof_offset(static_cast<int>(i));
    for (std::size_t k = 0; k < link.dofs.size(); ++k, ++d) {
      tau[d] = f.dof_axis[static_cast<std::size_t>(d)].dot(moment[i]) + link.dofs[k].armature * qddot[d];
    }
    const auto p = static_cast<std::size_t>(link.parent);
    moment[p] += moment[i] + (f.position[i] - f.position[p]).cross(force[i]);
    force[p] += force[i];
  }
  return tau;
}

Eigen::MatrixXd mass_matrix(const SkeletonModel& skeleton, const JointState& state) {
  const int n = skeleton.dof_count();
  JointState still = state;
  still.qdot.setZero();
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    unit[j] = 1.0;
    m.col(j) = inverse_dynamics(skeleton, still, unit, Vec3::Zero());
    unit[j] = 0.0;
  }
  return 0.5 * (m + m.transpose());
}

Eigen::VectorXd forward_dynamics(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& tau,
                                 const Vec3& gravity) {
  const Eigen::VectorXd bias =
      inverse_dynamics(skeleton, state, Eigen::VectorXd::Zero(skeleton.dof_count()), gravity);
  return mass_matrix(skeleton, state).ldlt().solve(tau - bias);
}

Eigen::VectorXd clamp_to_limits(const SkeletonModel& skeleton, const Eigen::VectorXd& targets) {
  if (targets.size() != skeleton.dof_count()) {
    throw Error(ErrorCode::dimension_mismatch, "action has " + std::to_string(targets.size()) + " targets, expected " +
                                                   std::to_string(skeleton.dof_count()));
  }
  Eigen::VectorXd out(targets.size());
  for (int i = 0; i < targets.size(); ++i) {
    const auto& dof = skeleton.dof(i);
    out[i] = std::clamp(targets[i], dof.lower, dof.upper);
  }
  return out;
}

Eigen::VectorXd pd_torque(const SkeletonModel& skeleton, const JointState& state, const Eigen::VectorXd& targets) {
  Eigen::VectorXd tau(skeleton.dof_count());
  for (int i = 0; i < tau.size(); ++i) {
    const auto& dof = skeleton.dof(i);
    const double raw = dof.kp * (targets[i] - state.q[i]) - dof.kd * state.qdot[i];
    tau[i] = std::clamp(raw, -dof.torque_limit, dof.torque_limit);
  }
  return tau;
}

JointState step(const SkeletonModel& skeleton, const JointState& state, const Action& action, const SimConfig& config) {
  config.validate();
  check_state(skeleton, state);
  if (!action.pd_targets.allFinite()) throw Error(ErrorCode::non_finite, "action contains non-finite targets");
  const Eigen::VectorXd targets = clamp_to_limits(skeleton, action.pd_targets);

  const double h = config.control_dt / config.substeps;
  JointState next = state;
  for (int s = 0; s < config.substeps; ++s) {
    const Eigen::VectorXd tau = pd_torque(skeleton, next, targets) - config.joint_damping * next.qdot;
    const Eigen::VectorXd qddot = forward_dynamics(skeleton, next, tau, config.gravity);
    next.qdot += h * qddot;
    next.q += h * next.qdot;
    if (!next.q.allFinite() || !next.qdot.allFinite()) {
      throw Error(ErrorCode::simulation_divergence, "state became non-finite at substep " + std::to_string(s));
    }
  }
  return next;
}

double kinetic_energy(const SkeletonModel& skeleton, const JointState& state) {
  return 0.5 * state.qdot.dot(mass_matrix(skeleton, state) * state.qdot);
}

double potential_energy(const SkeletonModel& skeleton, const JointState& state, const Vec3& gravity) {
  const auto poses = forward_kinematics(skeleton, state);
  double u = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) u -= skeleton.links()[i].mass * gravity.dot(poses[i].position);
  return u;
}

double phase_of(double t, double episode_length) {
  if (!(episode_length > 0.0)) throw Error(ErrorCode::invalid_argument, "episode length must be positive");
  if (!(t >= 0.0 && t <= episode_length)) {
    throw Error(ErrorCode::invalid_argument, "time " + std::to_string(t) + " outside episode [0, " +
                                                 std::to_string(episode_length) + "]");
  }
  return t / episode_length;
}

}  // namespace pointing::motion
