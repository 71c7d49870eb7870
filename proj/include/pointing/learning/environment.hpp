#pragma once

#include <span>
#include <vector>

#include "pointing/common/random.hpp"
#include "pointing/dataset/clip.hpp"
#include "pointing/motion/dynamics.hpp"

namespace pointing::learning {

using dataset::MotionClip;
using deixis::TargetPoint;
using motion::SkeletonModel;

/// Builds the policy input [CharacterState | phase | target in root frame].
Eigen::VectorXd make_policy_input(const SkeletonModel& skeleton, const motion::JointState& state,
                                  const TargetPoint& target, double phase, bool phase_input);

/// Task reward of a state: pointing reward of the given arm toward target.
double task_reward(const SkeletonModel& skeleton, const motion::JointState& state, motion::Handedness side,
                   const TargetPoint& target);

/// Consecutive-state features (s_t | s_t+1) of every demonstration clip at the
/// control rate, with the phase of s_t.
struct ReferenceTransitions {
  Eigen::MatrixXd features;
  Eigen::VectorXd phases;
};

ReferenceTransitions reference_transitions(const SkeletonModel& skeleton, std::span<const MotionClip> clips,
                                           double control_hz);

/// Single simulated pointing episode. An episode lasts as long as the drawn
/// demonstration, starts from its first frame and aims at a perturbed copy of
/// its target. Episodes end at the time limit; divergence propagates as an
/// Error(simulation_divergence).
class PointingEnv {
 public:
  PointingEnv(const SkeletonModel& skeleton, std::span<const MotionClip> clips, motion::SimConfig sim,
              bool phase_input);

  /// Random demonstration and perturbed target.
  void reset(Rng& rng);
  void reset(std::size_t clip_index, const TargetPoint& target);
  /// Arbitrary start state and episode length (frames including the first).
  void reset(const motion::JointState& initial, const TargetPoint& target, int frames, motion::Handedness side);

  Eigen::VectorXd policy_input() const;
  /// CharacterState of the current state, flattened.
  Eigen::VectorXd character_observation() const;
  double phase() const;

  /// Applies PD set-points for one control interval; returns the task reward
  /// of the resulting state.
  double step(const Eigen::VectorXd& pd_targets);
  bool done() const { return step_ >= steps_; }

  const SkeletonModel& skeleton() const { return skeleton_; }
  const motion::SimConfig& sim() const { return sim_; }
  const motion::JointState& state() const { return state_; }
  const TargetPoint& target() const { return target_; }
  int step_index() const { return step_; }
  int episode_steps() const { return steps_; }
  bool phase_input() const { return phase_input_; }
  const std::vector<MotionClip>& clips() const { return clips_; }

 private:
  SkeletonModel skeleton_;
  std::vector<MotionClip> clips_;
  motion::SimConfig sim_;
  bool phase_input_;
  motion::JointState state_;
  TargetPoint target_ = TargetPoint::Zero();
  motion::Handedness side_ = motion::Handedness::right;
  int step_ = 0;
  int steps_ = 0;
};

}  // namespace pointing::learning
