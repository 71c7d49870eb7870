#include "pointing/learning/environment.hpp"

#include <cmath>

#include "pointing/common/error.hpp"
#include "pointing/deixis/samplers.hpp"
#include "pointing/motion/observation.hpp"

namespace pointing::learning {

Eigen::VectorXd make_policy_input(const SkeletonModel& skeleton, const motion::JointState& state,
                                  const TargetPoint& target, double phase, bool phase_input) {
  const Eigen::VectorXd s = motion::observe(skeleton, state).flatten();
  Eigen::VectorXd out(s.size() + 4);
  out.head(s.size()) = s;
  out[s.size()] = phase_input ? phase : 0.0;
  out.tail<3>() = motion::to_root_frame(state, target);
  return out;
}

double task_reward(const SkeletonModel& skeleton, const motion::JointState& state, motion::Handedness side,
                   const TargetPoint& target) {
  const auto links = skeleton.pointing_links(side);
  const auto frames = motion::compute_frames(skeleton, state);
  try {
    return deixis::alignment_measure({frames.position[static_cast<std::size_t>(links.elbow)],
                                      frames.position[static_cast<std::size_t>(links.hand)], target})
        .reward;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate) return 0.0;
    throw;
  }
}

ReferenceTransitions reference_transitions(const SkeletonModel& skeleton, std::span<const MotionClip> clips,
                                           double control_hz) {
  if (clips.empty()) throw Error(ErrorCode::empty_input, "no reference clips");
  std::vector<Eigen::VectorXd> obs_cols;
  std::vector<double> phases;
  std::vector<Eigen::VectorXd> feats;
  for (const auto& raw : clips) {
    const MotionClip clip = std::abs(raw.fps - control_hz) < 1e-9 ? raw : dataset::resample(raw, control_hz);
    const int n = clip.frame_count();
    if (n < 2) continue;
    std::vector<Eigen::VectorXd> s;
    s.reserve(static_cast<std::size_t>(n));
    for (const auto& f : clip.frames) s.push_back(motion::observe(skeleton, f).flatten());
    for (int k = 0; k + 1 < n; ++k) {
      Eigen::VectorXd f(2 * s[0].size());
      f << s[static_cast<std::size_t>(k)], s[static_cast<std::size_t>(k + 1)];
      feats.push_back(std::move(f));
      phases.push_back(static_cast<double>(k) / (n - 1));
    }
  }
  if (feats.empty()) throw Error(ErrorCode::empty_input, "reference clips contain no transitions");
  ReferenceTransitions out;
  out.features.resize(feats[0].size(), static_cast<Eigen::Index>(feats.size()));
  out.phases.resize(static_cast<Eigen::Index>(feats.size()));
  for (std::size_t i = 0; i < feats.size(); ++i) {
    out.features.col(static_cast<Eigen::Index>(i)) = feats[i];
    out.phases[static_cast<Eigen::Index>(i)] = phases[i];
  }
  return out;
}

PointingEnv::PointingEnv(const SkeletonModel& skeleton, std::span<const MotionClip> clips, motion::SimConfig sim,
                         bool phase_input)
    : skeleton_(skeleton), sim_(sim), phase_input_(phase_input) {
  sim_.validate();
  if (clips.empty()) throw Error(ErrorCode::empty_input, "environment needs at least one demonstration clip");
  const double hz = 1.0 / sim_.control_dt;
  for (const auto& c : clips) {
    if (!c.target) throw Error(ErrorCode::invalid_argument, "demonstration '" + c.source_id + "' has no target");
    c.validate(skeleton_);
    clips_.push_back(std::abs(c.fps - hz) < 1e-9 ? c : dataset::resample(c, hz));
  }
  reset(0, *clips_[0].target);
}

void PointingEnv::reset(Rng& rng) {
  const std::size_t idx = rng.index(clips_.size());
  reset(idx, deixis::perturb_target(*clips_[idx].target, rng));
}

void PointingEnv::reset(std::size_t clip_index, const TargetPoint& target) {
  const auto& clip = clips_.at(clip_index);
  reset(clip.frames.front(), target, clip.frame_count(), clip.handedness);
}

void PointingEnv::reset(const motion::JointState& initial, const TargetPoint& target, int frames,
                        motion::Handedness side) {
  if (frames < 2) throw Error(ErrorCode::invalid_argument, "episode needs at least 2 frames");
  if (!target.allFinite()) throw Error(ErrorCode::non_finite, "target not finite");
  motion::check_state(skeleton_, initial);
  state_ = initial;
  target_ = target;
  side_ = side;
  step_ = 0;
  steps_ = frames - 1;
}

Eigen::VectorXd PointingEnv::policy_input() const {
  return make_policy_input(skeleton_, state_, target_, phase(), phase_input_);
}

Eigen::VectorXd PointingEnv::character_observation() const { return motion::observe(skeleton_, state_).flatten(); }

double PointingEnv::phase() const { return static_cast<double>(step_) / steps_; }

double PointingEnv::step(const Eigen::VectorXd& pd_targets) {
  if (done()) throw Error(ErrorCode::invalid_argument, "episode already finished");
  state_ = motion::step(skeleton_, state_, motion::Action{pd_targets}, sim_);
  ++step_;
  return task_reward(skeleton_, state_, side_, target_);
}

}  // namespace pointing::learning
