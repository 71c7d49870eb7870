#include "pointing/learning/models.hpp"

#include <cmath>
#include <limits>

#include "pointing/common/error.hpp"

namespace pointing::learning {

MotionClip rollout_policy(const SkeletonModel& skeleton, const TrainedPolicy& model, const TargetPoint& target,
                          double duration, const std::string& id) {
  if (skeleton.id() != model.skeleton_id) {
    throw Error(ErrorCode::invalid_argument, "policy was trained on skeleton '" + model.skeleton_id + "'");
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) throw Error(ErrorCode::invalid_argument, "duration must be positive");
  if (!target.allFinite()) throw Error(ErrorCode::non_finite, "target not finite");
  const double hz = 1.0 / model.sim.control_dt;
  const int frames = static_cast<int>(std::lround(duration * hz));
  if (frames < 2) throw Error(ErrorCode::invalid_argument, "duration shorter than two control frames");

  MotionClip placeholder;
  placeholder.source_id = id;
  placeholder.fps = hz;
  placeholder.frames = {model.initial_state, model.initial_state};
  placeholder.target = target;
  placeholder.handedness = model.side;
  PointingEnv env(skeleton, std::span<const MotionClip>(&placeholder, 1), model.sim, model.phase_input);
  env.reset(model.initial_state, target, frames, model.side);

  MotionClip clip;
  clip.source_id = id;
  clip.fps = hz;
  clip.target = target;
  clip.handedness = model.side;
  clip.frames.reserve(static_cast<std::size_t>(frames));
  clip.frames.push_back(env.state());
  while (!env.done()) {
    const Eigen::VectorXd action = model.policy.deterministic_action(env.policy_input());
    env.step(model.policy.to_pd_targets(action));
    clip.frames.push_back(env.state());
  }
  return clip;
}

PolicyModel::PolicyModel(SkeletonModel skeleton, TrainedPolicy model, std::string name)
    : skeleton_(std::move(skeleton)), model_(std::move(model)), name_(std::move(name)) {}

MotionClip PolicyModel::generate(const TargetPoint& target, double duration) const {
  return rollout_policy(skeleton_, model_, target, duration, name_);
}

ClusterPolicyModel::ClusterPolicyModel(SkeletonModel skeleton, ClusterPolicySet set, std::string name)
    : skeleton_(std::move(skeleton)), set_(std::move(set)), name_(std::move(name)) {
  if (set_.entries.empty()) throw Error(ErrorCode::empty_input, "empty cluster policy set");
}

MotionClip ClusterPolicyModel::generate(const TargetPoint& target, double duration) const {
  return rollout_policy(skeleton_, select_policy(set_, target).model, target, duration, name_);
}

std::size_t nearest_clip_index(const dataset::ClipLibrary& library, const TargetPoint& query) {
  std::size_t best = library.clips.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < library.clips.size(); ++i) {
    const auto& t = library.clips[i].target;
    if (!t) continue;
    const double d = (*t - query).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best == library.clips.size()) throw Error(ErrorCode::empty_input, "library has no annotated clips");
  return best;
}

MotionClip gtnn_generate(const dataset::ClipLibrary& library, const TargetPoint& query) {
  return library.clips[nearest_clip_index(library, query)];
}

GtnnModel::GtnnModel(dataset::ClipLibrary library, std::string name)
    : library_(std::move(library)), name_(std::move(name)) {
  nearest_clip_index(library_, TargetPoint::Zero());
}

MotionClip GtnnModel::generate(const TargetPoint& target, double) const { return gtnn_generate(library_, target); }

MotionClip generate_motion(const PointingModel& model, const TargetPoint& target, double duration) {
  return model.generate(target, duration);
}

}  // namespace pointing::learning
