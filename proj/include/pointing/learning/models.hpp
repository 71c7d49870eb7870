#pragma once

#include <memory>
#include <string>

#include "pointing/learning/trainer.hpp"

namespace pointing::learning {

/// Anything that produces a pointing motion toward a target.
class PointingModel {
 public:
  virtual ~PointingModel() = default;
  virtual std::string name() const = 0;
  /// Deterministic in (model, target, duration).
  virtual MotionClip generate(const TargetPoint& target, double duration) const = 0;
};

/// Noise-free rollout at the control rate; the clip holds
/// round(duration * control_hz) frames, the first being the initial state.
MotionClip rollout_policy(const SkeletonModel& skeleton, const TrainedPolicy& model, const TargetPoint& target,
                          double duration, const std::string& id = "rollout");

class PolicyModel final : public PointingModel {
 public:
  PolicyModel(SkeletonModel skeleton, TrainedPolicy model, std::string name = "policy");
  std::string name() const override { return name_; }
  MotionClip generate(const TargetPoint& target, double duration) const override;
  const TrainedPolicy& trained() const { return model_; }

 private:
  SkeletonModel skeleton_;
  TrainedPolicy model_;
  std::string name_;
};

class ClusterPolicyModel final : public PointingModel {
 public:
  ClusterPolicyModel(SkeletonModel skeleton, ClusterPolicySet set, std::string name = "cluster_policy");
  std::string name() const override { return name_; }
  MotionClip generate(const TargetPoint& target, double duration) const override;
  const ClusterPolicySet& set() const { return set_; }

 private:
  SkeletonModel skeleton_;
  ClusterPolicySet set_;
  std::string name_;
};

/// Index of the annotated clip whose target is nearest to query (lowest index on ties).
std::size_t nearest_clip_index(const dataset::ClipLibrary& library, const TargetPoint& query);
/// Stored clip with the nearest annotated target, unmodified.
MotionClip gtnn_generate(const dataset::ClipLibrary& library, const TargetPoint& query);

/// Nearest-neighbour retrieval baseline. Ignores the requested duration.
class GtnnModel final : public PointingModel {
 public:
  explicit GtnnModel(dataset::ClipLibrary library, std::string name = "gtnn");
  std::string name() const override { return name_; }
  MotionClip generate(const TargetPoint& target, double duration) const override;
  const dataset::ClipLibrary& library() const { return library_; }

 private:
  dataset::ClipLibrary library_;
  std::string name_;
};

MotionClip generate_motion(const PointingModel& model, const TargetPoint& target, double duration);

}  // namespace pointing::learning
