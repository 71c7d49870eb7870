#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "pointing/dataset/clip.hpp"
#include "pointing/learning/discriminator.hpp"
#include "pointing/learning/environment.hpp"
#include "pointing/learning/ppo.hpp"

namespace pointing::learning {

struct NetworkConfig {
  std::vector<int> policy_hidden{256, 256};
  std::vector<int> value_hidden{256, 256};
  std::vector<int> discriminator_hidden{128, 128};
  double log_std = -1.6;
};

struct TrainConfig {
  deixis::RewardWeights weights;
  PpoConfig ppo;
  NetworkConfig networks;
  DiscriminatorVariant variant = DiscriminatorVariant::plain;
  double discriminator_learning_rate = 1e-4;
  double gradient_penalty = 10.0;
  int discriminator_minibatch = 256;
  bool phase_input = true;
  int episodes_per_iteration = 8;
  int iterations = 300;
  motion::SimConfig sim;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CurvePoint {
  int iteration = 0;
  double mean_task_reward = 0.0;
  double mean_imitation_reward = 0.0;
  double disc_real_loss = 0.0;
  double disc_fake_loss = 0.0;
  double disc_fake_score = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
};

/// Everything needed to roll a trained controller out again.
struct TrainedPolicy {
  std::string skeleton_id;
  PolicyNetwork policy;
  ValueNetwork value;
  Discriminator discriminator;
  bool phase_input = true;
  motion::SimConfig sim;
  motion::JointState initial_state;
  motion::Handedness side = motion::Handedness::right;
  std::vector<CurvePoint> curve;
};

/// Networks as they are before the first iteration (deterministic in seed).
TrainedPolicy initialize_policy(const SkeletonModel& skeleton, std::span<const MotionClip> clips,
                                const TrainConfig& config);

using ProgressCallback = std::function<void(const CurvePoint&)>;

/// Collect -> discriminator update -> PPO update, for config.iterations
/// rounds. The discriminator is left untouched when the imitation weight is
/// zero. Single-environment and deterministic in config.seed.
TrainedPolicy train_policy(const SkeletonModel& skeleton, std::span<const MotionClip> clips, const TrainConfig& config,
                           const ProgressCallback& progress = {});

/// iteration,mean_rG,mean_rI,disc_real_loss,disc_fake_loss,disc_fake_score,policy_loss,value_loss,mean_ratio,clip_fraction
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);

struct ClusterPolicy {
  int cluster_id = 0;
  std::vector<deixis::TargetPoint> members;
  TrainedPolicy model;
};

struct ClusterPolicySet {
  std::vector<ClusterPolicy> entries;  // ascending cluster id
};

/// Trains one policy per cluster on that cluster's clips. labels[i] is the
/// cluster of library clip i, in [0, cluster_count). Throws
/// Error(empty_input) naming any cluster without members.
ClusterPolicySet train_cluster_policies(const dataset::ClipLibrary& library, const std::vector<int>& labels,
                                        int cluster_count, const TrainConfig& config,
                                        const ProgressCallback& progress = {});

/// Policy of the cluster owning the training target nearest to test_target;
/// ties go to the lower cluster id.
const ClusterPolicy& select_policy(const ClusterPolicySet& set, const deixis::TargetPoint& test_target);

}  // namespace pointing::learning
