#pragma once

#include <vector>

#include "pointing/learning/mlp.hpp"
#include "pointing/learning/normalizer.hpp"
#include "pointing/motion/skeleton.hpp"

namespace pointing::learning {

/// Policy input is [CharacterState | phase | target in root frame].
inline int policy_input_size(const motion::SkeletonModel& skeleton) {
  return skeleton.link_count() * 13 + 1 + 3;
}

/// Gaussian policy over PD set-points. The network emits the mean in
/// normalized action units a, mapped to set-points as center + half_range * a.
/// Exploration log-deviations are fixed per dimension.
struct PolicyNetwork {
  MlpShape shape;
  Eigen::VectorXd params;
  Eigen::VectorXd log_std;
  RunningNormalizer input_norm;
  Eigen::VectorXd action_center;
  Eigen::VectorXd action_half_range;

  PolicyNetwork() = default;
  PolicyNetwork(const motion::SkeletonModel& skeleton, const std::vector<int>& hidden, double log_std, Rng& rng);

  int input_size() const { return shape.input_size(); }
  int action_size() const { return shape.output_size(); }

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& raw_inputs) const { return input_norm.normalize(raw_inputs); }
  /// Mean actions for already-normalized inputs.
  Eigen::MatrixXd mean(const Eigen::MatrixXd& normalized, MlpTape* tape = nullptr) const;

  Eigen::VectorXd deterministic_action(const Eigen::VectorXd& raw_input) const;
  Eigen::VectorXd sample_action(const Eigen::VectorXd& raw_input, Rng& rng, double& log_prob) const;

  /// Column-wise diagonal Gaussian log-density of actions under means.
  Eigen::VectorXd log_prob(const Eigen::MatrixXd& means, const Eigen::MatrixXd& actions) const;

  Eigen::VectorXd to_pd_targets(const Eigen::VectorXd& action) const;
};

struct ValueNetwork {
  MlpShape shape;
  Eigen::VectorXd params;

  ValueNetwork() = default;
  ValueNetwork(int input_size, const std::vector<int>& hidden, Rng& rng);

  /// One value per column of normalized inputs.
  Eigen::VectorXd value(const Eigen::MatrixXd& normalized, MlpTape* tape = nullptr) const;
};

}  // namespace pointing::learning
