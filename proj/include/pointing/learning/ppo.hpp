#pragma once

#include <vector>

#include "pointing/deixis/pointing.hpp"
#include "pointing/learning/networks.hpp"

namespace pointing::learning {

/// Rollout columns, one entry per control step. done marks the last step of
/// an episode. Advantage and return columns are filled by compute_advantages.
struct TransitionBuffer {
  std::vector<Eigen::VectorXd> states;    // raw policy inputs
  std::vector<Eigen::VectorXd> actions;   // normalized action units
  std::vector<Eigen::VectorXd> features;  // discriminator features (s_t | s_t+1)
  std::vector<double> log_probs;
  std::vector<double> task_rewards;
  std::vector<double> imitation_rewards;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<double> phases;
  std::vector<deixis::TargetPoint> targets;
  std::vector<bool> dones;
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return states.size(); }
  /// Throws Error(dimension_mismatch) for ragged columns and
  /// Error(non_finite) for bad rewards.
  void validate() const;
};

struct PpoConfig {
  double clip_epsilon = 0.2;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double policy_learning_rate = 2e-4;
  double value_learning_rate = 1e-3;
  int epochs = 5;
  int minibatch_size = 256;
  double max_grad_norm = 1.0;

  void validate() const;
};

/// rewards = w_I r_I + w_G r_G for every transition.
void assign_rewards(TransitionBuffer& buffer, const deixis::RewardWeights& weights);

/// GAE(lambda) advantages with zero bootstrap after done; returns are
/// advantage + value before the advantages are standardized.
void compute_advantages(TransitionBuffer& buffer, double discount, double lambda);

/// min(r A, clip(r, 1-eps, 1+eps) A).
double clipped_surrogate(double ratio, double advantage, double epsilon);
/// d clipped_surrogate / d ratio, zero where the clipped branch is active.
double clipped_surrogate_ratio_gradient(double ratio, double advantage, double epsilon);

struct PpoMetrics {
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
};

/// Clipped-surrogate policy steps and value regression steps over shuffled
/// minibatches. Throws Error(non_finite) for non-finite advantages.
PpoMetrics ppo_update(PolicyNetwork& policy, ValueNetwork& value, const TransitionBuffer& buffer, Adam& policy_opt,
                      Adam& value_opt, const PpoConfig& config, Rng& rng);

}  // namespace pointing::learning
