#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace pointing::deixis {

using TargetPoint = Eigen::Vector3d;

/// Largest attainable pointing reward, (e - 1) / e, reached at zero angle.
inline const double kMaxPointingReward = (std::exp(1.0) - 1.0) / std::exp(1.0);

/// Elbow E, hand H and target T in world coordinates (m).
struct PointingFrame {
  Eigen::Vector3d elbow;
  Eigen::Vector3d hand;
  TargetPoint target;
};

struct PointingMeasure {
  double angle = 0.0;      // rad in [0, pi], between hand->target and elbow->hand
  double theta_hat = 1.0;  // 1 - angle / pi
  double reward = 0.0;     // (exp(theta_hat) - 1) / e
};

/// Throws Error(degenerate) when either ray has zero length.
PointingMeasure alignment_measure(const PointingFrame& frame);

/// Reward for a given angle, without any geometry.
double pointing_reward_from_angle(double angle);

struct RewardWeights {
  double imitation = 0.5;
  double task = 0.5;

  void validate() const;
};

/// r = w_I * r_I + w_G * r_G.
double combined_reward(double imitation_reward, double task_reward, const RewardWeights& weights = {});

}  // namespace pointing::deixis
