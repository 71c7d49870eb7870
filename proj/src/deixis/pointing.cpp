#include "pointing/deixis/pointing.hpp"

#include <algorithm>

#include "pointing/common/error.hpp"

namespace pointing::deixis {

double pointing_reward_from_angle(double angle) {
  const double theta_hat = 1.0 - angle / M_PI;
  return (std::exp(theta_hat) - 1.0) / std::exp(1.0);
}

PointingMeasure alignment_measure(const PointingFrame& frame) {
  const Eigen::Vector3d elbow_to_hand = frame.hand - frame.elbow;
  const Eigen::Vector3d hand_to_target = frame.target - frame.hand;
  if (!elbow_to_hand.allFinite() || !hand_to_target.allFinite()) {
    throw Error(ErrorCode::non_finite, "pointing frame contains non-finite coordinates");
  }
  const double a = elbow_to_hand.norm();
  const double b = hand_to_target.norm();
  if (a == 0.0 || b == 0.0) throw Error(ErrorCode::degenerate, "zero-length elbow-hand or hand-target vector");

  PointingMeasure m;
  const double cosine = std::clamp(elbow_to_hand.dot(hand_to_target) / (a * b), -1.0, 1.0);
  m.angle = std::acos(cosine);
  m.theta_hat = 1.0 - m.angle / M_PI;
  m.reward = (std::exp(m.theta_hat) - 1.0) / std::exp(1.0);
  return m;
}

void RewardWeights::validate() const {
  if (!(imitation >= 0.0) || !(task >= 0.0)) throw Error(ErrorCode::invalid_argument, "reward weights must be >= 0");
}

double combined_reward(double imitation_reward, double task_reward, const RewardWeights& weights) {
  return weights.imitation * imitation_reward + weights.task * task_reward;
}

}  // namespace pointing::deixis
