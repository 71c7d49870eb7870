#pragma once

#include <Eigen/Dense>

namespace pointing::learning {

/// Per-feature running mean and variance, merged batch by batch. Normalized
/// values are clipped to +-clip standard deviations.
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(Eigen::Index size, double clip = 5.0);

  /// Columns of batch are samples.
  void update(const Eigen::MatrixXd& batch);
  Eigen::MatrixXd normalize(const Eigen::MatrixXd& batch) const;

  Eigen::Index size() const { return mean_.size(); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& variance() const { return var_; }
  double clip() const { return clip_; }

  /// Restores a saved state; used by checkpoint loading.
  void set_state(Eigen::VectorXd mean, Eigen::VectorXd variance, double count);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
  double count_ = 0.0;
  double clip_ = 5.0;
};

}  // namespace pointing::learning
