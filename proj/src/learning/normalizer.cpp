#include "pointing/learning/normalizer.hpp"

#include "pointing/common/error.hpp"

namespace pointing::learning {

namespace {
constexpr double kVarianceFloor = 1e-4;
}

RunningNormalizer::RunningNormalizer(Eigen::Index size, double clip)
    : mean_(Eigen::VectorXd::Zero(size)), var_(Eigen::VectorXd::Ones(size)), clip_(clip) {}

void RunningNormalizer::update(const Eigen::MatrixXd& batch) {
  if (batch.rows() != size()) throw Error(ErrorCode::dimension_mismatch, "normalizer feature count");
  if (batch.cols() == 0) return;
  const double n = static_cast<double>(batch.cols());
  const Eigen::VectorXd bmean = batch.rowwise().mean();
  const Eigen::VectorXd bvar = (batch.colwise() - bmean).cwiseAbs2().rowwise().mean();
  if (count_ == 0.0) {
    mean_ = bmean;
    var_ = bvar;
    count_ = n;
    return;
  }
  // Chan et al. parallel merge of two moment summaries.
  const double total = count_ + n;
  const Eigen::VectorXd delta = bmean - mean_;
  mean_ += delta * (n / total);
  var_ = (var_ * count_ + bvar * n + delta.cwiseAbs2() * (count_ * n / total)) / total;
  count_ = total;
}

Eigen::MatrixXd RunningNormalizer::normalize(const Eigen::MatrixXd& batch) const {
  if (batch.rows() != size()) throw Error(ErrorCode::dimension_mismatch, "normalizer feature count");
  const Eigen::VectorXd inv_std = var_.cwiseMax(kVarianceFloor).cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd out = (batch.colwise() - mean_).array().colwise() * inv_std.array();
  return out.cwiseMax(-clip_).cwiseMin(clip_);
}

void RunningNormalizer::set_state(Eigen::VectorXd mean, Eigen::VectorXd variance, double count) {
  if (mean.size() != variance.size()) throw Error(ErrorCode::dimension_mismatch, "normalizer state sizes");
  mean_ = std::move(mean);
  var_ = std::move(variance);
  count_ = count;
}

}  // namespace pointing::learning
