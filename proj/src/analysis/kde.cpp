#include "pointing/analysis/kde.hpp"

#include <cmath>
#include <numbers>

#include "pointing/common/error.hpp"

namespace pointing::analysis {

Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index d = samples.cols();
  if (n < 2) throw Error(ErrorCode::empty_input, "Scott bandwidth needs at least 2 samples");
  if (d < 1) throw Error(ErrorCode::invalid_argument, "Scott bandwidth needs at least one dimension");
  if (!samples.allFinite()) throw Error(ErrorCode::non_finite, "samples not finite");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::RowVectorXd var = (samples.rowwise() - mean).cwiseAbs2().colwise().sum() / static_cast<double>(n - 1);
  const double factor = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
  Eigen::VectorXd h(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(var[j] > 0.0)) throw Error(ErrorCode::degenerate, "zero variance in dimension " + std::to_string(j));
    h[j] = factor * std::sqrt(var[j]);
  }
  return h;
}

namespace {

Eigen::MatrixXd as_rows(std::span<const TargetPoint> samples) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = samples[i].transpose();
  return m;
}

}  // namespace

Eigen::Vector3d scott_bandwidth(std::span<const TargetPoint> samples) { return scott_bandwidth(as_rows(samples)); }

double scott_bandwidth_pooled(std::span<const TargetPoint> samples) {
  const auto n = samples.size();
  if (n < 2) throw Error(ErrorCode::empty_input, "Scott bandwidth needs at least 2 samples");
  const Eigen::MatrixXd m = as_rows(samples);
  const Eigen::RowVectorXd mean = m.colwise().mean();
  const double pooled_var = (m.rowwise() - mean).cwiseAbs2().sum() / static_cast<double>(n - 1) / 3.0;
  if (!(pooled_var > 0.0)) throw Error(ErrorCode::degenerate, "all samples coincide");
  return std::pow(static_cast<double>(n), -0.2) * std::sqrt(pooled_var);
}

void KDEModel::validate() const {
  if (samples.empty()) throw Error(ErrorCode::empty_input, "KDE has no samples");
  if (!(bandwidth.array() > 0.0).all() || !bandwidth.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "KDE bandwidths must be positive");
  }
}

KDEModel fit_kde(std::span<const TargetPoint> samples) {
  KDEModel m{std::vector<TargetPoint>(samples.begin(), samples.end()), scott_bandwidth(samples)};
  m.validate();
  return m;
}

double kde_evaluate(const KDEModel& model, const TargetPoint& query) {
  const Eigen::Array3d inv_h = model.bandwidth.array().inverse();
  const double norm = inv_h.prod() / (std::pow(2.0 * std::numbers::pi, 1.5) * static_cast<double>(model.samples.size()));
  double sum = 0.0;
  for (const auto& s : model.samples) sum += std::exp(-0.5 * ((query - s).array() * inv_h).square().sum());
  return norm * sum;
}

std::vector<double> kde_evaluate(const KDEModel& model, std::span<const TargetPoint> queries) {
  model.validate();
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(kde_evaluate(model, q));
  return out;
}

}  // namespace pointing::analysis
