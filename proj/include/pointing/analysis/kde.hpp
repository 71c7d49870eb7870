#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "pointing/deixis/pointing.hpp"

namespace pointing::analysis {

using deixis::TargetPoint;

/// Scott's rule h_d = n^(-1/(d+4)) * sigma_d with sample standard deviations;
/// samples are rows, d is the column count. Throws Error(degenerate) for a
/// zero-variance dimension and Error(empty_input) for n < 2.
Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& samples);
Eigen::Vector3d scott_bandwidth(std::span<const TargetPoint> samples);

/// Single isotropic bandwidth for 3-D points: the univariate rule
/// n^(-1/5) applied to the pooled standard deviation sqrt(mean_d sigma_d^2).
double scott_bandwidth_pooled(std::span<const TargetPoint> samples);

/// Product-Gaussian kernel density over 3-D sample points.
struct KDEModel {
  std::vector<TargetPoint> samples;
  Eigen::Vector3d bandwidth = Eigen::Vector3d::Ones();  // m

  void validate() const;
};

KDEModel fit_kde(std::span<const TargetPoint> samples);

std::vector<double> kde_evaluate(const KDEModel& model, std::span<const TargetPoint> queries);
double kde_evaluate(const KDEModel& model, const TargetPoint& query);

}  // namespace pointing::analysis
