#pragma once

#include <span>
#include <vector>

#include "pointing/analysis/kde.hpp"

namespace pointing::analysis {

struct MeanShiftConfig {
  double tolerance = 1e-6;  // m, step size that counts as converged
  int max_iterations = 500;
};

struct ClusterModel {
  std::vector<TargetPoint> modes;  // ordered by kernel density at the mode, highest first
  std::vector<int> assignment;     // per input point, index into modes
  double bandwidth = 0.0;
  std::vector<int> unconverged;    // input points that hit the iteration cap

  int cluster_count() const { return static_cast<int>(modes.size()); }
};

/// Gaussian-kernel mean shift seeded at every point. Converged positions
/// within bandwidth/2 of an existing mode join it, visiting candidates in
/// order of decreasing density.
ClusterModel mean_shift_cluster(std::span<const TargetPoint> points, double bandwidth,
                                const MeanShiftConfig& config = {});

}  // namespace pointing::analysis
