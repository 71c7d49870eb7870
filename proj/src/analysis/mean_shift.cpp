#include "pointing/analysis/mean_shift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pointing/common/error.hpp"

namespace pointing::analysis {

namespace {

double kernel_sum(std::span<const TargetPoint> points, const TargetPoint& x, double inv_two_h2) {
  double s = 0.0;
  for (const auto& p : points) s += std::exp(-(p - x).squaredNorm() * inv_two_h2);
  return s;
}

}  // namespace

ClusterModel mean_shift_cluster(std::span<const TargetPoint> points, double bandwidth, const MeanShiftConfig& config) {
  if (points.empty()) throw Error(ErrorCode::empty_input, "mean shift needs at least one point");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw Error(ErrorCode::invalid_argument, "bandwidth must be positive");
  const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);

  ClusterModel model;
  model.bandwidth = bandwidth;
  std::vector<TargetPoint> converged(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    TargetPoint x = points[i];
    bool done = false;
    for (int it = 0; it < config.max_iterations; ++it) {
      TargetPoint num = TargetPoint::Zero();
      double den = 0.0;
      for (const auto& p : points) {
        const double w = std::exp(-(p - x).squaredNorm() * inv_two_h2);
        num += w * p;
        den += w;
      }
      // Far from every point the kernel underflows; the seed is its own mode.
      if (den <= 0.0) {
        done = true;
        break;
      }
      const TargetPoint next = num / den;
      const double step = (next - x).norm();
      x = next;
      if (step < config.tolerance) {
        done = true;
        break;
      }
    }
    if (!done) model.unconverged.push_back(static_cast<int>(i));
    converged[i] = x;
  }

  std::vector<double> density(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) density[i] = kernel_sum(points, converged[i], inv_two_h2);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });

  model.assignment.assign(points.size(), -1);
  const double merge = 0.5 * bandwidth;
  for (std::size_t i : order) {
    int found = -1;
    for (std::size_t m = 0; m < model.modes.size(); ++m) {
      if ((model.modes[m] - converged[i]).norm() <= merge) {
        found = static_cast<int>(m);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(model.modes.size());
      model.modes.push_back(converged[i]);
    }
    model.assignment[i] = found;
  }
  return model;
}

}  // namespace pointing::analysis
