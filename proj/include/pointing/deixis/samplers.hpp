#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pointing/common/error.hpp"
#include "pointing/common/random.hpp"
#include "pointing/deixis/pointing.hpp"

namespace pointing::deixis {

inline constexpr double kPerturbHalfWidth = 0.10;  // m, 20 cm cube
inline constexpr double kDistractorMin = 0.20;     // m
inline constexpr double kDistractorMax = 0.40;     // m
inline constexpr int kDistractorMaxAttempts = 10000;

/// Uniform draw from the axis-aligned cube of half-width 0.10 m around gt.
template <UniformSource Source>
TargetPoint perturb_target(const TargetPoint& gt, Source& source) {
  if (!gt.allFinite()) throw Error(ErrorCode::non_finite, "target not finite");
  TargetPoint out;
  for (int d = 0; d < 3; ++d) out[d] = gt[d] + (2.0 * source.uniform() - 1.0) * kPerturbHalfWidth;
  return out;
}

/// Cylindrical coordinates of a point about the vertical (+y) axis through an anchor.
/// Arc is measured from +z toward +x.
struct CylinderCoords {
  double height;
  double arc;
  double radius;
};

CylinderCoords to_cylinder(const TargetPoint& p, const Eigen::Vector3d& anchor);
TargetPoint from_cylinder(const CylinderCoords& c, const Eigen::Vector3d& anchor);

struct HalfCylinderRange {
  double height_min = 0.0, height_max = 0.0;  // m
  double arc_min = 0.0, arc_max = 0.0;        // rad
  double radius_min = 0.0, radius_max = 0.0;  // m
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();

  void validate() const;
  bool contains(const TargetPoint& p, double tol = 1e-9) const;
};

/// Per-parameter min/max of the targets. Throws Error(degenerate) when all coincide.
HalfCylinderRange fit_half_cylinder(std::span<const TargetPoint> targets, const Eigen::Vector3d& anchor);

template <UniformSource Source>
TargetPoint sample_in_range(const HalfCylinderRange& range, Source& source) {
  CylinderCoords c;
  c.height = range.height_min + (range.height_max - range.height_min) * source.uniform();
  c.arc = range.arc_min + (range.arc_max - range.arc_min) * source.uniform();
  c.radius = range.radius_min + (range.radius_max - range.radius_min) * source.uniform();
  return from_cylinder(c, range.anchor);
}

/// n independent uniform draws of (height, arc, radius), deterministic in seed.
std::vector<TargetPoint> sample_test_targets(const HalfCylinderRange& range, int n, std::uint64_t seed);

/// Rejection-samples two candidates from the range at 0.20-0.40 m from target.
/// Throws Error(exhausted) after kDistractorMaxAttempts candidates.
template <UniformSource Source>
std::array<TargetPoint, 2> sample_distractors(const TargetPoint& target, const HalfCylinderRange& range, Source& source,
                                              int max_attempts = kDistractorMaxAttempts) {
  range.validate();
  std::array<TargetPoint, 2> out;
  int accepted = 0;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const TargetPoint candidate = sample_in_range(range, source);
    const double dist = (candidate - target).norm();
    if (dist >= kDistractorMin && dist <= kDistractorMax) {
      out[static_cast<std::size_t>(accepted++)] = candidate;
      if (accepted == 2) return out;
    }
  }
  throw Error(ErrorCode::exhausted, "no distractor pair within 0.20-0.40 m after " + std::to_string(max_attempts) +
                                        " attempts (" + std::to_string(accepted) + " accepted)");
}

struct Box {
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;

  bool contains(const TargetPoint& p, double tol = 1e-12) const {
    return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
  }
};

Box bounding_box(std::span<const TargetPoint> targets);

/// Deterministic radius-major lattice of k x k x k points on concentric shells
/// of the ellipsoid inscribed in the box (k^3 = n). Throws
/// Error(invalid_argument) naming the nearest feasible n otherwise.
std::vector<TargetPoint> spherical_grid(const Box& limits, int n = 1000);

struct LabeledTarget {
  int id;
  TargetPoint position;
  std::string role;  // e.g. "target", "distractor", "grid"
};

/// Delimited export: id,x,y,z,role.
void write_targets_csv(std::ostream& out, std::span<const LabeledTarget> rows);
std::vector<LabeledTarget> read_targets_csv(std::istream& in);

}  // namespace pointing::deixis
