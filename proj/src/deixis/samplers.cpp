#include "pointing/deixis/samplers.hpp"

#include <algorithm>
#include <istream>
#include <limits>

#include "pointing/common/text.hpp"

namespace pointing::deixis {

CylinderCoords to_cylinder(const TargetPoint& p, const Eigen::Vector3d& anchor) {
  const Eigen::Vector3d d = p - anchor;
  return {d.y(), std::atan2(d.x(), d.z()), std::hypot(d.x(), d.z())};
}

TargetPoint from_cylinder(const CylinderCoords& c, const Eigen::Vector3d& anchor) {
  return anchor + Eigen::Vector3d(c.radius * std::sin(c.arc), c.height, c.radius * std::cos(c.arc));
}

void HalfCylinderRange::validate() const {
  if (!(height_min <= height_max) || !(arc_min <= arc_max) || !(radius_min <= radius_max) || radius_min < 0.0 ||
      !anchor.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "half-cylinder range is inverted or invalid");
  }
}

bool HalfCylinderRange::contains(const TargetPoint& p, double tol) const {
  const auto c = to_cylinder(p, anchor);
  return c.height >= height_min - tol && c.height <= height_max + tol && c.arc >= arc_min - tol &&
         c.arc <= arc_max + tol && c.radius >= radius_min - tol && c.radius <= radius_max + tol;
}

HalfCylinderRange fit_half_cylinder(std::span<const TargetPoint> targets, const Eigen::Vector3d& anchor) {
  if (targets.size() < 2) throw Error(ErrorCode::empty_input, "half-cylinder fit needs at least 2 targets");
  bool any_apart = false;
  for (const auto& t : targets) {
    if (!t.allFinite()) throw Error(ErrorCode::non_finite, "target not finite");
    if ((t - targets[0]).norm() > 0.0) any_apart = true;
  }
  if (!any_apart) throw Error(ErrorCode::degenerate, "all targets coincide; half-cylinder range has zero extent");

  HalfCylinderRange r;
  r.anchor = anchor;
  const auto first = to_cylinder(targets[0], anchor);
  r.height_min = r.height_max = first.height;
  r.arc_min = r.arc_max = first.arc;
  r.radius_min = r.radius_max = first.radius;
  for (const auto& t : targets) {
    const auto c = to_cylinder(t, anchor);
    r.height_min = std::min(r.height_min, c.height);
    r.height_max = std::max(r.height_max, c.height);
    r.arc_min = std::min(r.arc_min, c.arc);
    r.arc_max = std::max(r.arc_max, c.arc);
    r.radius_min = std::min(r.radius_min, c.radius);
    r.radius_max = std::max(r.radius_max, c.radius);
  }
  return r;
}

std::vector<TargetPoint> sample_test_targets(const HalfCylinderRange& range, int n, std::uint64_t seed) {
  range.validate();
  if (n < 0) throw Error(ErrorCode::invalid_argument, "sample count must be non-negative");
  Rng rng(seed);
  std::vector<TargetPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample_in_range(range, rng));
  return out;
}

Box bounding_box(std::span<const TargetPoint> targets) {
  if (targets.empty()) throw Error(ErrorCode::empty_input, "no targets for bounding box");
  Box b{targets[0], targets[0]};
  for (const auto& t : targets) {
    b.lo = b.lo.cwiseMin(t);
    b.hi = b.hi.cwiseMax(t);
  }
  return b;
}

std::vector<TargetPoint> spherical_grid(const Box& limits, int n) {
  if (!limits.lo.allFinite() || !limits.hi.allFinite() || (limits.hi.array() < limits.lo.array()).any()) {
    throw Error(ErrorCode::invalid_argument, "grid limits invalid");
  }
  const int k = static_cast<int>(std::lround(std::cbrt(static_cast<double>(std::max(n, 1)))));
  if (n <= 0 || k * k * k != n) {
    int best = 1;
    for (int c = 1; c <= k + 1; ++c)
      if (std::abs(c * c * c - n) < std::abs(best * best * best - n)) best = c;
    throw Error(ErrorCode::invalid_argument, "grid size " + std::to_string(n) +
                                                 " is not a cube; nearest feasible n = " +
                                                 std::to_string(best * best * best));
  }
  const Eigen::Vector3d center = 0.5 * (limits.lo + limits.hi);
  const Eigen::Vector3d half = 0.5 * (limits.hi - limits.lo);
  std::vector<TargetPoint> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int ri = 0; ri < k; ++ri) {
    const double r = static_cast<double>(ri + 1) / k;
    for (int ai = 0; ai < k; ++ai) {
      const double azimuth = 2.0 * M_PI * ai / k;
      for (int ei = 0; ei < k; ++ei) {
        const double elevation = -M_PI / 2.0 + M_PI * (ei + 0.5) / k;
        const Eigen::Vector3d dir(std::cos(elevation) * std::sin(azimuth), std::sin(elevation),
                                  std::cos(elevation) * std::cos(azimuth));
        TargetPoint p = center + r * half.cwiseProduct(dir);
        grid.push_back(p.cwiseMax(limits.lo).cwiseMin(limits.hi));
      }
    }
  }
  return grid;
}

void write_targets_csv(std::ostream& out, std::span<const LabeledTarget> rows) {
  out << "id,x,y,z,role\n";
  for (const auto& row : rows) {
    out << row.id << ',' << text::format_double(row.position.x()) << ',' << text::format_double(row.position.y())
        << ',' << text::format_double(row.position.z()) << ',' << row.role << '\n';
  }
}

std::vector<LabeledTarget> read_targets_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,x,y,z", 0) != 0) {
    throw Error(ErrorCode::schema, "target file must start with header id,x,y,z,role");
  }
  std::vector<LabeledTarget> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() < 4) throw Error(ErrorCode::schema, "target row has fewer than 4 columns: " + line);
    LabeledTarget row;
    row.id = static_cast<int>(text::parse_int(cols[0]));
    row.position = TargetPoint(text::parse_double(cols[1]), text::parse_double(cols[2]), text::parse_double(cols[3]));
    row.role = cols.size() > 4 ? cols[4] : "target";
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pointing::deixis
