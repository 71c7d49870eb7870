#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

enum class ProfileKind { accuracy, velocity };

struct ProfileSeries {
  ProfileKind kind = ProfileKind::accuracy;
  std::vector<double> normalized_time;  // evenly spaced in [0, 1]
  std::vector<double> values;           // accuracy in [0, 1] or hand speed in m/s
  double normalizer = 1.0;              // (e-1)/e for accuracy, 1 for velocity
  int clip_count = 0;
};

inline constexpr int kProfileSteps = 100;

/// Per-frame series of a single clip (normalized reward or hand speed).
std::vector<double> clip_series(const MotionClip& clip, const SkeletonModel& skeleton, ProfileKind kind);

/// Linear interpolation of a series onto `steps` evenly spaced normalized times.
std::vector<double> resample_series(const std::vector<double>& series, int steps);

/// Time-normalizes every clip and averages. Throws Error(invalid_argument)
/// when a clip has fewer frames than the resampling resolution.
ProfileSeries motion_profiles(std::span<const MotionClip> clips, const SkeletonModel& skeleton, ProfileKind kind,
                              int steps = kProfileSteps);

/// Columns: normalized_time,value
void write_profile_csv(std::ostream& out, const ProfileSeries& profile);

}  // namespace pointing::dataset
