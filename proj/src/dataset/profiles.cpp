#include "pointing/dataset/profiles.hpp"

#include <cmath>
#include <ostream>

#include "pointing/common/error.hpp"
#include "pointing/common/text.hpp"
#include "pointing/dataset/accuracy.hpp"

namespace pointing::dataset {

std::vector<double> clip_series(const MotionClip& clip, const SkeletonModel& skeleton, ProfileKind kind) {
  if (kind == ProfileKind::velocity) return trajectory_speeds(hand_trajectory(clip, skeleton), clip.fps);
  auto rewards = frame_rewards(clip, skeleton);
  for (double& r : rewards) r /= deixis::kMaxPointingReward;
  return rewards;
}

std::vector<double> resample_series(const std::vector<double>& series, int steps) {
  if (steps < 2 || series.size() < 2) throw Error(ErrorCode::invalid_argument, "resampling needs >= 2 points");
  std::vector<double> out(static_cast<std::size_t>(steps));
  const double last = static_cast<double>(series.size() - 1);
  for (int k = 0; k < steps; ++k) {
    const double x = last * k / (steps - 1);
    const auto i0 = static_cast<std::size_t>(std::floor(x));
    const std::size_t i1 = std::min(i0 + 1, series.size() - 1);
    const double w = x - static_cast<double>(i0);
    out[static_cast<std::size_t>(k)] = (1.0 - w) * series[i0] + w * series[i1];
  }
  return out;
}

ProfileSeries motion_profiles(std::span<const MotionClip> clips, const SkeletonModel& skeleton, ProfileKind kind,
                              int steps) {
  if (clips.empty()) throw Error(ErrorCode::empty_input, "no clips to profile");
  ProfileSeries p;
  p.kind = kind;
  p.normalizer = kind == ProfileKind::accuracy ? deixis::kMaxPointingReward : 1.0;
  p.values.assign(static_cast<std::size_t>(steps), 0.0);
  for (const auto& clip : clips) {
    if (clip.frame_count() < steps) {
      throw Error(ErrorCode::invalid_argument, "clip '" + clip.source_id + "' has " + std::to_string(clip.frame_count()) +
                                                   " frames, fewer than the " + std::to_string(steps) +
                                                   "-step resampling resolution");
    }
    const auto series = resample_series(clip_series(clip, skeleton, kind), steps);
    for (std::size_t k = 0; k < series.size(); ++k) p.values[k] += series[k];
  }
  for (double& v : p.values) v /= static_cast<double>(clips.size());
  p.normalized_time.resize(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) p.normalized_time[static_cast<std::size_t>(k)] = static_cast<double>(k) / (steps - 1);
  p.clip_count = static_cast<int>(clips.size());
  return p;
}

void write_profile_csv(std::ostream& out, const ProfileSeries& profile) {
  out << "normalized_time," << (profile.kind == ProfileKind::accuracy ? "accuracy" : "velocity_mps") << "\n";
  for (std::size_t k = 0; k < profile.values.size(); ++k) {
    out << text::format_double(profile.normalized_time[k]) << ',' << text::format_double(profile.values[k]) << "\n";
  }
}

}  // namespace pointing::dataset
