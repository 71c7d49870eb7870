#include "pointing/dataset/clip.hpp"

#include <cmath>

#include "pointing/common/error.hpp"

namespace pointing::dataset {

void MotionClip::validate(const SkeletonModel& skeleton) const {
  const std::string who = "clip '" + source_id + "'";
  if (!(fps > 0.0) || !std::isfinite(fps)) throw Error(ErrorCode::schema, who + ": fps must be positive");
  if (frames.size() < 2) throw Error(ErrorCode::schema, who + ": needs at least 2 frames");
  if (target && !target->allFinite()) throw Error(ErrorCode::schema, who + ": target not finite");
  for (const auto& f : frames) {
    try {
      motion::check_state(skeleton, f);
    } catch (const Error& e) {
      throw Error(ErrorCode::schema, who + ": " + e.what());
    }
  }
  if (handedness == Handedness::left) {
    try {
      skeleton.pointing_links(Handedness::left);
    } catch (const Error& e) {
      throw Error(ErrorCode::schema, who + ": " + e.what());
    }
  }
}

std::vector<deixis::TargetPoint> ClipLibrary::targets() const {
  std::vector<deixis::TargetPoint> out;
  for (const auto& c : clips)
    if (c.target) out.push_back(*c.target);
  return out;
}

void fill_velocities(MotionClip& clip) {
  const auto n = clip.frames.size();
  if (n < 2) {
    for (auto& f : clip.frames) f.qdot = Eigen::VectorXd::Zero(f.q.size());
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    clip.frames[i].qdot = (clip.frames[b].q - clip.frames[a].q) * clip.fps / static_cast<double>(b - a);
  }
}

std::vector<Vec3> link_trajectory(const MotionClip& clip, const SkeletonModel& skeleton, int link) {
  std::vector<Vec3> out;
  out.reserve(clip.frames.size());
  for (const auto& f : clip.frames) {
    out.push_back(motion::compute_frames(skeleton, f).position[static_cast<std::size_t>(link)]);
  }
  return out;
}

std::vector<Vec3> hand_trajectory(const MotionClip& clip, const SkeletonModel& skeleton) {
  return link_trajectory(clip, skeleton, skeleton.pointing_links(clip.handedness).hand);
}

std::vector<Vec3> elbow_trajectory(const MotionClip& clip, const SkeletonModel& skeleton) {
  return link_trajectory(clip, skeleton, skeleton.pointing_links(clip.handedness).elbow);
}

std::vector<double> trajectory_speeds(const std::vector<Vec3>& positions, double fps) {
  const auto n = positions.size();
  std::vector<double> speed(n, 0.0);
  if (n < 2) return speed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == n ? n - 1 : i + 1;
    speed[i] = (positions[b] - positions[a]).norm() * fps / static_cast<double>(b - a);
  }
  return speed;
}

MotionClip resample(const MotionClip& clip, double fps) {
  if (!(fps > 0.0)) throw Error(ErrorCode::invalid_argument, "resample fps must be positive");
  if (clip.frames.size() < 2) throw Error(ErrorCode::invalid_argument, "cannot resample a clip with < 2 frames");
  MotionClip out = clip;
  out.fps = fps;
  out.frames.clear();
  const double duration = clip.duration();
  const int count = static_cast<int>(std::floor(duration * fps + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) {
    const double src = std::min(k / fps * clip.fps, static_cast<double>(clip.frames.size() - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    const std::size_t i1 = std::min(i0 + 1, clip.frames.size() - 1);
    const double w = src - static_cast<double>(i0);
    JointState s = clip.frames[i0];
    s.q = (1.0 - w) * clip.frames[i0].q + w * clip.frames[i1].q;
    out.frames.push_back(std::move(s));
  }
  fill_velocities(out);
  return out;
}

}  // namespace pointing::dataset
