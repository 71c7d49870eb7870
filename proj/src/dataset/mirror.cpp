#include "pointing/dataset/mirror.hpp"

#include <cmath>

#include "pointing/common/error.hpp"

namespace pointing::dataset {

JointState mirror_state(const SkeletonModel& skeleton, const JointState& state) {
  if (!skeleton.has_mirror_map()) {
    throw Error(ErrorCode::invalid_argument, "skeleton '" + skeleton.id() + "' has no left/right correspondence map");
  }
  motion::check_state(skeleton, state);
  JointState out = state;
  for (int i = 0; i < skeleton.link_count(); ++i) {
    const int twin = skeleton.mirror_of(i);
    const auto& dofs = skeleton.link(i).dofs;
    for (std::size_t k = 0; k < dofs.size(); ++k) {
      const double sign = std::abs(dofs[k].axis.x()) > 0.5 ? 1.0 : -1.0;
      const int src = skeleton.dof_offset(i) + static_cast<int>(k);
      const int dst = skeleton.dof_offset(twin) + static_cast<int>(k);
      out.q[dst] = sign * state.q[src];
      out.qdot[dst] = sign * state.qdot[src];
    }
  }
  out.root_position.x() = -state.root_position.x();
  const auto& r = state.root_orientation;
  out.root_orientation = motion::Quat(r.w(), r.x(), -r.y(), -r.z());
  return out;
}

MotionClip mirror_clip(const MotionClip& clip, const SkeletonModel& skeleton) {
  MotionClip out = clip;
  for (auto& f : out.frames) f = mirror_state(skeleton, f);
  if (out.target) out.target->x() = -out.target->x();
  out.handedness = motion::opposite(clip.handedness);
  out.is_mirrored = !clip.is_mirrored;
  return out;
}

ClipLibrary with_mirrored(const ClipLibrary& library) {
  ClipLibrary out = library;
  for (const auto& c : library.clips) {
    MotionClip m = mirror_clip(c, library.skeleton);
    m.source_id += "_mirror";
    out.clips.push_back(std::move(m));
  }
  return out;
}

}  // namespace pointing::dataset
