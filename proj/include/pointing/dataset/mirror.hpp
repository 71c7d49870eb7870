#pragma once

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

/// Reflects a joint state across the sagittal (x = 0) plane: paired links swap
/// coordinates, rotations about x keep their sign and rotations about axes in
/// the y-z plane flip it.
JointState mirror_state(const SkeletonModel& skeleton, const JointState& state);

/// Mirrors every frame, negates target x, flips handedness and toggles
/// is_mirrored, so mirroring twice restores the clip. Throws
/// Error(invalid_argument) when the skeleton declares no correspondence.
MotionClip mirror_clip(const MotionClip& clip, const SkeletonModel& skeleton);

/// Original clips followed by their mirrors.
ClipLibrary with_mirrored(const ClipLibrary& library);

}  // namespace pointing::dataset
