#pragma once

#include <iosfwd>
#include <string>

#include "pointing/dataset/clip.hpp"

namespace pointing::dataset {

/// Clip library text format, version 1:
///
///   pointing-clips 1
///   skeleton <id>
///   dofs <name> <name> ...
///   clips <count>
///   clip <source_id>
///   fps <hz>
///   handedness right|left
///   target <x> <y> <z> | target none
///   mirrored 0|1
///   partition front|back
///   frames <n>
///   <root px py pz> <root qw qx qy qz> <q_0 ... q_{dofs-1}>   (n lines)
///   end
///
/// Numbers are written in shortest round-trip form, so save(load(x)) is
/// byte-identical to x when x is canonical. Velocities are derived on load.
ClipLibrary load_library(const std::string& path, const SkeletonModel& skeleton);
ClipLibrary read_library(std::istream& in, const SkeletonModel& skeleton);

void save_library(const std::string& path, const ClipLibrary& library);
void write_library(std::ostream& out, const ClipLibrary& library);

}  // namespace pointing::dataset
