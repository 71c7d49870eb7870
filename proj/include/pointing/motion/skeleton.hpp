#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pointing::motion {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

enum class Handedness { right, left };

const char* to_string(Handedness h);
Handedness handedness_from_string(const std::string& s);
inline Handedness opposite(Handedness h) { return h == Handedness::right ? Handedness::left : Handedness::right; }

/// One actuated rotational degree of freedom. A link's joint rotation is the
/// ordered product of its DoF rotations, so a spherical joint is three DoFs.
struct DofSpec {
  std::string name;
  Vec3 axis = Vec3::UnitZ();  // in the parent-side frame of the joint, unit length
  double lower = -M_PI;       // rad
  double upper = M_PI;        // rad
  double kp = 100.0;          // N·m/rad
  double kd = 5.0;            // N·m·s/rad
  double torque_limit = 50.0; // N·m
  double armature = 0.01;     // kg·m², reflected rotor inertia
};

struct LinkSpec {
  std::string name;
  int parent = -1;
  Vec3 offset = Vec3::Zero();  // from parent link origin, in parent frame (m)
  double mass = 1.0;           // kg, lumped at the link origin
  double inertia = 0.01;       // kg·m², isotropic rotational inertia
  std::vector<DofSpec> dofs;   // empty for a fixed joint
};

struct PointingLinks {
  int elbow = -1;
  int hand = -1;
};

/// Tree-ordered articulated chain. Link 0 is the root and is fixed in space.
class SkeletonModel {
 public:
  SkeletonModel() = default;
  SkeletonModel(std::string id, std::vector<LinkSpec> links, int elbow, int hand,
                std::vector<std::pair<int, int>> mirror_pairs = {});

  const std::string& id() const { return id_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  const LinkSpec& link(int i) const { return links_.at(static_cast<std::size_t>(i)); }
  int link_count() const { return static_cast<int>(links_.size()); }
  int dof_count() const { return dof_count_; }
  int root() const { return 0; }

  /// Index of the first DoF of link i in the generalized coordinate vector.
  int dof_offset(int link) const { return dof_offsets_.at(static_cast<std::size_t>(link)); }
  const DofSpec& dof(int index) const;
  std::vector<std::string> dof_names() const;
  int link_index(const std::string& name) const;  // -1 if absent

  /// Elbow/hand pair of the dominant (right) arm as declared.
  PointingLinks pointing_links() const { return {elbow_, hand_}; }
  /// Elbow/hand for either arm; the left arm is resolved through the mirror map.
  PointingLinks pointing_links(Handedness side) const;

  const std::vector<std::pair<int, int>>& mirror_pairs() const { return mirror_pairs_; }
  bool has_mirror_map() const { return !mirror_pairs_.empty(); }
  /// Counterpart link under left/right mirroring (itself when unpaired).
  int mirror_of(int link) const;

  bool is_descendant(int link, int ancestor) const;

 private:
  void validate() const;

  std::string id_;
  std::vector<LinkSpec> links_;
  std::vector<int> dof_offsets_;
  std::vector<int> mirror_index_;
  std::vector<std::pair<int, int>> mirror_pairs_;
  int dof_count_ = 0;
  int elbow_ = -1;
  int hand_ = -1;
};

/// Skeleton definition file (JSON, schema tag "pointing-skeleton/1").
SkeletonModel load_skeleton(const std::string& path);
SkeletonModel parse_skeleton(const std::string& json_text);
std::string serialize_skeleton(const SkeletonModel& skeleton);

inline constexpr const char* kSkeletonSchema = "pointing-skeleton/1";

/// Two-DoF arm (shoulder yaw about +y, shoulder pitch) with rigid upper arm and
/// forearm. The arm hangs straight down at q = 0; positive pitch raises it
/// forward. World frame: x lateral, y up, z forward.
SkeletonModel toy_arm();

/// Fixed torso with two 4-DoF arms (3-DoF shoulder, 1-DoF elbow) and a
/// declared left/right correspondence.
SkeletonModel desk_humanoid();

}  // namespace pointing::motion
