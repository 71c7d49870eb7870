#include "pointing/motion/skeleton.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pointing/common/error.hpp"

namespace pointing::motion {

using nlohmann::json;

const char* to_string(Handedness h) { return h == Handedness::right ? "right" : "left"; }

Handedness handedness_from_string(const std::string& s) {
  if (s == "right") return Handedness::right;
  if (s == "left") return Handedness::left;
  throw Error(ErrorCode::schema, "unknown handedness '" + s + "'");
}

SkeletonModel::SkeletonModel(std::string id, std::vector<LinkSpec> links, int elbow, int hand,
                             std::vector<std::pair<int, int>> mirror_pairs)
    : id_(std::move(id)), links_(std::move(links)), mirror_pairs_(std::move(mirror_pairs)), elbow_(elbow), hand_(hand) {
  dof_offsets_.reserve(links_.size());
  for (const auto& link : links_) {
    dof_offsets_.push_back(dof_count_);
    dof_count_ += static_cast<int>(link.dofs.size());
  }
  mirror_index_.resize(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) mirror_index_[i] = static_cast<int>(i);
  for (auto [a, b] : mirror_pairs_) {
    if (a < 0 || b < 0 || a >= link_count() || b >= link_count()) {
      throw Error(ErrorCode::schema, "mirror pair references unknown link");
    }
    mirror_index_[static_cast<std::size_t>(a)] = b;
    mirror_index_[static_cast<std::size_t>(b)] = a;
  }
  validate();
}

void SkeletonModel::validate() const {
  if (links_.empty()) throw Error(ErrorCode::schema, "skeleton '" + id_ + "' has no links");
  if (links_[0].parent != -1) throw Error(ErrorCode::schema, "link 0 must be the root");
  if (!links_[0].dofs.empty()) throw Error(ErrorCode::schema, "root link is fixed and cannot carry DoFs");
  for (int i = 0; i < link_count(); ++i) {
    const auto& link = links_[static_cast<std::size_t>(i)];
    if (i > 0 && (link.parent < 0 || link.parent >= i)) {
      throw Error(ErrorCode::schema, "link '" + link.name + "' parent index must precede it");
    }
    if (!link.offset.allFinite()) throw Error(ErrorCode::schema, "link '" + link.name + "' offset not finite");
    if (!(link.mass > 0.0) || !(link.inertia > 0.0)) {
      throw Error(ErrorCode::schema, "link '" + link.name + "' mass and inertia must be positive");
    }
    for (const auto& dof : link.dofs) {
      if (!dof.axis.allFinite() || std::abs(dof.axis.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::schema, "dof '" + dof.name + "' axis must be unit length");
      }
      if (!(dof.lower <= dof.upper)) throw Error(ErrorCode::schema, "dof '" + dof.name + "' limits inverted");
      if (!(dof.kp > 0.0) || !(dof.kd > 0.0) || !(dof.torque_limit > 0.0) || dof.armature < 0.0) {
        throw Error(ErrorCode::schema, "dof '" + dof.name + "' gains and torque limit must be positive");
      }
    }
  }
  if (elbow_ <= 0 || elbow_ >= link_count() || hand_ <= 0 || hand_ >= link_count()) {
    throw Error(ErrorCode::schema, "elbow/hand indices out of range");
  }
  if (!is_descendant(hand_, elbow_)) throw Error(ErrorCode::schema, "hand must be a descendant of the elbow");

  for (int i = 0; i < link_count(); ++i) {
    if (!has_mirror_map()) break;
    const auto& link = links_[static_cast<std::size_t>(i)];
    const auto& twin = links_[static_cast<std::size_t>(mirror_of(i))];
    const int twin_parent = twin.parent;
    const int expected_parent = link.parent < 0 ? -1 : mirror_of(link.parent);
    Vec3 reflected = link.offset;
    reflected.x() = -reflected.x();
    if (twin_parent != expected_parent || (reflected - twin.offset).norm() > 1e-9 ||
        twin.dofs.size() != link.dofs.size()) {
      throw Error(ErrorCode::schema, "mirror map: links '" + link.name + "' and '" + twin.name + "' are not symmetric");
    }
    for (std::size_t d = 0; d < link.dofs.size(); ++d) {
      const Vec3& a = link.dofs[d].axis;
      const bool along_x = std::abs(std::abs(a.x()) - 1.0) < 1e-9;
      const bool across_x = std::abs(a.x()) < 1e-9;
      if ((!along_x && !across_x) || (a - twin.dofs[d].axis).norm() > 1e-9) {
        throw Error(ErrorCode::schema, "mirror map: dof '" + link.dofs[d].name + "' axis not mirrorable");
      }
    }
  }
}

const DofSpec& SkeletonModel::dof(int index) const {
  for (int i = link_count() - 1; i >= 0; --i) {
    if (index >= dof_offsets_[static_cast<std::size_t>(i)]) {
      const auto local = static_cast<std::size_t>(index - dof_offsets_[static_cast<std::size_t>(i)]);
      const auto& dofs = links_[static_cast<std::size_t>(i)].dofs;
      if (local < dofs.size()) return dofs[local];
    }
  }
  throw Error(ErrorCode::invalid_argument, "dof index out of range");
}

std::vector<std::string> SkeletonModel::dof_names() const {
  std::vector<std::string> names;
  for (const auto& link : links_)
    for (const auto& d : link.dofs) names.push_back(d.name);
  return names;
}

int SkeletonModel::link_index(const std::string& name) const {
  for (int i = 0; i < link_count(); ++i)
    if (links_[static_cast<std::size_t>(i)].name == name) return i;
  return -1;
}

int SkeletonModel::mirror_of(int link) const { return mirror_index_.at(static_cast<std::size_t>(link)); }

PointingLinks SkeletonModel::pointing_links(Handedness side) const {
  if (side == Handedness::right) return {elbow_, hand_};
  if (!has_mirror_map() || mirror_of(elbow_) == elbow_) {
    throw Error(ErrorCode::invalid_argument, "skeleton '" + id_ + "' has no left arm correspondence");
  }
  return {mirror_of(elbow_), mirror_of(hand_)};
}

bool SkeletonModel::is_descendant(int link, int ancestor) const {
  while (link > ancestor) link = links_[static_cast<std::size_t>(link)].parent;
  return link == ancestor;
}

// ---------------------------------------------------------------------------
// Definition file

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::schema, what + " must be a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

SkeletonModel parse_skeleton(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("skeleton file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("schema", "") != kSkeletonSchema) {
      throw Error(ErrorCode::schema, "missing or unsupported schema tag (expected " + std::string(kSkeletonSchema) + ")");
    }
    std::vector<LinkSpec> links;
    for (const auto& jl : doc.at("links")) {
      LinkSpec link;
      link.name = jl.at("name").get<std::string>();
      link.parent = jl.value("parent", -1);
      link.offset = vec_from(jl.at("offset"), "offset");
      link.mass = jl.at("mass").get<double>();
      link.inertia = jl.value("inertia", 0.01);
      for (const auto& jd : jl.value("dofs", json::array())) {
        DofSpec dof;
        dof.name = jd.at("name").get<std::string>();
        dof.axis = vec_from(jd.at("axis"), "axis");
        dof.lower = jd.at("limits").at(0).get<double>();
        dof.upper = jd.at("limits").at(1).get<double>();
        dof.kp = jd.at("kp").get<double>();
        dof.kd = jd.at("kd").get<double>();
        dof.torque_limit = jd.at("torque_limit").get<double>();
        dof.armature = jd.value("armature", 0.01);
        link.dofs.push_back(std::move(dof));
      }
      links.push_back(std::move(link));
    }
    auto find = [&](const std::string& name) {
      for (std::size_t i = 0; i < links.size(); ++i)
        if (links[i].name == name) return static_cast<int>(i);
      throw Error(ErrorCode::schema, "unknown link name '" + name + "'");
    };
    std::vector<std::pair<int, int>> pairs;
    for (const auto& jp : doc.value("mirror_pairs", json::array())) {
      pairs.emplace_back(find(jp.at(0).get<std::string>()), find(jp.at(1).get<std::string>()));
    }
    return SkeletonModel(doc.at("id").get<std::string>(), std::move(links), find(doc.at("elbow").get<std::string>()),
                         find(doc.at("hand").get<std::string>()), std::move(pairs));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("skeleton file: ") + e.what());
  }
}

SkeletonModel load_skeleton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open skeleton file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_skeleton(buf.str());
}

std::string serialize_skeleton(const SkeletonModel& skeleton) {
  json doc;
  doc["schema"] = kSkeletonSchema;
  doc["id"] = skeleton.id();
  json links = json::array();
  for (const auto& link : skeleton.links()) {
    json jl;
    jl["name"] = link.name;
    jl["parent"] = link.parent;
    jl["offset"] = vec_json(link.offset);
    jl["mass"] = link.mass;
    jl["inertia"] = link.inertia;
    json dofs = json::array();
    for (const auto& d : link.dofs) {
      dofs.push_back({{"name", d.name},
                      {"axis", vec_json(d.axis)},
                      {"limits", json::array({d.lower, d.upper})},
                      {"kp", d.kp},
                      {"kd", d.kd},
                      {"torque_limit", d.torque_limit},
                      {"armature", d.armature}});
    }
    jl["dofs"] = dofs;
    links.push_back(jl);
  }
  doc["links"] = links;
  doc["elbow"] = skeleton.link(skeleton.pointing_links().elbow).name;
  doc["hand"] = skeleton.link(skeleton.pointing_links().hand).name;
  json pairs = json::array();
  for (auto [a, b] : skeleton.mirror_pairs()) pairs.push_back({skeleton.link(a).name, skeleton.link(b).name});
  doc["mirror_pairs"] = pairs;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Built-in chains

SkeletonModel toy_arm() {
  std::vector<LinkSpec> links(4);
  links[0] = {"root", -1, Vec3::Zero(), 10.0, 0.1, {}};
  links[1] = {"r_shoulder", 0, Vec3(0.18, 0.0, 0.0), 2.0, 0.01, {}};
  links[1].dofs = {
      {"r_shoulder_yaw", Vec3::UnitY(), -1.5, 1.5, 150.0, 8.0, 60.0, 0.05},
      {"r_shoulder_pitch", -Vec3::UnitX(), -0.3, 2.8, 150.0, 8.0, 60.0, 0.05},
  };
  links[2] = {"r_elbow", 1, Vec3(0.0, -0.30, 0.0), 1.5, 0.01, {}};
  links[3] = {"r_hand", 2, Vec3(0.0, -0.28, 0.0), 0.5, 0.002, {}};
  return SkeletonModel("toy_arm", std::move(links), 2, 3);
}

SkeletonModel desk_humanoid() {
  auto shoulder_dofs = [](const std::string& side) {
    return std::vector<DofSpec>{
        {side + "_shoulder_flex", -Vec3::UnitX(), -0.5, 2.9, 150.0, 8.0, 60.0, 0.05},
        {side + "_shoulder_abd", Vec3::UnitZ(), -1.2, 1.2, 150.0, 8.0, 60.0, 0.05},
        {side + "_shoulder_twist", Vec3::UnitY(), -1.5, 1.5, 60.0, 3.0, 30.0, 0.03},
    };
  };
  auto elbow_dofs = [](const std::string& side) {
    return std::vector<DofSpec>{{side + "_elbow_flex", -Vec3::UnitX(), 0.0, 2.5, 80.0, 4.0, 40.0, 0.03}};
  };
  std::vector<LinkSpec> links(8);
  links[0] = {"root", -1, Vec3::Zero(), 20.0, 0.5, {}};
  links[1] = {"chest", 0, Vec3(0.0, 0.45, 0.0), 15.0, 0.3, {}};
  links[2] = {"r_shoulder", 1, Vec3(0.18, 0.0, 0.0), 2.0, 0.01, shoulder_dofs("r")};
  links[3] = {"r_elbow", 2, Vec3(0.0, -0.30, 0.0), 1.5, 0.01, elbow_dofs("r")};
  links[4] = {"r_hand", 3, Vec3(0.0, -0.28, 0.0), 0.5, 0.002, {}};
  links[5] = {"l_shoulder", 1, Vec3(-0.18, 0.0, 0.0), 2.0, 0.01, shoulder_dofs("l")};
  links[6] = {"l_elbow", 5, Vec3(0.0, -0.30, 0.0), 1.5, 0.01, elbow_dofs("l")};
  links[7] = {"l_hand", 6, Vec3(0.0, -0.28, 0.0), 0.5, 0.002, {}};
  return SkeletonModel("desk_humanoid", std::move(links), 3, 4, {{2, 5}, {3, 6}, {4, 7}});
}

}  // namespace pointing::motion
