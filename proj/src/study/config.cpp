#include "pointing/study/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "pointing/common/error.hpp"

namespace pointing::study {

using nlohmann::json;

void StudyConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::invalid_argument, "study config: no models");
  if (std::set<std::string>(models.begin(), models.end()).size() != models.size()) {
    throw Error(ErrorCode::invalid_argument, "study config: duplicate model id");
  }
  for (const auto& m : models) {
    if (m.empty() || m.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::invalid_argument, "study config: model ids must be non-empty and free of commas");
    }
  }
  if (naturalness_trials < 1 || accuracy_trials < 1) {
    throw Error(ErrorCode::invalid_argument, "study config: trials per model must be >= 1");
  }
  if (static_cast<int>(pool.size()) < std::max(accuracy_trials, naturalness_trials)) {
    throw Error(ErrorCode::invalid_argument, "study config: pool has " + std::to_string(pool.size()) +
                                                 " positions, fewer than the trials per model");
  }
  if (conditions.empty()) throw Error(ErrorCode::invalid_argument, "study config: no conditions");
  if (!(motion_duration > 0.0)) throw Error(ErrorCode::invalid_argument, "study config: motion_duration must be > 0");
  distractor_range.validate();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

namespace {

Eigen::Vector3d point(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::schema, "study config: points are [x,y,z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

StudyConfig parse_study_config(const std::string& text) {
  try {
    const json j = json::parse(text);
    StudyConfig c;
    c.models = j.at("models").get<std::vector<std::string>>();
    c.naturalness_trials = j.value("naturalness_trials", c.naturalness_trials);
    c.accuracy_trials = j.value("accuracy_trials", c.accuracy_trials);
    for (const auto& p : j.at("pool")) c.pool.push_back(point(p));
    if (j.contains("conditions")) c.conditions = j.at("conditions").get<std::vector<std::string>>();
    if (j.contains("anchor")) c.anchor = point(j.at("anchor"));
    c.motion_duration = j.value("motion_duration", c.motion_duration);
    c.seed = j.value("seed", c.seed);
    if (j.contains("distractor_range")) {
      const json& r = j.at("distractor_range");
      c.distractor_range.height_min = r.at("height").at(0).get<double>();
      c.distractor_range.height_max = r.at("height").at(1).get<double>();
      c.distractor_range.arc_min = r.at("arc").at(0).get<double>();
      c.distractor_range.arc_max = r.at("arc").at(1).get<double>();
      c.distractor_range.radius_min = r.at("radius").at(0).get<double>();
      c.distractor_range.radius_max = r.at("radius").at(1).get<double>();
      c.distractor_range.anchor = c.anchor;
    } else {
      c.distractor_range = deixis::fit_half_cylinder(c.pool, c.anchor);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("study config: ") + e.what());
  }
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open study config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

}  // namespace pointing::study
