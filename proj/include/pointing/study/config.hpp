#pragma once

#include <string>
#include <vector>

#include "pointing/deixis/samplers.hpp"

namespace pointing::study {

using deixis::TargetPoint;

/// Study protocol settings. Candidate positions for every trial come from
/// pool; distractors are drawn from distractor_range (fitted to the pool
/// around anchor when the config leaves it out).
struct StudyConfig {
  std::vector<std::string> models;  // anonymized ids shown to nobody
  int naturalness_trials = 5;       // stage-1 trials per model
  int accuracy_trials = 10;         // stage-2 trials per model
  std::vector<TargetPoint> pool;
  std::vector<std::string> conditions{"across", "side-by-side"};
  deixis::HalfCylinderRange distractor_range;
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  double motion_duration = 3.5;  // s
  std::uint64_t seed = 0;

  /// Throws Error(invalid_argument) naming the offending field.
  void validate() const;
};

/// JSON document:
///   {"models": [...], "naturalness_trials": 5, "accuracy_trials": 10,
///    "pool": [[x,y,z], ...], "conditions": ["across","side-by-side"],
///    "anchor": [x,y,z], "motion_duration": 3.5, "seed": 0,
///    "distractor_range": {"height": [lo,hi], "arc": [lo,hi], "radius": [lo,hi]}}
/// Everything except models and pool has a default.
StudyConfig parse_study_config(const std::string& text);
StudyConfig load_study_config(const std::string& path);

/// 32-bit FNV-1a of a string, used to derive per-participant seeds.
std::uint64_t fnv1a(const std::string& s);

}  // namespace pointing::study
