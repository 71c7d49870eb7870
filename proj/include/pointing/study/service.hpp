#pragma once

#include <functional>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>

#include "pointing/analysis/perceptual.hpp"
#include "pointing/dataset/clip.hpp"
#include "pointing/study/store.hpp"

namespace pointing::study {

/// Renders the stimulus for (model, target). Clips are generated once per
/// (model, position) and cached so every participant sees the same motion.
struct ClipSource {
  motion::SkeletonModel skeleton;
  std::function<dataset::MotionClip(const std::string& model, const TargetPoint& target, double duration)> generate;
};

/// Session registry over an append-only store. On construction the store is
/// replayed, so a restarted service resumes every session where it stopped.
/// All public calls are serialized.
class StudyService {
 public:
  StudyService(StudyConfig config, std::string store_path, std::optional<ClipSource> clips = std::nullopt);

  /// {"token", "participant", "total_trials", "stage1_trials", "stage2_trials"}
  nlohmann::json create_session(const std::string& participant);
  /// Trial payload, or {"done": true}. Stage-1 payloads carry no objects;
  /// stage-2 payloads carry the candidate positions but not the answer.
  nlohmann::json next(const std::string& token);
  /// Body: {"trial", "rating" | "choice", "latency", "motion_finished", "timestamp"}.
  nlohmann::json submit(const std::string& token, const nlohmann::json& body);

  std::vector<analysis::ExportRecord> export_records() const;
  StudySession session(const std::string& token) const;
  std::vector<std::string> tokens() const;
  const StudyConfig& config() const { return config_; }

 private:
  StudySession& find(const std::string& token);
  nlohmann::json motion_payload(const Trial& trial);

  StudyConfig config_;
  StudyStore store_;
  std::optional<ClipSource> clips_;
  std::map<std::string, dataset::MotionClip> clip_cache_;
  std::vector<StudySession> sessions_;
  std::map<std::string, std::size_t> by_token_;
  mutable std::mutex mutex_;
};

/// Flat records of every answered trial, sessions in creation order and
/// trials in schedule order.
std::vector<analysis::ExportRecord> export_records(const std::vector<StudySession>& sessions);

/// Replays a store file against its config and exports it.
std::vector<analysis::ExportRecord> export_store(const StudyConfig& config, const std::string& store_path);

}  // namespace pointing::study
