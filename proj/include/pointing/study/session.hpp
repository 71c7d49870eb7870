#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pointing/study/config.hpp"

namespace pointing::study {

struct Trial {
  int index = 0;  // position in the schedule, also the trial id
  int stage = 1;
  std::string model;
  int position = 0;  // pool index
  TargetPoint target = TargetPoint::Zero();
  std::vector<TargetPoint> candidates;  // stage 2: target and two distractors, shuffled
  int target_slot = -1;                 // stage 2: index of the target in candidates; never sent to clients
  std::string condition;                // stage 2 only
  std::string clip_ref;                 // "<model>/<position>"
};

struct ResponseRecord {
  std::string session;
  int trial = 0;
  std::optional<int> rating;  // stage 1, 1..5
  std::optional<int> choice;  // stage 2, candidate index
  double latency = 0.0;       // s
  std::string timestamp;
  bool motion_finished = false;
};

struct StudySession {
  std::string participant;
  std::string token;
  std::vector<Trial> schedule;
  int cursor = 0;
  std::map<int, ResponseRecord> responses;
  std::vector<std::string> audit;

  bool complete() const { return cursor >= static_cast<int>(schedule.size()); }
};

/// Deterministic in (config.seed, participant). Draws the stage-1 and stage-2
/// positions once, reuses them for every model, shares distractors across
/// models per position, balances conditions per model, and shuffles each
/// stage with all stage-1 trials first. Throws Error(exhausted) when no
/// distractor pair exists for a drawn position.
StudySession create_session(const StudyConfig& config, const std::string& participant, const std::string& token);

/// Trial at the cursor. Re-checks stage-2 distractor distances. Throws
/// Error(protocol) when the session is complete.
const Trial& next_trial(const StudySession& session);

struct SubmitAck {
  int cursor = 0;
  bool duplicate = false;
  bool complete = false;
};

/// Validates and records a response. The trial at the cursor advances it; an
/// already answered trial is overwritten with an audit note; a later trial is
/// rejected. Throws Error(protocol) for order, stage or motion-finished
/// violations and Error(invalid_argument) for an out-of-range rating/choice.
SubmitAck submit_response(StudySession& session, const ResponseRecord& record);

/// 1 for a correct stage-2 choice, 0 otherwise; the rating for stage 1.
double response_value(const Trial& trial, const ResponseRecord& record);

}  // namespace pointing::study
