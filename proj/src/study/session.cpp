#include "pointing/study/session.hpp"

#include <algorithm>
#include <numeric>

#include "pointing/common/error.hpp"
#include "pointing/common/random.hpp"

namespace pointing::study {

namespace {

std::vector<int> draw_positions(std::size_t pool, int count, Rng& rng) {
  std::vector<int> idx(pool);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + rng.index(pool - static_cast<std::size_t>(i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

/// Conditions cycled over count slots then shuffled, so each appears
/// floor or ceil of count / #conditions times.
std::vector<std::string> balanced_conditions(const std::vector<std::string>& conditions, int count, Rng& rng) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(conditions[static_cast<std::size_t>(i) % conditions.size()]);
  std::shuffle(out.begin(), out.end(), rng.engine());
  return out;
}

void check_distances(const Trial& t) {
  for (std::size_t k = 0; k < t.candidates.size(); ++k) {
    if (static_cast<int>(k) == t.target_slot) continue;
    const double d = (t.candidates[k] - t.target).norm();
    if (d < deixis::kDistractorMin - 1e-9 || d > deixis::kDistractorMax + 1e-9) {
      throw Error(ErrorCode::protocol, "trial " + std::to_string(t.index) + ": distractor at " + std::to_string(d) +
                                           " m from the target");
    }
  }
}

}  // namespace

StudySession create_session(const StudyConfig& config, const std::string& participant, const std::string& token) {
  config.validate();
  if (participant.empty()) throw Error(ErrorCode::invalid_argument, "participant id must not be empty");
  Rng rng(mix_seed(config.seed, fnv1a(participant)));
  const auto stage1 = draw_positions(config.pool.size(), config.naturalness_trials, rng);
  const auto stage2 = draw_positions(config.pool.size(), config.accuracy_trials, rng);

  std::vector<Trial> s1, s2;
  for (const auto& model : config.models) {
    for (int pos : stage1) {
      Trial t;
      t.stage = 1;
      t.model = model;
      t.position = pos;
      t.target = config.pool[static_cast<std::size_t>(pos)];
      t.clip_ref = model + "/" + std::to_string(pos);
      s1.push_back(std::move(t));
    }
  }
  std::vector<std::array<TargetPoint, 2>> distractors;
  for (int pos : stage2) {
    distractors.push_back(deixis::sample_distractors(config.pool[static_cast<std::size_t>(pos)],
                                                     config.distractor_range, rng));
  }
  for (const auto& model : config.models) {
    const auto conds = balanced_conditions(config.conditions, config.accuracy_trials, rng);
    for (std::size_t k = 0; k < stage2.size(); ++k) {
      Trial t;
      t.stage = 2;
      t.model = model;
      t.position = stage2[k];
      t.target = config.pool[static_cast<std::size_t>(t.position)];
      t.condition = conds[k];
      t.clip_ref = model + "/" + std::to_string(t.position);
      std::array<int, 3> slots{0, 1, 2};
      std::shuffle(slots.begin(), slots.end(), rng.engine());
      t.candidates.resize(3);
      t.candidates[static_cast<std::size_t>(slots[0])] = t.target;
      t.candidates[static_cast<std::size_t>(slots[1])] = distractors[k][0];
      t.candidates[static_cast<std::size_t>(slots[2])] = distractors[k][1];
      t.target_slot = slots[0];
      s2.push_back(std::move(t));
    }
  }
  std::shuffle(s1.begin(), s1.end(), rng.engine());
  std::shuffle(s2.begin(), s2.end(), rng.engine());

  StudySession session;
  session.participant = participant;
  session.token = token;
  session.schedule = std::move(s1);
  session.schedule.insert(session.schedule.end(), s2.begin(), s2.end());
  for (std::size_t i = 0; i < session.schedule.size(); ++i) session.schedule[i].index = static_cast<int>(i);
  return session;
}

const Trial& next_trial(const StudySession& session) {
  if (session.complete()) throw Error(ErrorCode::protocol, "session " + session.token + " is complete");
  const Trial& t = session.schedule[static_cast<std::size_t>(session.cursor)];
  if (t.stage == 2) check_distances(t);
  return t;
}

double response_value(const Trial& trial, const ResponseRecord& record) {
  if (trial.stage == 1) return static_cast<double>(record.rating.value_or(0));
  return record.choice && *record.choice == trial.target_slot ? 1.0 : 0.0;
}

SubmitAck submit_response(StudySession& session, const ResponseRecord& record) {
  if (record.trial < 0 || record.trial >= static_cast<int>(session.schedule.size())) {
    throw Error(ErrorCode::protocol, "unknown trial id " + std::to_string(record.trial));
  }
  if (record.trial > session.cursor) {
    throw Error(ErrorCode::protocol, "trial " + std::to_string(record.trial) + " submitted out of order; expected " +
                                         std::to_string(session.cursor));
  }
  const Trial& t = session.schedule[static_cast<std::size_t>(record.trial)];
  if (t.stage == 1) {
    if (!record.rating || record.choice) throw Error(ErrorCode::protocol, "stage-1 trials take a rating only");
    if (*record.rating < 1 || *record.rating > 5) {
      throw Error(ErrorCode::invalid_argument, "rating must be 1..5, got " + std::to_string(*record.rating));
    }
  } else {
    if (!record.choice || record.rating) throw Error(ErrorCode::protocol, "stage-2 trials take a choice only");
    if (!record.motion_finished) {
      throw Error(ErrorCode::protocol, "stage-2 selection submitted before the motion finished");
    }
    if (*record.choice < 0 || *record.choice >= static_cast<int>(t.candidates.size())) {
      throw Error(ErrorCode::invalid_argument, "choice must index one of the candidates");
    }
  }
  if (!(record.latency >= 0.0)) throw Error(ErrorCode::invalid_argument, "latency must be >= 0");

  SubmitAck ack;
  if (record.trial < session.cursor) {
    ack.duplicate = true;
    session.audit.push_back("trial " + std::to_string(record.trial) + " resubmitted; previous response replaced");
  } else {
    ++session.cursor;
  }
  session.responses[record.trial] = record;
  ack.cursor = session.cursor;
  ack.complete = session.complete();
  return ack;
}

}  // namespace pointing::study
