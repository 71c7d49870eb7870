#include "pointing/study/service.hpp"

#include <cstdio>

#include "pointing/common/error.hpp"
#include "pointing/common/random.hpp"

namespace pointing::study {

using nlohmann::json;

namespace {

std::string hex_token(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json point(const TargetPoint& p) { return {p.x(), p.y(), p.z()}; }

ResponseRecord parse_response(const std::string& token, const json& body) {
  try {
    ResponseRecord r;
    r.session = token;
    r.trial = body.at("trial").get<int>();
    if (body.contains("rating") && !body.at("rating").is_null()) r.rating = body.at("rating").get<int>();
    if (body.contains("choice") && !body.at("choice").is_null()) r.choice = body.at("choice").get<int>();
    r.latency = body.value("latency", 0.0);
    r.motion_finished = body.value("motion_finished", false);
    r.timestamp = body.value("timestamp", std::string());
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema, std::string("response body: ") + e.what());
  }
}

}  // namespace

StudyService::StudyService(StudyConfig config, std::string store_path, std::optional<ClipSource> clips)
    : config_(std::move(config)), store_(std::move(store_path)), clips_(std::move(clips)) {
  config_.validate();
  for (const auto& e : store_.read()) {
    try {
      if (e.kind == StoreEvent::Kind::session) {
        if (by_token_.count(e.token)) throw Error(ErrorCode::schema, "duplicate session " + e.token);
        by_token_[e.token] = sessions_.size();
        sessions_.push_back(study::create_session(config_, e.participant, e.token));
      } else {
        submit_response(find(e.token), e.response);
      }
    } catch (const Error& err) {
      throw Error(ErrorCode::schema, "study store does not replay against this config: " + std::string(err.what()));
    }
  }
}

StudySession& StudyService::find(const std::string& token) {
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) throw Error(ErrorCode::not_found, "unknown session token '" + token + "'");
  return sessions_[it->second];
}

json StudyService::create_session(const std::string& participant) {
  std::lock_guard lock(mutex_);
  const std::uint64_t base = mix_seed(config_.seed, fnv1a(participant));
  std::uint64_t salt = sessions_.size();
  std::string token = hex_token(mix_seed(base, salt));
  while (by_token_.count(token)) token = hex_token(mix_seed(base, ++salt));
  StudySession s = study::create_session(config_, participant, token);
  store_.append_session(participant, token);
  by_token_[token] = sessions_.size();
  sessions_.push_back(std::move(s));
  const auto m = static_cast<int>(config_.models.size());
  return {{"token", token},
          {"participant", participant},
          {"total_trials", m * (config_.naturalness_trials + config_.accuracy_trials)},
          {"stage1_trials", m * config_.naturalness_trials},
          {"stage2_trials", m * config_.accuracy_trials}};
}

json StudyService::motion_payload(const Trial& trial) {
  if (!clips_) return nullptr;
  auto it = clip_cache_.find(trial.clip_ref);
  if (it == clip_cache_.end()) {
    it = clip_cache_.emplace(trial.clip_ref, clips_->generate(trial.model, trial.target, config_.motion_duration)).first;
  }
  const auto& clip = it->second;
  json frames = json::array();
  for (const auto& f : clip.frames) frames.push_back(std::vector<double>(f.q.data(), f.q.data() + f.q.size()));
  const auto& root = clip.frames.front();
  return {{"skeleton", clips_->skeleton.id()},
          {"joints", clips_->skeleton.dof_names()},
          {"fps", clip.fps},
          {"root_position", point(root.root_position)},
          {"root_orientation",
           {root.root_orientation.w(), root.root_orientation.x(), root.root_orientation.y(), root.root_orientation.z()}},
          {"frames", frames}};
}

json StudyService::next(const std::string& token) {
  std::lock_guard lock(mutex_);
  StudySession& s = find(token);
  if (s.complete()) return {{"done", true}, {"total_trials", s.schedule.size()}};
  const Trial& t = next_trial(s);
  json j = {{"done", false},
            {"session", s.token},
            {"trial", t.index},
            {"total_trials", s.schedule.size()},
            {"stage", t.stage},
            {"clip_ref", t.clip_ref},
            {"motion", motion_payload(t)}};
  if (t.stage == 2) {
    json cands = json::array();
    for (const auto& c : t.candidates) cands.push_back(point(c));
    j["candidates"] = cands;
    j["condition"] = t.condition;
  }
  return j;
}

json StudyService::submit(const std::string& token, const json& body) {
  std::lock_guard lock(mutex_);
  StudySession& s = find(token);
  const ResponseRecord r = parse_response(token, body);
  const SubmitAck ack = submit_response(s, r);
  store_.append_response(r);
  return {{"accepted", true}, {"duplicate", ack.duplicate}, {"cursor", ack.cursor}, {"complete", ack.complete}};
}

std::vector<analysis::ExportRecord> export_records(const std::vector<StudySession>& sessions) {
  std::vector<analysis::ExportRecord> out;
  for (const auto& s : sessions) {
    for (const auto& [trial, response] : s.responses) {
      const Trial& t = s.schedule[static_cast<std::size_t>(trial)];
      analysis::ExportRecord r;
      r.participant = s.participant;
      r.session = s.token;
      r.model = t.model;
      r.stage = t.stage;
      r.condition = t.stage == 2 ? t.condition : analysis::kConditionNone;
      r.trial = t.index;
      r.value = response_value(t, response);
      r.complete = s.complete();
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<analysis::ExportRecord> StudyService::export_records() const {
  std::lock_guard lock(mutex_);
  return study::export_records(sessions_);
}

StudySession StudyService::session(const std::string& token) const {
  std::lock_guard lock(mutex_);
  const auto it = by_token_.find(token);
  if (it == by_token_.end()) throw Error(ErrorCode::not_found, "unknown session token '" + token + "'");
  return sessions_[it->second];
}

std::vector<std::string> StudyService::tokens() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& s : sessions_) out.push_back(s.token);
  return out;
}

std::vector<analysis::ExportRecord> export_store(const StudyConfig& config, const std::string& store_path) {
  return StudyService(config, store_path).export_records();
}

}  // namespace pointing::study
