#include "pointing/study/store.hpp"

#include <fstream>
#include <json.hpp>

#include "pointing/common/error.hpp"

namespace pointing::study {

using nlohmann::json;

std::string encode_event(const StoreEvent& event) {
  json j;
  if (event.kind == StoreEvent::Kind::session) {
    j = {{"event", "session"}, {"participant", event.participant}, {"token", event.token}};
  } else {
    const auto& r = event.response;
    j = {{"event", "response"},  {"token", r.session},         {"trial", r.trial},
         {"latency", r.latency}, {"timestamp", r.timestamp}, {"motion_finished", r.motion_finished}};
    if (r.rating) j["rating"] = *r.rating;
    if (r.choice) j["choice"] = *r.choice;
  }
  return j.dump();
}

StoreEvent decode_event(const std::string& line) {
  const json j = json::parse(line);
  StoreEvent e;
  const auto kind = j.at("event").get<std::string>();
  e.token = j.at("token").get<std::string>();
  if (kind == "session") {
    e.kind = StoreEvent::Kind::session;
    e.participant = j.at("participant").get<std::string>();
  } else if (kind == "response") {
    e.kind = StoreEvent::Kind::response;
    auto& r = e.response;
    r.session = e.token;
    r.trial = j.at("trial").get<int>();
    r.latency = j.at("latency").get<double>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.motion_finished = j.at("motion_finished").get<bool>();
    if (j.contains("rating")) r.rating = j.at("rating").get<int>();
    if (j.contains("choice")) r.choice = j.at("choice").get<int>();
  } else {
    throw Error(ErrorCode::schema, "unknown event '" + kind + "'");
  }
  return e;
}

StudyStore::StudyStore(std::string path) : path_(std::move(path)) {}

void StudyStore::append(const std::string& line) {
  if (path_.empty()) return;
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot append to study store " + path_);
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::io, "write failed for study store " + path_);
}

void StudyStore::append_session(const std::string& participant, const std::string& token) {
  StoreEvent e;
  e.kind = StoreEvent::Kind::session;
  e.participant = participant;
  e.token = token;
  append(encode_event(e));
}

void StudyStore::append_response(const ResponseRecord& record) {
  StoreEvent e;
  e.kind = StoreEvent::Kind::response;
  e.token = record.session;
  e.response = record;
  append(encode_event(e));
}

std::vector<StoreEvent> StudyStore::read() const {
  std::vector<StoreEvent> out;
  if (path_.empty()) return out;
  std::lock_guard lock(mutex_);
  std::ifstream in(path_, std::ios::binary);
  if (!in) return out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(decode_event(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::schema, "corrupt study store " + path_ + " line " + std::to_string(line_no) + ": " +
                                         e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::schema, "corrupt study store " + path_ + " line " + std::to_string(line_no) + ": " +
                                         e.what());
    }
  }
  return out;
}

}  // namespace pointing::study
