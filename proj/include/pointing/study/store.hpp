#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "pointing/study/session.hpp"

namespace pointing::study {

/// One line of the append-only study log.
struct StoreEvent {
  enum class Kind { session, response };
  Kind kind = Kind::session;
  std::string participant;  // session events
  std::string token;
  ResponseRecord response;  // response events
};

/// JSON-lines log of session creations and accepted responses. Each append
/// is flushed before returning. An empty path keeps nothing on disk.
class StudyStore {
 public:
  explicit StudyStore(std::string path = {});

  void append_session(const std::string& participant, const std::string& token);
  void append_response(const ResponseRecord& record);

  /// All events in append order. Throws Error(schema) naming the line for a
  /// corrupt log; a missing file reads as empty.
  std::vector<StoreEvent> read() const;
  const std::string& path() const { return path_; }

 private:
  void append(const std::string& line);

  std::string path_;
  mutable std::mutex mutex_;
};

std::string encode_event(const StoreEvent& event);
StoreEvent decode_event(const std::string& line);

}  // namespace pointing::study
