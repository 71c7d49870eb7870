#pragma once

#include <string>

#include "pointing/study/service.hpp"

namespace httplib {
class Server;
}

namespace pointing::study {

/// Routes:
///   POST /api/sessions                      {"participant": "..."}
///   GET  /api/sessions/{token}/next
///   POST /api/sessions/{token}/responses    response body, see StudyService::submit
///   GET  /api/export                        text/csv
/// Errors are JSON {"error": <code>, "message": <text>} with 400 for bad
/// input, 404 for unknown sessions and 409 for protocol violations.
void register_routes(httplib::Server& server, StudyService& service);

/// Blocks serving on host:port until the process is stopped.
void serve_study(StudyService& service, const std::string& host, int port);

}  // namespace pointing::study
