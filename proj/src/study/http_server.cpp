#include "pointing/study/http_server.hpp"

#include <httplib.h>

#include <sstream>

#include "pointing/common/error.hpp"

namespace pointing::study {

using nlohmann::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::protocol: return 409;
    case ErrorCode::io: return 500;
    default: return 400;
  }
}

template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    res.status = status_for(e.code());
    res.set_content(json{{"error", to_string(e.code())}, {"message", e.what()}}.dump(), "application/json");
  } catch (const json::exception& e) {
    res.status = 400;
    res.set_content(json{{"error", "schema error"}, {"message", e.what()}}.dump(), "application/json");
  }
}

}  // namespace

void register_routes(httplib::Server& server, StudyService& service) {
  server.Post("/api/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = json::parse(req.body);
      const json out = service.create_session(body.at("participant").get<std::string>());
      res.status = 201;
      res.set_content(out.dump(), "application/json");
    });
  });
  server.Get(R"(/api/sessions/([0-9a-zA-Z_-]+)/next)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(service.next(req.matches[1]).dump(), "application/json"); });
  });
  server.Post(R"(/api/sessions/([0-9a-zA-Z_-]+)/responses)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json out = service.submit(req.matches[1], json::parse(req.body));
                  res.set_content(out.dump(), "application/json");
                });
              });
  server.Get("/api/export", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      std::ostringstream out;
      const auto records = service.export_records();
      analysis::write_export_csv(out, records);
      res.set_content(out.str(), "text/csv");
    });
  });
}

void serve_study(StudyService& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  if (!server.listen(host, port)) throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace pointing::study
