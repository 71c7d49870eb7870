#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <thread>

#include "pointing/common/error.hpp"
#include "pointing/deixis/samplers.hpp"
#include "pointing/study/http_server.hpp"
#include "pointing/study/service.hpp"
#include "support.hpp"

// Last: the resolver header pulled in here defines a macro that breaks Eigen.
#include <httplib.h>

using namespace pointing;
using namespace pointing::study;
using nlohmann::json;

namespace {

StudyConfig four_model_config() {
  const auto range = deixis::fit_half_cylinder(test::fixture_targets(), dataset::default_root_position());
  StudyConfig cfg;
  cfg.models = {"m_a", "m_b", "m_c", "m_d"};
  cfg.pool = deixis::sample_test_targets(range, 30, 11);
  cfg.distractor_range = range;
  cfg.anchor = dataset::default_root_position();
  cfg.seed = 3;
  return cfg;
}

std::string temp_path(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p.string();
}

ResponseRecord answer(const StudySession& s, const Trial& t, bool correct = true) {
  ResponseRecord r;
  r.session = s.token;
  r.trial = t.index;
  if (t.stage == 1) {
    r.rating = 1 + t.index % 5;
  } else {
    r.choice = correct ? t.target_slot : (t.target_slot + 1) % 3;
    r.motion_finished = true;
  }
  r.latency = 1.5;
  return r;
}

json answer_json(const json& trial) {
  json body = {{"trial", trial["trial"]}, {"latency", 0.8}, {"motion_finished", true}};
  if (trial["stage"] == 1)
    body["rating"] = 4;
  else
    body["choice"] = 0;
  return body;
}

}  // namespace

TEST_CASE("session schedule structure") {
  const auto cfg = four_model_config();
  const auto s = create_session(cfg, "alice", "tok");
  REQUIRE(s.schedule.size() == 60);
  std::map<std::string, int> stage1, stage2;
  std::map<std::string, std::map<std::string, int>> conds;
  for (std::size_t i = 0; i < s.schedule.size(); ++i) {
    const auto& t = s.schedule[i];
    CHECK(t.index == static_cast<int>(i));
    CHECK(t.stage == (i < 20 ? 1 : 2));
    (t.stage == 1 ? stage1 : stage2)[t.model]++;
    if (t.stage == 2) {
      conds[t.model][t.condition]++;
      REQUIRE(t.candidates.size() == 3);
      CHECK(t.candidates[static_cast<std::size_t>(t.target_slot)] == t.target);
      for (int c = 0; c < 3; ++c) {
        if (c == t.target_slot) continue;
        const double d = (t.candidates[static_cast<std::size_t>(c)] - t.target).norm();
        CHECK(d >= deixis::kDistractorMin);
        CHECK(d <= deixis::kDistractorMax);
      }
    }
  }
  for (const auto& m : cfg.models) {
    CHECK(stage1[m] == 5);
    CHECK(stage2[m] == 10);
    CHECK(conds[m]["across"] == 5);
    CHECK(conds[m]["side-by-side"] == 5);
  }

  // Every model sees the same positions, and the same distractors per position.
  std::map<std::string, std::set<int>> pos1, pos2;
  std::map<int, std::set<std::vector<double>>> distractor_sets;
  for (const auto& t : s.schedule) {
    (t.stage == 1 ? pos1 : pos2)[t.model].insert(t.position);
    if (t.stage == 2) {
      std::vector<double> flat;
      std::vector<std::array<double, 3>> ds;
      for (int c = 0; c < 3; ++c)
        if (c != t.target_slot) {
          const auto& p = t.candidates[static_cast<std::size_t>(c)];
          ds.push_back({p.x(), p.y(), p.z()});
        }
      std::sort(ds.begin(), ds.end());
      for (const auto& d : ds) flat.insert(flat.end(), d.begin(), d.end());
      distractor_sets[t.position].insert(flat);
    }
  }
  for (const auto& m : cfg.models) {
    CHECK(pos1[m] == pos1[cfg.models[0]]);
    CHECK(pos2[m] == pos2[cfg.models[0]]);
    CHECK(pos1[m].size() == 5);
  }
  for (const auto& [pos, sets] : distractor_sets) CHECK(sets.size() == 1);

  const auto again = create_session(cfg, "alice", "tok");
  for (std::size_t i = 0; i < 60; ++i) {
    CHECK(again.schedule[i].model == s.schedule[i].model);
    CHECK(again.schedule[i].position == s.schedule[i].position);
    CHECK(again.schedule[i].candidates == s.schedule[i].candidates);
  }
  const auto bob = create_session(cfg, "bob", "tok2");
  bool differs = false;
  for (std::size_t i = 0; i < 60; ++i) differs = differs || bob.schedule[i].position != s.schedule[i].position;
  CHECK(differs);
  CHECK_THROWS_AS(create_session(cfg, "", "t"), Error);
}

TEST_CASE("protocol violations are rejected") {
  const auto cfg = four_model_config();
  auto s = create_session(cfg, "carol", "tok");
  auto r = answer(s, next_trial(s));
  r.trial = 5;
  CHECK_THROWS_AS(submit_response(s, r), Error);
  r = answer(s, next_trial(s));
  r.rating = 6;
  try {
    submit_response(s, r);
    FAIL("rating 6 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
  r.rating = 0;
  CHECK_THROWS_AS(submit_response(s, r), Error);
  r = answer(s, next_trial(s));
  r.choice = 1;
  CHECK_THROWS_AS(submit_response(s, r), Error);
  CHECK(s.cursor == 0);

  while (next_trial(s).stage == 1) submit_response(s, answer(s, next_trial(s)));
  CHECK(s.cursor == 20);
  r = answer(s, next_trial(s));
  r.motion_finished = false;
  try {
    submit_response(s, r);
    FAIL("early selection accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::protocol);
  }
  r = answer(s, next_trial(s));
  r.choice = 3;
  CHECK_THROWS_AS(submit_response(s, r), Error);

  // Resubmitting an earlier trial overwrites it with an audit entry.
  auto redo = answer(s, s.schedule[3]);
  redo.rating = 2;
  const auto ack = submit_response(s, redo);
  CHECK(ack.duplicate);
  CHECK(ack.cursor == 20);
  CHECK(s.responses.at(3).rating == 2);
  CHECK(s.audit.size() == 1);

  while (!s.complete()) submit_response(s, answer(s, next_trial(s)));
  CHECK_THROWS_AS(next_trial(s), Error);
}

TEST_CASE("response values") {
  const auto cfg = four_model_config();
  const auto s = create_session(cfg, "dave", "tok");
  const auto& t2 = s.schedule[25];
  CHECK(response_value(t2, answer(s, t2, true)) == 1.0);
  CHECK(response_value(t2, answer(s, t2, false)) == 0.0);
  const auto& t1 = s.schedule[2];
  CHECK(response_value(t1, answer(s, t1)) == static_cast<double>(1 + 2 % 5));
}

TEST_CASE("config parsing") {
  const auto cfg = parse_study_config(
      R"({"models":["a","b"],"naturalness_trials":1,"accuracy_trials":2,"pool":[[0.3,1.4,0.8],[0.0,1.6,0.9],[0.6,1.2,0.7]],"anchor":[0,1.4,0],"seed":9})");
  CHECK(cfg.models.size() == 2);
  CHECK(cfg.seed == 9);
  CHECK(cfg.pool[1] == TargetPoint(0.0, 1.6, 0.9));
  CHECK(cfg.distractor_range.contains(cfg.pool[2]));
  CHECK_THROWS_AS(parse_study_config(R"({"models":[],"pool":[[0,0,1]]})"), Error);
  CHECK_THROWS_AS(parse_study_config(R"({"models":["a"],"pool":[[0,0]]})"), Error);
  CHECK_THROWS_AS(parse_study_config("not json"), Error);
  CHECK(fnv1a("") == 2166136261u);
  CHECK(fnv1a("a") == 0xe40c292cu);
}

TEST_CASE("service replays its store after a restart") {
  const auto cfg = four_model_config();
  const auto path = temp_path("pointing_study_store.jsonl");
  std::string token;
  {
    StudyService svc(cfg, path);
    CHECK(svc.export_records().empty());
    token = svc.create_session("erin")["token"].get<std::string>();
    for (int k = 0; k < 25; ++k) {
      const auto trial = svc.next(token);
      svc.submit(token, answer_json(trial));
    }
    CHECK(svc.export_records().size() == 25);
  }
  StudyService restarted(cfg, path);
  CHECK(restarted.tokens() == std::vector<std::string>{token});
  CHECK(restarted.session(token).cursor == 25);
  CHECK(restarted.next(token)["trial"] == 25);
  const auto records = restarted.export_records();
  CHECK(records.size() == 25);
  CHECK(records[0].participant == "erin");
  CHECK_FALSE(records[0].complete);
  CHECK(export_store(cfg, path).size() == 25);

  std::ofstream(path, std::ios::app) << "{broken\n";
  CHECK_THROWS_AS(StudyService(cfg, path), Error);
  std::filesystem::remove(path);
}

TEST_CASE("completed sessions report done and serve shared clips") {
  auto cfg = four_model_config();
  int generated = 0;
  ClipSource source{motion::toy_arm(), [&](const std::string&, const TargetPoint& t, double duration) {
                      ++generated;
                      auto c = test::still_clip(motion::toy_arm(),
                                                motion::JointState::rest(motion::toy_arm(), dataset::default_root_position()),
                                                static_cast<int>(std::lround(duration * 30)));
                      c.target = t;
                      return c;
                    }};
  StudyService svc(cfg, "", source);
  const auto a = svc.create_session("fay")["token"].get<std::string>();
  const auto b = svc.create_session("fay")["token"].get<std::string>();
  CHECK(a != b);
  const auto first = svc.next(a);
  CHECK(first["motion"]["frames"].size() == 105);
  CHECK(first["motion"]["skeleton"] == "toy_arm");
  svc.next(a);
  CHECK(generated == 1);
  svc.next(b);
  CHECK(generated == 1);
  while (true) {
    const auto t = svc.next(a);
    if (t["done"].get<bool>()) break;
    if (t["stage"] == 2) {
      CHECK(t.contains("candidates"));
      CHECK_FALSE(t.contains("target_slot"));
    }
    const auto ack = svc.submit(a, answer_json(t));
    CHECK(ack["accepted"] == true);
  }
  CHECK(svc.next(a)["done"] == true);
  CHECK(svc.session(a).complete());
  const auto rec = svc.export_records();
  CHECK(rec.size() == 60);
  CHECK(rec[0].complete);
  CHECK_THROWS_AS(svc.next("nope"), Error);
}

TEST_CASE("http endpoints") {
  const auto cfg = four_model_config();
  StudyService svc(cfg, "");
  httplib::Server server;
  register_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Post("/api/sessions", R"({"participant":"gil"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const auto created = json::parse(res->body);
  CHECK(created["total_trials"] == 60);
  CHECK(created["stage1_trials"] == 20);
  const std::string token = created["token"];

  res = cli.Get("/api/sessions/" + token + "/next");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto trial = json::parse(res->body);
  CHECK(trial["stage"] == 1);
  CHECK(trial["trial"] == 0);

  res = cli.Post("/api/sessions/" + token + "/responses", answer_json(trial).dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["cursor"] == 1);

  json out_of_order = {{"trial", 7}, {"rating", 3}, {"latency", 1.0}};
  res = cli.Post("/api/sessions/" + token + "/responses", out_of_order.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["error"].is_string());

  json bad_rating = {{"trial", 1}, {"rating", 6}, {"latency", 1.0}};
  res = cli.Post("/api/sessions/" + token + "/responses", bad_rating.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Post("/api/sessions/" + token + "/responses", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  res = cli.Get("/api/sessions/unknown/next");
  REQUIRE(res);
  CHECK(res->status == 404);

  res = cli.Get("/api/export");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.rfind(analysis::kExportHeader, 0) == 0);
  CHECK(std::count(res->body.begin(), res->body.end(), '\n') == 2);

  server.stop();
  worker.join();
}
