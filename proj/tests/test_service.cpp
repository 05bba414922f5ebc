#include <filesystem>
#include <set>
#include <thread>
#include <unistd.h>

#include "doctest.h"
#include "rxfeed/service.hpp"

using namespace rxfeed;
using namespace std::chrono_literals;

namespace {

struct Fixture {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>(0);
  ServiceConfig cfg;
  std::unique_ptr<SessionService> svc;

  explicit Fixture(ServiceConfig c = {}) : cfg(std::move(c)) { svc = std::make_unique<SessionService>(cfg, clock); }
};

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

std::vector<StreamEvent> drain(Subscription& sub) {
  std::vector<StreamEvent> out;
  for (;;) {
    auto item = sub.poll();
    if (item.status != Subscription::Status::Event) return out;
    out.push_back(std::move(item.event));
  }
}

}  // namespace

TEST_CASE("create, join, submit, end") {
  Fixture f;
  const auto s = f.svc->create_session();
  CHECK(SessionId::is_valid(s.id.str()));
  CHECK(s.presenter_token.size() == 32);
  const auto a = f.svc->join_session(s.id);
  const auto b = f.svc->join_session(s.id);
  CHECK(a.alias == "u0001");
  CHECK(b.alias == "u0002");
  CHECK(a.participant_token != b.participant_token);
  CHECK(f.svc->participant_count(s.id) == 2);

  auto r1 = f.svc->submit_reaction(s.id, a.participant_token, ReactionType::Confused);
  CHECK(r1.verdict.kind == VerdictKind::Accept);
  REQUIRE(r1.event.has_value());
  CHECK(r1.event->count == 1);
  CHECK(r1.event->play_haptic);
  CHECK(r1.cooldown_remaining_ms == 20'000);

  f.clock->set(3'000);
  auto r2 = f.svc->submit_reaction(s.id, b.participant_token, ReactionType::Confused);
  CHECK(r2.event->count == 2);
  CHECK_FALSE(r2.event->play_haptic);

  auto r3 = f.svc->submit_reaction(s.id, a.participant_token, ReactionType::Confused);
  CHECK(r3.verdict.kind == VerdictKind::RejectCooldown);
  CHECK(r3.cooldown_remaining_ms == 17'000);
  CHECK_FALSE(r3.event.has_value());

  f.clock->set(60'000);
  const auto rec = f.svc->end_session(s.id, s.presenter_token);
  CHECK(rec.ended_at == 60'000);
  CHECK(rec.submissions.size() == 3);
  CHECK(rec.accepted().size() == 2);
  REQUIRE(rec.windows.size() == 1);
  CHECK(rec.windows[0].count == 2);
  CHECK(f.svc->status(s.id) == SessionStatus::Ended);

  // Idempotent end, and the session refuses new work.
  f.clock->set(70'000);
  CHECK(f.svc->end_session(s.id, s.presenter_token).ended_at == 60'000);
  CHECK(code_of([&] { f.svc->join_session(s.id); }) == ErrorCode::SessionEnded);
  CHECK(code_of([&] { f.svc->submit_reaction(s.id, a.participant_token, ReactionType::HandRaise); }) ==
        ErrorCode::SessionEnded);
  CHECK(f.svc->analytics(s.id, s.presenter_token).computed_at == 60'000);
}

TEST_CASE("errors: unknown session, foreign tokens, presenter auth") {
  Fixture f;
  const auto s1 = f.svc->create_session();
  const auto s2 = f.svc->create_session();
  CHECK(s1.id != s2.id);
  const auto p = f.svc->join_session(s1.id);

  CHECK(code_of([&] { f.svc->join_session(SessionId("ZZZZZZ")); }) == ErrorCode::SessionNotFound);
  CHECK(code_of([&] { f.svc->submit_reaction(s2.id, p.participant_token, ReactionType::HandRaise); }) ==
        ErrorCode::Unauthorized);
  CHECK(code_of([&] { f.svc->submit_reaction(s1.id, "nope", ReactionType::HandRaise); }) == ErrorCode::Unauthorized);
  CHECK(code_of([&] { f.svc->end_session(s1.id, s2.presenter_token); }) == ErrorCode::Unauthorized);
  CHECK(code_of([&] { f.svc->open_stream(s1.id, p.participant_token, StreamRole::Presenter); }) ==
        ErrorCode::Unauthorized);
  CHECK(code_of([&] { f.svc->analytics(s1.id, ""); }) == ErrorCode::Unauthorized);
}

TEST_CASE("id collisions retry, then give up") {
  ServiceConfig cfg;
  cfg.id_retries = 3;
  Fixture f(cfg);
  int calls = 0;
  f.svc->set_id_source([&] {
    ++calls;
    return SessionId(calls < 3 ? "AAAAAA" : "BBBBBB");
  });
  CHECK(f.svc->create_session().id.str() == "AAAAAA");
  CHECK(f.svc->create_session().id.str() == "BBBBBB");  // second draw collided
  CHECK(code_of([&] { f.svc->create_session(); }) == ErrorCode::ServiceUnavailable);
  CHECK(f.svc->session_count() == 2);
}

TEST_CASE("ids of persisted sessions are not reused") {
  const auto dir = std::filesystem::temp_directory_path() / ("rxfeed-svc-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  ServiceConfig cfg;
  cfg.data_dir = dir.string();
  {
    Fixture f(cfg);
    f.svc->set_id_source([] { return SessionId("PERSIS"); });
    const auto s = f.svc->create_session();
    f.svc->end_session(s.id, s.presenter_token);
    CHECK(std::filesystem::exists(dir / "PERSIS.jsonl"));
  }
  {
    Fixture f(cfg);
    f.svc->set_id_source([] { return SessionId("PERSIS"); });
    CHECK(code_of([&] { f.svc->create_session(); }) == ErrorCode::ServiceUnavailable);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("join throttle") {
  ServiceConfig cfg;
  cfg.join_throttle_per_min = 3;
  Fixture f(cfg);
  const auto s = f.svc->create_session();
  for (int i = 0; i < 3; ++i) f.svc->join_session(s.id);
  CHECK(code_of([&] { f.svc->join_session(s.id); }) == ErrorCode::ServiceUnavailable);
  f.clock->set(60'000);
  CHECK_NOTHROW(f.svc->join_session(s.id));
}

TEST_CASE("presenter and researcher streams") {
  Fixture f;
  const auto s = f.svc->create_session();
  auto presenter = f.svc->open_stream(s.id, s.presenter_token, StreamRole::Presenter);
  auto researcher = f.svc->open_stream(s.id, s.presenter_token, StreamRole::Researcher);
  const auto p = f.svc->join_session(s.id);

  for (int i = 0; i < 5; ++i) {
    f.clock->set(i * 20'000);
    f.svc->submit_reaction(s.id, p.participant_token, ReactionType::HandRaise);
  }
  f.clock->set(100'000);
  CHECK(f.svc->submit_reaction(s.id, p.participant_token, ReactionType::HandRaise).verdict.kind ==
        VerdictKind::RejectBanned);
  f.svc->end_session(s.id, s.presenter_token);

  const auto pe = drain(*presenter);
  REQUIRE(pe.size() == 6);  // 5 accepted + end
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(pe[i].type == "aggregate");
    CHECK(pe[i].data["play_haptic"] == true);  // 20 s apart: a new window each time
    // Presenter payloads carry no user identity.
    CHECK_FALSE(pe[i].data.contains("user"));
  }
  CHECK(pe[5].type == "end");
  CHECK(pe[5].data["reason"] == "session_ended");

  const auto re = drain(*researcher);
  std::multiset<std::string> types;
  for (const auto& e : re) types.insert(e.type);
  CHECK(types.count("reaction") == 5);
  CHECK(types.count("aggregate") == 5);
  CHECK(types.count("moderation") == 2);
  CHECK(types.count("end") == 1);
  for (const auto& e : re) {
    if (e.type == "reaction") CHECK(e.data["user"] == "u0001");
    if (e.type == "reaction") CHECK_FALSE(e.data.contains("participant_token"));
  }
  for (std::size_t i = 0; i < re.size(); ++i) CHECK(re[i].seq == i + 1);
}

TEST_CASE("tokens never reach records or streams") {
  Fixture f;
  const auto s = f.svc->create_session();
  const auto p = f.svc->join_session(s.id);
  auto researcher = f.svc->open_stream(s.id, s.presenter_token, StreamRole::Researcher);
  f.svc->submit_reaction(s.id, p.participant_token, ReactionType::Confident);
  const auto rec = f.svc->end_session(s.id, s.presenter_token);
  const auto text = to_jsonl(rec);
  CHECK(text.find(p.participant_token) == std::string::npos);
  CHECK(text.find(s.presenter_token) == std::string::npos);
  for (const auto& e : drain(*researcher)) {
    CHECK(e.data.dump().find(p.participant_token) == std::string::npos);
  }
}

TEST_CASE("seeded services are reproducible") {
  ServiceConfig cfg;
  cfg.seed = 7;
  Fixture a(cfg), b(cfg);
  const auto sa = a.svc->create_session();
  const auto sb = b.svc->create_session();
  CHECK(sa.id == sb.id);
  CHECK(sa.presenter_token == sb.presenter_token);
  CHECK(a.svc->join_session(sa.id).participant_token == b.svc->join_session(sb.id).participant_token);
}

TEST_CASE("live analytics") {
  Fixture f;
  const auto s = f.svc->create_session();
  const auto p = f.svc->join_session(s.id);
  const auto q = f.svc->join_session(s.id);
  f.svc->submit_reaction(s.id, p.participant_token, ReactionType::HandRaise);
  f.clock->set(1'000);
  f.svc->submit_reaction(s.id, q.participant_token, ReactionType::Confused);
  f.clock->set(2'000);
  f.svc->submit_reaction(s.id, q.participant_token, ReactionType::Confused);  // cooldown: not counted
  const auto a = f.svc->analytics(s.id, s.presenter_token);
  CHECK(a.computed_at == 2'000);
  CHECK(a.cumulative[0] == 1);
  CHECK(a.cumulative[1] == 1);
  CHECK(a.shares.size() == 2);
  CHECK(a.log.front().kind == ReactionType::Confused);
}

TEST_CASE("concurrent submissions across sessions") {
  ServiceConfig cfg;
  cfg.moderation.escalation = Escalation::Off;
  SessionService svc(cfg);
  std::vector<CreatedSession> sessions;
  std::vector<std::vector<std::string>> tokens(4);
  for (int i = 0; i < 4; ++i) {
    sessions.push_back(svc.create_session());
    for (int j = 0; j < 200; ++j) tokens[i].push_back(svc.join_session(sessions[i].id).participant_token);
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      const int i = t % 4;
      for (int j = (t / 4) * 100; j < (t / 4 + 1) * 100; ++j) {
        for (auto kind : kReactionTypes) svc.submit_reaction(sessions[i].id, tokens[i][j], kind);
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < 4; ++i) {
    const auto rec = svc.end_session(sessions[i].id, sessions[i].presenter_token);
    CHECK(rec.accepted().size() == 600);
    std::uint64_t sum = 0;
    for (const auto& w : rec.windows) sum += w.count;
    CHECK(sum == 600);
  }
}

TEST_CASE("manual clock refuses to go backwards") {
  ManualClock c(10);
  c.advance(5);
  CHECK(c.now() == 15);
  CHECK_THROWS_AS(c.set(14), Error);
  CHECK(parse_stream_role("researcher") == StreamRole::Researcher);
  CHECK_FALSE(parse_stream_role("student").has_value());
}
