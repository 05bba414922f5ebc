#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "httplib.h"
#include "rxfeed/service.hpp"
#include "rxfeed/sim.hpp"

namespace rxfeed {

using nlohmann::json;

namespace {

struct Student {
  ProfileKind kind = ProfileKind::Lurker;
  const ProfileGroup* group = nullptr;
};

struct Arrival {
  DurationMs at;
  std::uint64_t order;  // tie-break for equal times
  std::size_t student;
  ReactionType kind;
};

// Explicit counts first, then the fill group takes the remaining active
// seats; everyone else enrolled is a lurker.
std::vector<Student> build_roster(const Scenario& s) {
  std::vector<Student> roster;
  const ProfileGroup* fill = nullptr;
  for (const auto& g : s.profiles) {
    if (g.fill) fill = &g;
    for (int i = 0; i < g.count; ++i) roster.push_back({g.kind, &g});
  }
  if (fill) {
    while (static_cast<int>(roster.size()) < s.active_count()) roster.push_back({fill->kind, fill});
  }
  while (static_cast<int>(roster.size()) < s.enrollment) roster.push_back({ProfileKind::Lurker, nullptr});
  return roster;
}

std::vector<Arrival> plan_arrivals(const Scenario& s, const std::vector<Student>& roster) {
  std::mt19937_64 rng(s.seed);
  std::vector<Arrival> out;
  std::uint64_t order = 0;
  const auto end = s.duration_ms();

  for (const auto& prompt : s.script) {
    for (std::size_t i = 0; i < roster.size(); ++i) {
      if (roster[i].kind != ProfileKind::Engaged) continue;
      const auto& p = roster[i].group->engaged;
      std::bernoulli_distribution reacts(p.react_prob);
      std::lognormal_distribution<double> delay(std::log(p.latency_median_ms), p.latency_sigma);
      if (!reacts(rng)) continue;
      const auto at = prompt.at + static_cast<DurationMs>(std::llround(delay(rng)));
      if (at < end) out.push_back({at, order++, i, prompt.kind});
    }
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (roster[i].kind != ProfileKind::Spammer) continue;
    const auto& p = roster[i].group->spammer;
    std::size_t k = 0;
    for (DurationMs at = p.start_offset; at < end; at += p.period, ++k) {
      out.push_back({at, order++, i, p.types[k % p.types.size()]});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Arrival& a, const Arrival& b) { return a.at != b.at ? a.at < b.at : a.order < b.order; });
  return out;
}

json trace_entry(const StreamEvent& ev) {
  json e{{"seq", ev.seq}, {"type", ev.type}};
  if (ev.type == "aggregate") {
    e["kind"] = ev.data.value("kind", "");
    e["count"] = ev.data.value("count", 0);
    e["play_haptic"] = ev.data.value("play_haptic", false);
    e["at"] = ev.data.value("emitted_at", 0);
  } else if (ev.type == "end") {
    e["at"] = ev.data.value("ended_at", 0);
  }
  return e;
}

std::string describe(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Engaged: return "engaged";
    case ProfileKind::Spammer: return "spammer";
    case ProfileKind::Lurker: return "lurker";
  }
  return "";
}

json model_json(const Scenario& s) {
  auto profiles = json::array();
  for (const auto& g : s.profiles) {
    json p{{"kind", describe(g.kind)}, {"count", g.count}, {"fill", g.fill}};
    if (g.kind == ProfileKind::Engaged) {
      p["react_prob"] = g.engaged.react_prob;
      p["latency_median_ms"] = g.engaged.latency_median_ms;
      p["latency_sigma"] = g.engaged.latency_sigma;
    } else if (g.kind == ProfileKind::Spammer) {
      auto types = json::array();
      for (auto t : g.spammer.types) types.push_back(to_string(t));
      p["period_ms"] = g.spammer.period;
      p["start_ms"] = g.spammer.start_offset;
      p["types"] = types;
    }
    profiles.push_back(p);
  }
  return {{"participation", "active_fraction is the share of enrolled students who ever use the system"},
          {"prompts", s.script.size()},
          {"profiles", profiles},
          {"moderation", s.moderation}};
}

json build_report(const Scenario& s, std::string_view mode, std::string_view clock,
                  const std::vector<Student>& roster, const std::vector<AnonUserId>& aliases,
                  const SessionRecord& record, const json& analytics, const json& trace) {
  std::map<AnonUserId, std::size_t> attempts, accepted, warned, banned;
  std::map<std::string, std::size_t> verdicts;
  for (auto kind : {VerdictKind::Accept, VerdictKind::RejectCooldown, VerdictKind::AcceptWithWarning,
                    VerdictKind::RejectBanned, VerdictKind::RejectCapReached}) {
    verdicts[std::string(to_string(kind))] = 0;
  }
  for (const auto& sub : record.submissions) {
    ++attempts[sub.user];
    ++verdicts[std::string(to_string(sub.verdict.kind))];
    if (sub.verdict.accepted()) ++accepted[sub.user];
  }
  for (const auto& ev : record.moderation) {
    ++(ev.action == ModerationAction::Warn ? warned : banned)[ev.user];
  }

  const auto total_accepted = record.accepted().size();
  std::set<AnonUserId> flagged;
  for (const auto& u : analytics.at("flags")) flagged.insert(u.get<std::string>());

  auto spammers = json::array();
  std::size_t spam_accepted = 0;
  bool any_spammer_flagged = false;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (roster[i].kind != ProfileKind::Spammer) continue;
    const auto& a = aliases[i];
    const auto acc = accepted[a];
    spam_accepted += acc;
    any_spammer_flagged = any_spammer_flagged || flagged.contains(a);
    spammers.push_back({{"alias", a},
                        {"attempts", attempts[a]},
                        {"accepted", acc},
                        {"warned", warned[a] > 0},
                        {"banned", banned[a] > 0},
                        // No submission is accepted after a ban.
                        {"accepted_before_ban", banned[a] > 0 ? json(acc) : json(nullptr)},
                        {"share", total_accepted ? static_cast<double>(acc) / total_accepted : 0.0},
                        {"flagged", flagged.contains(a)}});
  }

  return {{"scenario", s.name},
          {"seed", s.seed},
          {"mode", mode},
          {"clock", clock},
          {"model", model_json(s)},
          {"session_id", record.id.str()},
          {"enrollment", s.enrollment},
          {"active", s.active_count()},
          {"duration_ms", s.duration_ms()},
          {"submissions", record.submissions.size()},
          {"verdict_counts", verdicts},
          {"accepted", total_accepted},
          {"spammers", spammers},
          {"spammer_share", total_accepted ? static_cast<double>(spam_accepted) / total_accepted : 0.0},
          {"spammer_flagged", any_spammer_flagged},
          {"flagged_users", analytics.at("flags")},
          {"analytics", analytics},
          {"record_cumulative", distribution_json(cumulative_distribution(record.accepted()))},
          {"stream_trace", trace}};
}

ServiceConfig service_config_for(const Scenario& s) {
  ServiceConfig cfg;
  cfg.moderation = s.moderation;
  cfg.seed = s.seed;
  return cfg;
}

json run_in_process(const Scenario& s) {
  auto clock = std::make_shared<ManualClock>(0);
  SessionService service(service_config_for(s), clock);
  const auto roster = build_roster(s);
  const auto arrivals = plan_arrivals(s, roster);

  const auto created = service.create_session();
  std::vector<std::string> tokens;
  std::vector<AnonUserId> aliases;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    auto joined = service.join_session(created.id);
    tokens.push_back(std::move(joined.participant_token));
    aliases.push_back(std::move(joined.alias));
  }

  auto sub = service.open_stream(created.id, created.presenter_token, StreamRole::Presenter);
  auto trace = json::array();
  // Draining after every step keeps this subscriber from ever lagging.
  auto drain = [&] {
    for (;;) {
      auto item = sub->poll();
      if (item.status != Subscription::Status::Event) return;
      trace.push_back(trace_entry(item.event));
    }
  };

  for (const auto& a : arrivals) {
    clock->set(a.at);
    service.submit_reaction(created.id, tokens[a.student], a.kind);
    drain();
  }
  clock->set(std::max(clock->now(), s.duration_ms()));
  const auto record = service.end_session(created.id, created.presenter_token);
  drain();

  const json analytics = service.analytics(created.id, created.presenter_token);
  return build_report(s, "inprocess", "virtual", roster, aliases, record, analytics, trace);
}

// Minimal SSE reader: collects events until "end" or the connection drops.
class SseCollector {
 public:
  void feed(const char* data, std::size_t len) {
    buf_.append(data, len);
    for (std::size_t pos; (pos = buf_.find("\n\n")) != std::string::npos;) {
      parse_block(buf_.substr(0, pos));
      buf_.erase(0, pos + 2);
    }
  }
  bool ended() const { return ended_; }
  std::vector<StreamEvent> events() const {
    std::lock_guard lock(mu_);
    return events_;
  }

 private:
  void parse_block(const std::string& block) {
    StreamEvent ev;
    std::string data;
    bool has_event = false;
    std::size_t start = 0;
    while (start <= block.size()) {
      auto nl = block.find('\n', start);
      if (nl == std::string::npos) nl = block.size();
      const auto line = block.substr(start, nl - start);
      start = nl + 1;
      if (line.empty() || line[0] == ':') continue;
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      auto value = line.substr(colon + 1);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      const auto field = line.substr(0, colon);
      if (field == "id") ev.seq = std::stoull(value), has_event = true;
      if (field == "event") ev.type = value;
      if (field == "data") data += value;
    }
    if (!has_event) return;
    ev.data = json::parse(data, nullptr, false);
    std::lock_guard lock(mu_);
    if (ev.type == "end") ended_ = true;
    events_.push_back(std::move(ev));
  }

  std::string buf_;
  mutable std::mutex mu_;
  std::vector<StreamEvent> events_;
  std::atomic<bool> ended_{false};
};

json expect_json(const httplib::Result& res, int status, const std::string& what) {
  if (!res) throw Error(ErrorCode::Connection, what + ": " + httplib::to_string(res.error()));
  auto body = json::parse(res->body, nullptr, false);
  if (res->status != status || body.is_discarded()) {
    throw Error(ErrorCode::Io, what + ": HTTP " + std::to_string(res->status) + " " + res->body);
  }
  return body;
}

json run_http(const Scenario& s, const SimOptions& options) {
  if (options.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "http mode needs a base URL");
  httplib::Client client(options.base_url);
  client.set_connection_timeout(5);

  const auto roster = build_roster(s);
  const auto arrivals = plan_arrivals(s, roster);

  const auto created = expect_json(client.Post("/sessions"), 201, "create session");
  const auto id = created.at("session_id").get<std::string>();
  const auto presenter = created.at("presenter_token").get<std::string>();
  const httplib::Headers auth{{"Authorization", "Bearer " + presenter}};

  std::vector<std::string> tokens;
  std::vector<AnonUserId> aliases;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    auto joined = expect_json(client.Post("/sessions/" + id + "/join"), 200, "join");
    tokens.push_back(joined.at("participant_token").get<std::string>());
    aliases.push_back(joined.at("alias").get<std::string>());
  }

  SseCollector collector;
  std::atomic<bool> abandon{false};
  std::thread reader([&] {
    httplib::Client stream_client(options.base_url);
    stream_client.set_read_timeout(60);
    stream_client.Get("/sessions/" + id + "/stream?role=presenter", auth,
                      [&](const char* data, std::size_t len) {
                        collector.feed(data, len);
                        return !collector.ended() && !abandon;
                      });
  });

  const auto start = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<Error> failure;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < std::max<std::size_t>(1, options.http_workers); ++w) {
    workers.emplace_back([&] {
      httplib::Client c(options.base_url);
      for (std::size_t i; (i = next.fetch_add(1)) < arrivals.size();) {
        const auto& a = arrivals[i];
        std::this_thread::sleep_until(start + std::chrono::milliseconds(a.at));
        json body{{"participant_token", tokens[a.student]}, {"kind", to_string(a.kind)}};
        try {
          expect_json(c.Post("/sessions/" + id + "/reactions", body.dump(), "application/json"), 200, "submit");
        } catch (const Error& e) {
          std::lock_guard lock(err_mu);
          if (!failure) failure = e;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  std::this_thread::sleep_until(start + std::chrono::milliseconds(s.duration_ms()));

  std::optional<SessionRecord> record;
  try {
    record = record_from_json(expect_json(client.Delete("/sessions/" + id, auth), 200, "end session"));
  } catch (...) {
    // The reader notices at the next keepalive at the latest.
    abandon = true;
    reader.join();
    throw;
  }
  auto analytics = expect_json(client.Get("/sessions/" + id + "/analytics", auth), 200, "analytics");
  reader.join();
  if (failure) throw *failure;

  auto trace = json::array();
  for (const auto& ev : collector.events()) trace.push_back(trace_entry(ev));
  return build_report(s, "http", "wall", roster, aliases, *record, analytics, trace);
}

}  // namespace

json run_scenario(const Scenario& scenario, const SimOptions& options) {
  scenario.validate();
  return options.mode == SimMode::Http ? run_http(scenario, options) : run_in_process(scenario);
}

}  // namespace rxfeed
