// Release gate: one PASS/FAIL line per requirement, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "httplib.h"
#include "rxfeed/aggregation.hpp"
#include "rxfeed/borda.hpp"
#include "rxfeed/http_server.hpp"
#include "rxfeed/moderation.hpp"
#include "rxfeed/quiz.hpp"
#include "rxfeed/service.hpp"
#include "rxfeed/sim.hpp"

using namespace rxfeed;
using nlohmann::json;
using Clock_ = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failed expectation; later ones are ignored.
struct Checker {
  Outcome out;
  void expect(bool cond, const std::string& what) {
    if (!cond && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

double seconds_since(Clock_::time_point start) {
  return std::chrono::duration<double>(Clock_::now() - start).count();
}

const SessionId kSession{"TEST01"};

// ---------------------------------------------------------------------------

Outcome aggregation_conservation() {
  Checker c;
  const auto start = Clock_::now();
  std::mt19937_64 rng(20240601);
  std::size_t total_reactions = 0;
  for (int stream = 0; stream < 1000 && c.out.pass; ++stream) {
    const auto n = std::uniform_int_distribution<int>(0, 500)(rng);
    const auto types = std::uniform_int_distribution<int>(1, 3)(rng);
    const auto users = std::uniform_int_distribution<int>(1, 50)(rng);
    std::uniform_int_distribution<TimestampMs> gap(0, 6'000);

    AggregationEngine engine(kSession);
    // Oracle: per type, the open window start; a reaction at t opens a new
    // window iff there is none or t >= start + 10,000.
    std::array<std::optional<TimestampMs>, 3> oracle_open{};
    std::map<std::pair<int, TimestampMs>, std::uint32_t> oracle_windows;
    std::map<std::pair<int, TimestampMs>, int> haptics;

    TimestampMs t = 0;
    for (int i = 0; i < n; ++i) {
      t += gap(rng);
      const auto kind = kReactionTypes[std::uniform_int_distribution<int>(0, types - 1)(rng)];
      const auto user = "u" + std::to_string(std::uniform_int_distribution<int>(1, users)(rng));
      const auto k = static_cast<int>(index_of(kind));
      auto& open = oracle_open[k];
      if (!open || t >= *open + kDefaultWindowLen) open = t;
      ++oracle_windows[{k, *open}];

      engine.expire_windows(t);
      const auto ev = engine.ingest({kSession, user, kind, t}, t);
      if (ev.play_haptic) ++haptics[{k, ev.window_opened_at}];
      c.expect(ev.count == oracle_windows[{k, *open}] && ev.window_opened_at == *open,
               "stream " + std::to_string(stream) + ": emitted count/window differs from oracle");
    }
    engine.finish();
    total_reactions += n;

    std::uint64_t sum = 0;
    std::map<std::pair<int, TimestampMs>, std::uint32_t> engine_windows;
    for (const auto& w : engine.closed_windows()) {
      sum += w.count;
      engine_windows[{static_cast<int>(index_of(w.kind)), w.opened_at}] = w.count;
    }
    c.expect(sum == static_cast<std::uint64_t>(n), "stream " + std::to_string(stream) + ": window sum != accepted");
    c.expect(engine_windows == oracle_windows, "stream " + std::to_string(stream) + ": windows differ from oracle");
    bool one_each = haptics.size() == oracle_windows.size();
    for (const auto& [key, h] : haptics) one_each = one_each && h == 1 && oracle_windows.contains(key);
    c.expect(one_each, "stream " + std::to_string(stream) + ": play_haptic not exactly once per window");
  }
  const auto secs = seconds_since(start);
  c.expect(secs < 10.0, "runtime " + std::to_string(secs) + " s");
  if (c.out.pass) {
    std::ostringstream os;
    os << "1000 streams, " << total_reactions << " reactions, " << secs << " s";
    c.out.detail = os.str();
  }
  return c.out;
}

Outcome window_semantics() {
  Checker c;
  AggregationEngine engine(kSession);
  const TimestampMs times[] = {0, 5'000, 12'000};
  const std::uint32_t counts[] = {1, 2, 1};
  const bool haptic[] = {true, false, true};
  const TimestampMs opened[] = {0, 0, 12'000};
  std::ostringstream os;
  for (int i = 0; i < 3; ++i) {
    engine.expire_windows(times[i]);
    const auto ev = engine.ingest({kSession, "u1", ReactionType::HandRaise, times[i]}, times[i]);
    os << "t=" << times[i] << ":" << ev.count << (ev.play_haptic ? "/haptic " : "/silent ");
    c.expect(ev.count == counts[i] && ev.play_haptic == haptic[i] && ev.window_opened_at == opened[i],
             "mismatch at t=" + std::to_string(times[i]));
    c.expect(ev.haptic.has_value() == haptic[i], "haptic payload presence at t=" + std::to_string(times[i]));
  }
  if (c.out.pass) c.out.detail = os.str();
  return c.out;
}

Outcome cooldown_safety() {
  Checker c;
  std::mt19937_64 rng(77);
  std::size_t decisions = 0;
  for (auto escalation : {Escalation::Off, Escalation::WarnThenBan}) {
    ModerationConfig cfg;
    cfg.escalation = escalation;
    for (int user = 0; user < 2000 && c.out.pass; ++user) {
      UserModerationState state;
      std::array<std::vector<TimestampMs>, 3> accepted;
      TimestampMs t = 0;
      const int attempts = std::uniform_int_distribution<int>(1, 60)(rng);
      for (int i = 0; i < attempts; ++i) {
        // Mix of bursts and gaps around the cooldown length.
        const int mode = std::uniform_int_distribution<int>(0, 3)(rng);
        t += mode == 0 ? 20'000 : std::uniform_int_distribution<TimestampMs>(0, mode == 1 ? 3'000 : 40'000)(rng);
        const auto kind = kReactionTypes[std::uniform_int_distribution<int>(0, 2)(rng)];
        auto& mine = accepted[index_of(kind)];
        const bool oracle_ok = mine.empty() || t - mine.back() >= 20'000;
        const auto v = assess(state, kind, t, cfg);
        ++decisions;
        if (v.accepted()) mine.push_back(t);
        if (escalation == Escalation::Off) {
          c.expect(v.accepted() == oracle_ok, "verdict differs from brute-force cooldown oracle");
        } else {
          c.expect(!v.accepted() || oracle_ok, "accepted inside cooldown");
        }
      }
      for (const auto& list : accepted) {
        for (std::size_t i = 1; i < list.size(); ++i) {
          c.expect(list[i] - list[i - 1] >= 20'000, "two same-type acceptances under 20,000 ms apart");
        }
      }
    }
  }
  ModerationConfig cfg;
  UserModerationState state;
  assess(state, ReactionType::Confused, 0, cfg);
  const auto early = assess(state, ReactionType::Confused, 19'999, cfg);
  const auto boundary = assess(state, ReactionType::Confused, 20'000, cfg);
  c.expect(early.kind == VerdictKind::RejectCooldown && early.remaining_ms == 1, "19,999 ms not rejected with 1 ms left");
  c.expect(boundary.kind == VerdictKind::Accept, "exactly 20,000 ms not accepted");
  if (c.out.pass) c.out.detail = std::to_string(decisions) + " random decisions; 19,999 rejected, 20,000 accepted";
  return c.out;
}

Outcome warn_then_ban() {
  Checker c;
  ModerationConfig cfg;
  UserModerationState state;
  std::ostringstream os;
  const VerdictKind want[] = {VerdictKind::Accept, VerdictKind::Accept, VerdictKind::Accept, VerdictKind::Accept,
                              VerdictKind::AcceptWithWarning};
  for (int i = 0; i < 5; ++i) {
    const auto v = assess(state, ReactionType::HandRaise, i * 20'000, cfg);
    os << to_string(v.kind) << ' ';
    c.expect(v.kind == want[i], "attempt " + std::to_string(i + 1) + " got " + std::string(to_string(v.kind)));
  }
  const auto next = assess(state, ReactionType::HandRaise, 100'000, cfg);
  os << to_string(next.kind);
  c.expect(next.kind == VerdictKind::RejectBanned, "attempt after warning not banned");
  c.expect(assess(state, ReactionType::Confident, 10'000'000, cfg).kind == VerdictKind::RejectBanned,
           "ban lifted later in the session");
  if (c.out.pass) c.out.detail = os.str();
  return c.out;
}

Outcome c2_replay() {
  Checker c;
  const auto start = Clock_::now();
  auto scenario = preset_scenario("C2-replay");
  c.expect(scenario.enrollment == 200 && scenario.active_count() == 42, "preset is not 200 enrolled / 42 active");
  c.expect(scenario.moderation.escalation == Escalation::Off, "preset escalation is not off");
  const auto off = run_scenario(scenario);
  const double share = off["spammer_share"].get<double>();
  c.expect(off["spammers"].size() == 1, "expected exactly one spammer");
  c.expect(std::abs(share - 0.30) <= 0.05, "spammer share " + std::to_string(share));
  c.expect(off["spammer_flagged"].get<bool>(), "dominance flag not raised");

  scenario.moderation.escalation = Escalation::WarnThenBan;
  const auto ban = run_scenario(scenario);
  const auto& spammer = ban["spammers"][0];
  c.expect(spammer["banned"].get<bool>(), "spammer not banned under warn_then_ban");
  c.expect(spammer["banned"].get<bool>() && spammer["accepted_before_ban"].get<int>() <= 6,
           "spammer accepted more than 6 times before the ban");
  const auto secs = seconds_since(start);
  c.expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (c.out.pass) {
    std::ostringstream os;
    os << "share " << share << " (flagged); warn_then_ban: banned after "
       << spammer["accepted_before_ban"].get<int>() << " accepted; " << secs << " s";
    c.out.detail = os.str();
  }
  return c.out;
}

std::vector<std::pair<std::string, std::int64_t>> oracle_ranking(const std::map<std::string, std::int64_t>& totals) {
  std::vector<std::pair<std::string, std::int64_t>> v(totals.begin(), totals.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return v;
}

Outcome borda() {
  Checker c;
  std::vector<std::string> pool;
  for (int i = 0; i < 12; ++i) pool.push_back("c" + std::to_string(i));
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 2000 && c.out.pass; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 100)(rng);
    std::vector<BordaBallot> ballots;
    for (int b = 0; b < n; ++b) {
      auto shuffled = pool;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      shuffled.resize(std::uniform_int_distribution<std::size_t>(0, 3)(rng));
      ballots.push_back({"v" + std::to_string(b), shuffled});
    }
    // Brute force: every (ballot, position, candidate) triple.
    std::map<std::string, std::int64_t> oracle;
    for (const auto& cand : pool) {
      std::int64_t pts = 0;
      for (const auto& b : ballots) {
        for (std::size_t p = 0; p < b.ranking.size(); ++p) {
          if (b.ranking[p] == cand) pts += 3 - static_cast<std::int64_t>(p);
        }
      }
      if (pts > 0) oracle[cand] = pts;
    }
    const auto result = borda_count(ballots);
    std::map<std::string, std::int64_t> got;
    for (const auto& [cand, pts] : result.totals) {
      if (pts > 0) got[cand] = pts;
    }
    c.expect(got == oracle, "totals differ from oracle in trial " + std::to_string(trial));
    const auto want = oracle_ranking(oracle);
    std::vector<std::pair<std::string, std::int64_t>> top;
    for (const auto& e : result.ranking) {
      if (e.second > 0 && top.size() < 3) top.push_back(e);
    }
    c.expect(std::equal(top.begin(), top.end(), want.begin(), want.begin() + std::min<std::size_t>(3, want.size())) &&
                 top.size() == std::min<std::size_t>(3, want.size()),
             "top-3 differs from oracle in trial " + std::to_string(trial));
  }

  std::ifstream in(RXFEED_FIXTURE_DIR "/borda_survey.json");
  const auto fixture = json::parse(in);
  const auto ballots = fixture["ballots"].get<std::vector<BordaBallot>>();
  const auto result = borda_count(ballots);
  const auto expected = fixture["expected_totals"].get<std::map<std::string, std::int64_t>>();
  for (const auto& [cand, pts] : expected) {
    const auto it = result.totals.find(cand);
    c.expect(it != result.totals.end() && it->second == pts, "survey total wrong for " + cand);
  }
  c.expect(ballots.size() == 26 && result.total_points() == 156 && result.total_points() == 26 * 6,
           "survey points do not sum to 156 = 26 x 6");
  c.expect(result.ranking.size() >= 3 && result.ranking[0].first == "Confused/frustrated" &&
               result.ranking[1].first == "Hand-raising for questions/comments" &&
               result.ranking[2].first == "Confident in understanding",
           "survey top-3 is not Confused, Hand-raising, Confident");
  if (c.out.pass) c.out.detail = "2000 random ballot sets match; survey sum 156 = 26 x 6; top-3 as published";
  return c.out;
}

Outcome quiz_mechanics() {
  Checker c;
  ConfusionMatrix random_total;
  for (std::uint64_t seed = 1; seed <= 1000 && c.out.pass; ++seed) {
    PerfectResponder perfect;
    const auto r = run_haptics_quiz(perfect, seed);
    c.expect(r.trial_order.size() == 9, "seed " + std::to_string(seed) + ": not 9 trials");
    for (auto kind : kReactionTypes) {
      c.expect(std::count(r.trial_order.begin(), r.trial_order.end(), kind) == 3,
               "seed " + std::to_string(seed) + ": not 3 trials per type");
      c.expect(std::count(r.training_order.begin(), r.training_order.end(), kind) == 2,
               "seed " + std::to_string(seed) + ": training is not 2 plays per type");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        c.expect(r.matrix.normalized()[i][j] == (i == j ? 1.0 : 0.0), "perfect responder is not the identity");
      }
    }
    RandomResponder guesser(seed * 7919 + 1);
    const auto g = run_haptics_quiz(guesser, seed);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) random_total.counts[i][j] += g.matrix.counts[i][j];
    }
  }
  const auto rows = random_total.normalized();
  double worst = 0.0;
  for (const auto& row : rows) {
    for (double v : row) worst = std::max(worst, std::abs(v - 1.0 / 3.0));
  }
  c.expect(worst <= 0.05, "random responder cell off 1/3 by " + std::to_string(worst));
  if (c.out.pass) c.out.detail = "1000 quizzes; identity for perfect; random max |cell - 1/3| = " + std::to_string(worst);
  return c.out;
}

Outcome persistence_round_trip() {
  Checker c;
  const auto dir = std::filesystem::temp_directory_path() / ("rxfeed-accept-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  {
    ServiceConfig cfg;
    cfg.data_dir = dir.string();
    cfg.seed = 5;
    auto clock = std::make_shared<ManualClock>(0);
    SessionService service(cfg, clock);
    const auto created = service.create_session();
    std::vector<std::string> tokens;
    for (int i = 0; i < 60; ++i) tokens.push_back(service.join_session(created.id).participant_token);

    std::mt19937_64 rng(99);
    std::size_t accepted = 0;
    TimestampMs t = 0;
    while (accepted < 500) {
      t += std::uniform_int_distribution<TimestampMs>(0, 4'000)(rng);
      clock->set(t);
      const auto& token = tokens[std::uniform_int_distribution<std::size_t>(0, tokens.size() - 1)(rng)];
      const auto kind = kReactionTypes[std::uniform_int_distribution<int>(0, 2)(rng)];
      if (service.submit_reaction(created.id, token, kind).verdict.accepted()) ++accepted;
    }
    const std::string live = json(service.analytics(created.id, created.presenter_token)).dump();
    service.end_session(created.id, created.presenter_token);

    const auto reloaded = RecordStore(dir).load(created.id);
    const std::string replayed = json(reloaded.analytics()).dump();
    c.expect(reloaded.accepted().size() == 500, "reloaded record does not hold 500 accepted reactions");
    c.expect(live == replayed, "recomputed analytics differ from live values");
    if (c.out.pass) {
      c.out.detail = std::to_string(reloaded.submissions.size()) + " submissions / 500 accepted; analytics " +
                     std::to_string(live.size()) + " bytes identical";
    }
  }
  std::filesystem::remove_all(dir);
  return c.out;
}

// Producer submits `total` accepted reactions while the consumer drops its
// subscription every 50 events and resumes from the last seq it saw.
Outcome stream_contract() {
  Checker c;
  constexpr int kTotal = 3000;
  ServiceConfig cfg;
  cfg.moderation.escalation = Escalation::Off;
  cfg.seed = 11;
  auto clock = std::make_shared<ManualClock>(0);
  SessionService service(cfg, clock);
  const auto created = service.create_session();
  std::vector<std::string> tokens;
  for (int i = 0; i < kTotal; ++i) tokens.push_back(service.join_session(created.id).participant_token);

  std::thread producer([&] {
    for (int i = 0; i < kTotal; ++i) {
      clock->set(i * 7);
      service.submit_reaction(created.id, tokens[i], kReactionTypes[i % 3]);
    }
    service.end_session(created.id, created.presenter_token);
  });

  std::vector<std::uint64_t> seen;
  std::uint64_t last = 0;
  int reconnects = 0;
  bool ended = false;
  while (!ended) {
    auto sub = service.open_stream(created.id, created.presenter_token, StreamRole::Presenter, last);
    int in_this = 0;
    for (;;) {
      auto item = sub->next(std::chrono::milliseconds(2000));
      if (item.status == Subscription::Status::Event) {
        seen.push_back(item.event.seq);
        last = item.event.seq;
        if (item.event.type == "end") {
          ended = true;
          break;
        }
        if (++in_this == 50) break;  // forced disconnect
      } else if (item.status == Subscription::Status::Heartbeat) {
        continue;
      } else {
        break;
      }
    }
    ++reconnects;
  }
  producer.join();

  bool gap_free = !seen.empty();
  for (std::size_t i = 0; i < seen.size(); ++i) gap_free = gap_free && seen[i] == i + 1;
  c.expect(gap_free, "in-process: sequence has gaps or duplicates");
  c.expect(seen.size() == kTotal + 1, "in-process: expected " + std::to_string(kTotal + 1) + " events, got " +
                                          std::to_string(seen.size()));

  // The same contract over HTTP/SSE with Last-Event-ID.
  ServiceConfig hcfg;
  hcfg.moderation.escalation = Escalation::Off;
  SessionService hsvc(hcfg);
  HttpServer server(hsvc);
  const int port = server.start("127.0.0.1", 0);
  const auto hs = hsvc.create_session();
  constexpr int kHttpTotal = 600;
  std::vector<std::string> htokens;
  for (int i = 0; i < kHttpTotal; ++i) htokens.push_back(hsvc.join_session(hs.id).participant_token);
  std::thread hproducer([&] {
    for (int i = 0; i < kHttpTotal; ++i) hsvc.submit_reaction(hs.id, htokens[i], kReactionTypes[i % 3]);
    hsvc.end_session(hs.id, hs.presenter_token);
  });
  std::vector<std::uint64_t> hseen;
  bool hended = false;
  int hreconnects = 0;
  while (!hended && hreconnects < 1000) {
    httplib::Client client("127.0.0.1", port);
    httplib::Headers headers{{"Authorization", "Bearer " + hs.presenter_token}};
    if (!hseen.empty()) headers.emplace("Last-Event-ID", std::to_string(hseen.back()));
    std::string buf;
    int in_this = 0;
    client.Get("/sessions/" + hs.id.str() + "/stream?role=presenter", headers, [&](const char* d, std::size_t n) {
      buf.append(d, n);
      for (std::size_t pos; (pos = buf.find("\n\n")) != std::string::npos;) {
        const auto block = buf.substr(0, pos);
        buf.erase(0, pos + 2);
        if (block.rfind("id: ", 0) != 0) continue;
        hseen.push_back(std::stoull(block.substr(4, block.find('\n') - 4)));
        if (block.find("\nevent: end\n") != std::string::npos) {
          hended = true;
          return false;
        }
        if (++in_this == 50) return false;
      }
      return true;
    });
    ++hreconnects;
  }
  hproducer.join();
  server.stop();
  bool hgap_free = !hseen.empty();
  for (std::size_t i = 0; i < hseen.size(); ++i) hgap_free = hgap_free && hseen[i] == i + 1;
  c.expect(hended && hgap_free && hseen.size() == kHttpTotal + 1, "http: sequence has gaps, duplicates or no end");

  if (c.out.pass) {
    c.out.detail = std::to_string(seen.size()) + " events over " + std::to_string(reconnects) +
                   " connections in-process, " + std::to_string(hseen.size()) + " over " +
                   std::to_string(hreconnects) + " SSE connections; gap-free, no duplicates";
  }
  return c.out;
}

Outcome throughput() {
  Checker c;
  constexpr int kRate = 1000;
  constexpr int kSeconds = 30;
  constexpr int kTotal = kRate * kSeconds;
  constexpr int kUsers = kTotal / 3;

  ServiceConfig cfg;
  cfg.moderation.escalation = Escalation::Off;
  SessionService service(cfg);
  const auto created = service.create_session();
  std::vector<std::string> tokens;
  tokens.reserve(kUsers);
  for (int i = 0; i < kUsers; ++i) tokens.push_back(service.join_session(created.id).participant_token);

  auto sub = service.open_stream(created.id, created.presenter_token, StreamRole::Presenter);
  std::vector<Clock_::time_point> sent(kTotal), received(kTotal);
  std::atomic<int> accepted{0};
  std::atomic<bool> producer_done{false};
  bool dropped = false;

  // One accepted submission produces exactly one presenter event, in order.
  std::thread consumer([&] {
    int got = 0;
    while (got < kTotal) {
      auto item = sub->next(std::chrono::milliseconds(5000));
      if (item.status == Subscription::Status::Event) {
        received[got++] = Clock_::now();
      } else if (item.status != Subscription::Status::Heartbeat || producer_done) {
        dropped = true;
        return;
      }
    }
  });

  const auto start = Clock_::now();
  for (int i = 0; i < kTotal; ++i) {
    std::this_thread::sleep_until(start + std::chrono::microseconds(1'000'000LL * i / kRate));
    sent[i] = Clock_::now();
    const auto r = service.submit_reaction(created.id, tokens[i / 3], kReactionTypes[i % 3]);
    if (r.verdict.accepted()) ++accepted;
  }
  const auto elapsed = seconds_since(start);
  producer_done = true;
  consumer.join();

  c.expect(!dropped, "presenter subscription fell behind and was disconnected");
  c.expect(accepted == kTotal, "only " + std::to_string(accepted.load()) + " of " + std::to_string(kTotal) + " accepted");
  std::vector<double> lat;
  lat.reserve(kTotal);
  for (int i = 0; i < kTotal && !dropped; ++i) {
    lat.push_back(std::chrono::duration<double, std::milli>(received[i] - sent[i]).count());
  }
  double p99 = 0.0;
  if (!lat.empty()) {
    std::sort(lat.begin(), lat.end());
    p99 = lat[static_cast<std::size_t>(0.99 * (lat.size() - 1))];
  }
  const double rate = kTotal / elapsed;
  c.expect(rate >= kRate * 0.99, "sustained only " + std::to_string(rate) + " submissions/s");
  c.expect(p99 < 100.0, "p99 latency " + std::to_string(p99) + " ms");
  if (c.out.pass) {
    std::ostringstream os;
    os << kTotal << " submissions in " << elapsed << " s (" << rate << "/s), p99 " << p99 << " ms, max "
       << lat.back() << " ms";
    c.out.detail = os.str();
  }
  return c.out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"aggregation-conservation", aggregation_conservation},
      {"window-semantics", window_semantics},
      {"cooldown-safety", cooldown_safety},
      {"warn-then-ban", warn_then_ban},
      {"c2-replay", c2_replay},
      {"borda-oracle", borda},
      {"quiz-mechanics", quiz_mechanics},
      {"persistence-round-trip", persistence_round_trip},
      {"stream-contract", stream_contract},
      {"throughput", throughput},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && only != name) continue;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-24s %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
