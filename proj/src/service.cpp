#include "rxfeed/service.hpp"

#include <deque>
#include <mutex>

namespace rxfeed {

TimestampMs SteadyClock::now() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - epoch_)
      .count();
}

void ManualClock::set(TimestampMs t) {
  auto cur = now_.load();
  if (t < cur) throw Error(ErrorCode::InvalidArgument, "manual clock cannot move backwards");
  now_.store(t);
}

std::optional<StreamRole> parse_stream_role(std::string_view text) noexcept {
  if (text == "presenter") return StreamRole::Presenter;
  if (text == "researcher") return StreamRole::Researcher;
  return std::nullopt;
}

namespace {

bool tokens_equal(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

std::string alias_for(std::size_t ordinal) {
  std::string digits = std::to_string(ordinal);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "u" + digits;
}

}  // namespace

struct SessionService::Session {
  struct Participant {
    AnonUserId alias;
    UserModerationState moderation;
  };

  Session(SessionId sid, TimestampMs created, std::string token, const ServiceConfig& cfg)
      : id(sid),
        created_at(created),
        presenter_token(std::move(token)),
        aggregation(sid, cfg.aggregation),
        presenter(EventChannel::create(cfg.subscriber_buffer)),
        researcher(EventChannel::create(cfg.subscriber_buffer)) {}

  mutable std::mutex mu;
  SessionId id;
  TimestampMs created_at;
  std::string presenter_token;
  bool ended = false;

  std::unordered_map<std::string, Participant> participants;
  std::deque<TimestampMs> recent_joins;
  AggregationEngine aggregation;
  std::vector<LoggedSubmission> log;
  std::vector<AcceptedReaction> accepted;
  std::vector<ModerationEvent> moderation;
  std::shared_ptr<EventChannel> presenter;
  std::shared_ptr<EventChannel> researcher;
  std::optional<SessionRecord> record;

  void authorize(std::string_view token) const {
    if (!tokens_equal(token, presenter_token)) {
      throw Error(ErrorCode::Unauthorized, "presenter token rejected for session " + id.str());
    }
  }
};

SessionService::SessionService(ServiceConfig config, std::shared_ptr<const Clock> clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  config_.validate();
  if (!clock_) clock_ = std::make_shared<SteadyClock>();
  if (!config_.data_dir.empty()) store_.emplace(config_.data_dir);
  if (config_.seed) {
    id_rng_.seed(*config_.seed);
    token_rng_.emplace(*config_.seed ^ 0x9E3779B97F4A7C15ULL);
  } else {
    std::random_device rd;
    id_rng_.seed((static_cast<std::uint64_t>(rd()) << 32) | rd());
  }
}

SessionService::~SessionService() {
  std::unique_lock lock(sessions_mu_);
  for (auto& [_, s] : sessions_) {
    s->presenter->close({{"reason", "shutdown"}});
    s->researcher->close({{"reason", "shutdown"}});
  }
}

void SessionService::set_id_source(std::function<SessionId()> source) {
  std::lock_guard lock(rng_mu_);
  id_source_ = std::move(source);
}

std::string SessionService::new_token() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::array<std::uint64_t, 2> words{};
  {
    std::lock_guard lock(rng_mu_);
    if (token_rng_) {
      for (auto& w : words) w = (*token_rng_)();
    } else {
      std::random_device rd;
      for (auto& w : words) w = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    }
  }
  std::string out;
  out.reserve(32);
  for (auto w : words) {
    for (int shift = 60; shift >= 0; shift -= 4) out += kHex[(w >> shift) & 0xF];
  }
  return out;
}

std::shared_ptr<SessionService::Session> SessionService::find(const SessionId& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "no session " + id.str());
  return it->second;
}

CreatedSession SessionService::create_session() {
  const auto token = new_token();
  std::unique_lock lock(sessions_mu_);
  for (int attempt = 0; attempt < config_.id_retries; ++attempt) {
    SessionId id = [&] {
      std::lock_guard rng_lock(rng_mu_);
      return id_source_ ? id_source_() : generate_session_id(id_rng_);
    }();
    if (sessions_.count(id) || (store_ && store_->contains(id))) continue;
    sessions_.emplace(id, std::make_shared<Session>(id, clock_->now(), token, config_));
    return {id, token};
  }
  throw Error(ErrorCode::ServiceUnavailable,
              "no free session id after " + std::to_string(config_.id_retries) + " attempts");
}

JoinResult SessionService::join_session(const SessionId& id) {
  auto s = find(id);
  auto token = new_token();
  std::lock_guard lock(s->mu);
  if (s->ended) throw Error(ErrorCode::SessionEnded, "session " + id.str() + " has ended");
  if (config_.join_throttle_per_min > 0) {
    const auto now = clock_->now();
    while (!s->recent_joins.empty() && s->recent_joins.front() <= now - 60'000) s->recent_joins.pop_front();
    if (s->recent_joins.size() >= static_cast<std::size_t>(config_.join_throttle_per_min)) {
      throw Error(ErrorCode::ServiceUnavailable, "join rate limit reached for session " + id.str());
    }
    s->recent_joins.push_back(now);
  }
  auto alias = alias_for(s->participants.size() + 1);
  s->participants.emplace(token, Session::Participant{alias, {}});
  return {std::move(token), std::move(alias)};
}

SubmitResult SessionService::submit_reaction(const SessionId& id, const std::string& participant_token,
                                             ReactionType kind) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->ended) throw Error(ErrorCode::SessionEnded, "session " + id.str() + " has ended");
  auto it = s->participants.find(participant_token);
  if (it == s->participants.end()) {
    throw Error(ErrorCode::Unauthorized, "participant token not valid for session " + id.str());
  }
  auto& who = it->second;

  const auto now = clock_->now();
  const bool was_banned = who.moderation.banned;
  const auto verdict = assess(who.moderation, kind, now, config_.moderation);

  SubmitResult result;
  result.verdict = verdict;
  result.cooldown_remaining_ms = cooldown_remaining(who.moderation, kind, now, config_.moderation);

  const auto arrival = static_cast<std::uint64_t>(s->log.size() + 1);
  s->log.push_back({arrival, who.alias, kind, now, verdict});

  std::optional<ModerationEvent> mod;
  if (verdict.kind == VerdictKind::AcceptWithWarning) mod = ModerationEvent{who.alias, ModerationAction::Warn, now};
  if (!was_banned && who.moderation.banned) mod = ModerationEvent{who.alias, ModerationAction::Ban, now};
  if (mod) {
    s->moderation.push_back(*mod);
    s->researcher->publish("moderation", {{"user", mod->user}, {"action", to_string(mod->action)}, {"at", mod->at}});
  }

  if (!verdict.accepted()) return result;

  s->aggregation.expire_windows(now);
  auto event = s->aggregation.ingest(Reaction{s->id, who.alias, kind, now}, now);
  s->accepted.push_back({arrival, who.alias, kind, now});

  nlohmann::json payload = event;
  s->presenter->publish("aggregate", payload);
  s->researcher->publish("reaction", {{"arrival", arrival},
                                      {"user", who.alias},
                                      {"kind", to_string(kind)},
                                      {"label", emoji_label(kind)},
                                      {"at", now},
                                      {"verdict", to_string(verdict.kind)}});
  s->researcher->publish("aggregate", std::move(payload));
  result.event = std::move(event);
  return result;
}

std::unique_ptr<Subscription> SessionService::open_stream(const SessionId& id, const std::string& presenter_token,
                                                          StreamRole role, std::uint64_t last_seq) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->authorize(presenter_token);
  auto& channel = role == StreamRole::Presenter ? s->presenter : s->researcher;
  return channel->subscribe(last_seq);
}

SessionRecord SessionService::end_session(const SessionId& id, const std::string& presenter_token) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->authorize(presenter_token);
  if (s->ended) return *s->record;

  SessionRecord record;
  record.id = s->id;
  record.created_at = s->created_at;
  record.ended_at = clock_->now();
  record.participants = s->participants.size();
  record.config = session_config_json(config_);
  record.submissions = s->log;
  record.moderation = s->moderation;
  s->aggregation.finish();
  record.windows = s->aggregation.closed_windows();

  if (store_) store_->save(record);

  s->ended = true;
  s->record = record;
  const nlohmann::json marker = {{"reason", "session_ended"}, {"ended_at", record.ended_at}};
  s->presenter->close(marker);
  s->researcher->close(marker);
  return record;
}

AnalyticsSnapshot SessionService::analytics(const SessionId& id, const std::string& presenter_token) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  s->authorize(presenter_token);
  const auto at = s->ended ? s->record->ended_at : clock_->now();
  return compute_analytics(s->accepted, at, config_.analytics);
}

SessionStatus SessionService::status(const SessionId& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return s->ended ? SessionStatus::Ended : SessionStatus::Active;
}

std::size_t SessionService::participant_count(const SessionId& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return s->participants.size();
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.size();
}

}  // namespace rxfeed
