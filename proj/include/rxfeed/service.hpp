#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "rxfeed/aggregation.hpp"
#include "rxfeed/analytics.hpp"
#include "rxfeed/config.hpp"
#include "rxfeed/event_stream.hpp"
#include "rxfeed/moderation.hpp"
#include "rxfeed/record.hpp"

namespace rxfeed {

class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimestampMs now() const = 0;
};

/// Milliseconds since construction on the monotonic clock.
class SteadyClock final : public Clock {
 public:
  TimestampMs now() const override;

 private:
  std::chrono::steady_clock::time_point epoch_ = std::chrono::steady_clock::now();
};

/// Caller-driven virtual time for simulation and tests.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimestampMs start = 0) : now_(start) {}
  TimestampMs now() const override { return now_.load(); }
  /// Throws Error(InvalidArgument) when asked to move backwards.
  void set(TimestampMs t);
  void advance(DurationMs d) { set(now_.load() + d); }

 private:
  std::atomic<TimestampMs> now_;
};

enum class StreamRole { Presenter, Researcher };
std::optional<StreamRole> parse_stream_role(std::string_view text) noexcept;

struct CreatedSession {
  SessionId id;
  std::string presenter_token;
};

struct JoinResult {
  std::string participant_token;
  AnonUserId alias;
};

struct SubmitResult {
  ModerationVerdict verdict;
  DurationMs cooldown_remaining_ms = 0;
  std::optional<AggregatedEvent> event;  // set when the reaction was accepted
};

enum class SessionStatus { Active, Ended };

/// In-process session service: lifecycle, anonymous participant tokens, the
/// moderation -> aggregation -> fan-out pipeline and persistence on end.
///
/// Thread-safe. Work on one session is serialized by that session's lock;
/// distinct sessions proceed in parallel.
class SessionService {
 public:
  explicit SessionService(ServiceConfig config, std::shared_ptr<const Clock> clock = nullptr);
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Replaces the random ID generator (used to exercise collision handling).
  void set_id_source(std::function<SessionId()> source);

  /// Throws Error(ServiceUnavailable) if no free ID is found within id_retries draws.
  CreatedSession create_session();

  /// Issues a fresh participant token. Throws SessionNotFound / SessionEnded,
  /// or ServiceUnavailable when join throttling is on and exceeded.
  JoinResult join_session(const SessionId& id);

  /// Throws SessionNotFound, SessionEnded, or Unauthorized when the token does
  /// not belong to the session. All moderation outcomes are verdicts.
  SubmitResult submit_reaction(const SessionId& id, const std::string& participant_token, ReactionType kind);

  /// Requires the presenter token. Events with seq > last_seq are replayed first.
  std::unique_ptr<Subscription> open_stream(const SessionId& id, const std::string& presenter_token,
                                            StreamRole role, std::uint64_t last_seq = 0);

  /// Idempotent: ending an ended session returns the stored record.
  SessionRecord end_session(const SessionId& id, const std::string& presenter_token);

  /// Live views for active sessions; frozen at ended_at for ended ones.
  AnalyticsSnapshot analytics(const SessionId& id, const std::string& presenter_token) const;

  SessionStatus status(const SessionId& id) const;
  std::size_t participant_count(const SessionId& id) const;
  std::size_t session_count() const;

  const ServiceConfig& config() const noexcept { return config_; }
  const Clock& clock() const noexcept { return *clock_; }
  const RecordStore* store() const noexcept { return store_ ? &*store_ : nullptr; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const SessionId& id) const;
  std::string new_token();

  ServiceConfig config_;
  std::shared_ptr<const Clock> clock_;
  std::optional<RecordStore> store_;

  mutable std::shared_mutex sessions_mu_;
  std::unordered_map<SessionId, std::shared_ptr<Session>> sessions_;

  std::mutex rng_mu_;
  std::mt19937_64 id_rng_;
  std::optional<std::mt19937_64> token_rng_;  // set only for seeded runs
  std::function<SessionId()> id_source_;
};

}  // namespace rxfeed
