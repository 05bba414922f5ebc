#pragma once

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"
#include "rxfeed/haptics.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

inline constexpr DurationMs kDefaultWindowLen = 10'000;

struct AggregationConfig {
  DurationMs window_len = kDefaultWindowLen;
  IntensityScaling scaling;

  void validate() const;
};

/// Live for timestamps in [opened_at, opened_at + window_len).
struct AggregationWindow {
  SessionId session;
  ReactionType kind;
  TimestampMs opened_at;
  std::uint32_t count;

  friend bool operator==(const AggregationWindow&, const AggregationWindow&) = default;
};

struct AggregatedEvent {
  SessionId session;
  ReactionType kind;
  std::uint32_t count;
  TimestampMs window_opened_at;
  TimestampMs emitted_at;
  bool play_haptic;
  std::optional<HapticSequence> haptic;  // present iff play_haptic
};

/// Arrival-anchored tumbling windows for one session. The first reaction of a
/// type opens a window and is emitted with its haptic; later reactions of that
/// type inside the window only bump the count. Not thread-safe; the owning
/// session serializes access.
class AggregationEngine {
 public:
  explicit AggregationEngine(SessionId session, AggregationConfig config = {});

  /// Throws Error(SessionNotFound) if the reaction targets another session or
  /// the engine has been finished, Error(InvalidArgument) if now < reaction.at.
  AggregatedEvent ingest(const Reaction& reaction, TimestampMs now);

  /// Closes and returns every window with opened_at + window_len <= now.
  std::vector<AggregationWindow> expire_windows(TimestampMs now);

  /// Closes all live windows; afterwards ingest() rejects input.
  std::vector<AggregationWindow> finish();

  bool finished() const noexcept { return finished_; }
  const SessionId& session() const noexcept { return session_; }
  const AggregationConfig& config() const noexcept { return config_; }
  std::vector<AggregationWindow> live_windows() const;
  const std::vector<AggregationWindow>& closed_windows() const noexcept { return closed_; }

 private:
  void close(std::size_t slot);

  SessionId session_;
  AggregationConfig config_;
  std::array<std::optional<AggregationWindow>, 3> live_;
  std::array<std::optional<AggregationWindow>, 3> last_closed_;
  std::vector<AggregationWindow> closed_;
  bool finished_ = false;
};

void to_json(nlohmann::json& j, const AggregationWindow& window);
void to_json(nlohmann::json& j, const AggregatedEvent& event);

}  // namespace rxfeed
