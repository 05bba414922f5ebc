#include "rxfeed/aggregation.hpp"

#include <algorithm>

namespace rxfeed {

void AggregationConfig::validate() const {
  if (window_len <= 0) throw Error(ErrorCode::InvalidArgument, "window_len_ms must be > 0");
  scaling.validate();
}

AggregationEngine::AggregationEngine(SessionId session, AggregationConfig config)
    : session_(std::move(session)), config_(config) {
  config_.validate();
}

void AggregationEngine::close(std::size_t slot) {
  closed_.push_back(*live_[slot]);
  last_closed_[slot] = live_[slot];
  live_[slot].reset();
}

AggregatedEvent AggregationEngine::ingest(const Reaction& reaction, TimestampMs now) {
  if (finished_ || reaction.session != session_) {
    throw Error(ErrorCode::SessionNotFound, "no live aggregation for session " + reaction.session.str());
  }
  if (now < reaction.at) {
    throw Error(ErrorCode::InvalidArgument, "ingest: now precedes reaction timestamp");
  }

  const auto slot = index_of(reaction.kind);
  auto& live = live_[slot];
  if (live && live->opened_at + config_.window_len <= now) close(slot);

  if (live) {
    ++live->count;
    return AggregatedEvent{session_, reaction.kind, live->count, live->opened_at, now, false, std::nullopt};
  }

  live = AggregationWindow{session_, reaction.kind, now, 1};
  HapticSequence haptic = haptic_sequence_for(reaction.kind);
  if (config_.scaling.enabled) {
    // Sustained activity: carry the previous window's volume into this one's haptic.
    const auto& prev = last_closed_[slot];
    if (prev && prev->opened_at + 2 * config_.window_len >= now) {
      haptic = scale_sequence(haptic, prev->count, config_.scaling);
    }
  }
  return AggregatedEvent{session_, reaction.kind, 1, now, now, true, std::move(haptic)};
}

std::vector<AggregationWindow> AggregationEngine::expire_windows(TimestampMs now) {
  std::vector<AggregationWindow> out;
  for (std::size_t slot = 0; slot < live_.size(); ++slot) {
    if (live_[slot] && live_[slot]->opened_at + config_.window_len <= now) {
      out.push_back(*live_[slot]);
      close(slot);
    }
  }
  return out;
}

std::vector<AggregationWindow> AggregationEngine::finish() {
  std::vector<AggregationWindow> out;
  for (std::size_t slot = 0; slot < live_.size(); ++slot) {
    if (live_[slot]) {
      out.push_back(*live_[slot]);
      close(slot);
    }
  }
  finished_ = true;
  return out;
}

std::vector<AggregationWindow> AggregationEngine::live_windows() const {
  std::vector<AggregationWindow> out;
  for (const auto& w : live_) {
    if (w) out.push_back(*w);
  }
  return out;
}

void to_json(nlohmann::json& j, const AggregationWindow& window) {
  j = nlohmann::json{{"kind", to_string(window.kind)},
                     {"opened_at", window.opened_at},
                     {"count", window.count}};
}

void to_json(nlohmann::json& j, const AggregatedEvent& event) {
  j = nlohmann::json{{"session_id", event.session.str()},
                     {"kind", to_string(event.kind)},
                     {"label", emoji_label(event.kind)},
                     {"color", color_tag(event.kind)},
                     {"count", event.count},
                     {"window_opened_at", event.window_opened_at},
                     {"emitted_at", event.emitted_at},
                     {"play_haptic", event.play_haptic}};
  if (event.haptic) j["haptic"] = *event.haptic;
}

}  // namespace rxfeed
