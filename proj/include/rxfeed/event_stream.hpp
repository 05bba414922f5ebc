#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace rxfeed {

/// One entry of a server-push feed. Sequence numbers start at 1 and have no gaps.
struct StreamEvent {
  std::uint64_t seq = 0;
  std::string type;  // "aggregate", "reaction", "moderation" or "end"
  nlohmann::json data;
};

inline constexpr std::size_t kDefaultSubscriberBuffer = 1024;

class Subscription;

/// Append-only, sequence-numbered event feed. The full history is retained so
/// a client can resume from any sequence number. Publishing never blocks on
/// consumers: a subscriber that falls more than `max_lag` events behind is
/// disconnected and has to resubscribe.
class EventChannel : public std::enable_shared_from_this<EventChannel> {
 public:
  static std::shared_ptr<EventChannel> create(std::size_t max_lag = kDefaultSubscriberBuffer);

  /// Returns the new event's sequence number. Ignored after close().
  std::uint64_t publish(std::string type, nlohmann::json data);

  /// Appends the terminal "end" event and wakes every subscriber.
  void close(nlohmann::json data = nlohmann::json::object());

  /// Delivers events with seq > last_seq.
  std::unique_ptr<Subscription> subscribe(std::uint64_t last_seq = 0);

  std::uint64_t last_seq() const;
  bool closed() const;
  std::vector<StreamEvent> snapshot() const;

 private:
  friend class Subscription;
  explicit EventChannel(std::size_t max_lag) : max_lag_(max_lag) {}

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<StreamEvent> events_;
  bool closed_ = false;
  std::size_t max_lag_;
};

class Subscription {
 public:
  enum class Status { Event, Heartbeat, Closed, Disconnected };

  struct Item {
    Status status;
    StreamEvent event;  // valid for Status::Event
  };

  /// Waits up to `timeout` for the next event. Heartbeat means nothing arrived
  /// in time; Closed follows delivery of the terminal event; Disconnected means
  /// this subscriber fell too far behind.
  Item next(std::chrono::milliseconds timeout);

  /// Non-blocking variant.
  Item poll() { return next(std::chrono::milliseconds(0)); }

  std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  friend class EventChannel;
  Subscription(std::shared_ptr<EventChannel> channel, std::uint64_t cursor, std::uint64_t horizon)
      : channel_(std::move(channel)), cursor_(cursor), horizon_(horizon) {}

  std::shared_ptr<EventChannel> channel_;
  std::uint64_t cursor_;
  std::uint64_t horizon_;  // history length at subscribe time; replaying it never counts as lag
  bool done_ = false;
  bool dropped_ = false;
};

/// Server-sent-events wire encoding of one event.
std::string format_sse(const StreamEvent& event);
inline constexpr std::string_view kSseKeepalive = ": keepalive\n\n";

}  // namespace rxfeed
