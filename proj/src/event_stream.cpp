#include "rxfeed/event_stream.hpp"

#include <algorithm>

namespace rxfeed {

std::shared_ptr<EventChannel> EventChannel::create(std::size_t max_lag) {
  return std::shared_ptr<EventChannel>(new EventChannel(max_lag));
}

std::uint64_t EventChannel::publish(std::string type, nlohmann::json data) {
  std::uint64_t seq = 0;
  {
    std::lock_guard lock(mu_);
    if (closed_) return events_.size();
    seq = events_.size() + 1;
    events_.push_back({seq, std::move(type), std::move(data)});
  }
  cv_.notify_all();
  return seq;
}

void EventChannel::close(nlohmann::json data) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    events_.push_back({events_.size() + 1, "end", std::move(data)});
    closed_ = true;
  }
  cv_.notify_all();
}

std::unique_ptr<Subscription> EventChannel::subscribe(std::uint64_t last_seq) {
  std::lock_guard lock(mu_);
  const auto cursor = std::min<std::uint64_t>(last_seq, events_.size());
  return std::unique_ptr<Subscription>(new Subscription(shared_from_this(), cursor, events_.size()));
}

std::uint64_t EventChannel::last_seq() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

bool EventChannel::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::vector<StreamEvent> EventChannel::snapshot() const {
  std::lock_guard lock(mu_);
  return events_;
}

Subscription::Item Subscription::next(std::chrono::milliseconds timeout) {
  if (done_) return {Status::Closed, {}};
  if (dropped_) return {Status::Disconnected, {}};

  auto& ch = *channel_;
  std::unique_lock lock(ch.mu_);
  const bool ready = ch.cv_.wait_for(lock, timeout, [&] { return ch.events_.size() > cursor_; });
  if (!ready) return {Status::Heartbeat, {}};

  if (ch.events_.size() - std::max(cursor_, horizon_) > ch.max_lag_) {
    dropped_ = true;
    return {Status::Disconnected, {}};
  }
  StreamEvent ev = ch.events_[cursor_];
  ++cursor_;
  if (ev.type == "end") done_ = true;
  return {Status::Event, std::move(ev)};
}

std::string format_sse(const StreamEvent& event) {
  std::string out;
  out += "id: " + std::to_string(event.seq) + "\n";
  out += "event: " + event.type + "\n";
  out += "data: " + event.data.dump() + "\n\n";
  return out;
}

}  // namespace rxfeed
