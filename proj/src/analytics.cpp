#include "rxfeed/analytics.hpp"

#include <algorithm>
#include <map>

namespace rxfeed {

std::vector<LogEntry> reaction_log(std::span<const AcceptedReaction> reactions, std::size_t limit) {
  std::vector<const AcceptedReaction*> order;
  order.reserve(reactions.size());
  for (const auto& r : reactions) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->at != b->at) return a->at > b->at;
    return a->arrival > b->arrival;
  });
  if (order.size() > limit) order.resize(limit);

  std::vector<LogEntry> out;
  out.reserve(order.size());
  for (const auto* r : order) out.push_back({r->kind, r->at});
  return out;
}

std::uint64_t TimelineSeries::total(ReactionType kind) const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts[index_of(kind)]) sum += c;
  return sum;
}

TimelineSeries timeline(std::span<const AcceptedReaction> reactions, TimestampMs now,
                        DurationMs bin_width, DurationMs span) {
  if (bin_width <= 0 || span <= 0 || span % bin_width != 0) {
    throw Error(ErrorCode::InvalidArgument, "timeline: bin width must evenly divide the span");
  }
  const auto bins = static_cast<std::size_t>(span / bin_width);
  const TimestampMs start = now - span;

  TimelineSeries series;
  series.bin_width = bin_width;
  series.bin_starts.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    series.bin_starts[i] = start + static_cast<TimestampMs>(i) * bin_width;
  }
  for (auto& c : series.counts) c.assign(bins, 0);

  for (const auto& r : reactions) {
    if (r.at < start || r.at > now) continue;
    auto bin = static_cast<std::size_t>((r.at - start) / bin_width);
    bin = std::min(bin, bins - 1);  // t == now
    ++series.counts[index_of(r.kind)][bin];
  }
  return series;
}

Distribution cumulative_distribution(std::span<const AcceptedReaction> reactions) {
  Distribution dist{};
  for (const auto& r : reactions) ++dist[index_of(r.kind)];
  return dist;
}

std::vector<UserShare> user_shares(std::span<const AcceptedReaction> reactions) {
  std::map<AnonUserId, std::uint64_t> counts;
  for (const auto& r : reactions) ++counts[r.user];

  const auto total = static_cast<double>(reactions.size());
  std::vector<UserShare> out;
  out.reserve(counts.size());
  for (const auto& [user, count] : counts) {
    out.push_back({user, count, static_cast<double>(count) / total});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const UserShare& a, const UserShare& b) { return a.count > b.count; });
  return out;
}

std::vector<AnonUserId> dominance_flags(std::span<const UserShare> shares, double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dominance threshold must be in (0, 1]");
  }
  std::vector<AnonUserId> out;
  for (const auto& s : shares) {
    if (s.share >= threshold) out.push_back(s.user);
  }
  return out;
}

void AnalyticsConfig::validate() const {
  if (bin_width <= 0 || kTimelineSpan % bin_width != 0) {
    throw Error(ErrorCode::InvalidArgument, "timeline bin width must evenly divide 600000 ms");
  }
  if (!(dominance_threshold > 0.0) || dominance_threshold > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dominance threshold must be in (0, 1]");
  }
}

AnalyticsSnapshot compute_analytics(std::span<const AcceptedReaction> reactions, TimestampMs now,
                                    const AnalyticsConfig& config) {
  AnalyticsSnapshot snap;
  snap.computed_at = now;
  snap.log = reaction_log(reactions, config.log_limit);
  snap.timeline = timeline(reactions, now, config.bin_width);
  snap.cumulative = cumulative_distribution(reactions);
  snap.shares = user_shares(reactions);
  snap.flags = dominance_flags(snap.shares, config.dominance_threshold);
  return snap;
}

void to_json(nlohmann::json& j, const LogEntry& entry) {
  j = nlohmann::json{{"kind", to_string(entry.kind)},
                     {"label", emoji_label(entry.kind)},
                     {"at", entry.at}};
}

void to_json(nlohmann::json& j, const TimelineSeries& series) {
  j = nlohmann::json{{"bin_ms", series.bin_width}, {"bin_starts", series.bin_starts}};
  auto counts = nlohmann::json::object();
  for (auto kind : kReactionTypes) counts[std::string(to_string(kind))] = series.counts[index_of(kind)];
  j["counts"] = std::move(counts);
}

void to_json(nlohmann::json& j, const UserShare& share) {
  j = nlohmann::json{{"user", share.user}, {"count", share.count}, {"share", share.share}};
}

nlohmann::json distribution_json(const Distribution& dist) {
  auto j = nlohmann::json::object();
  for (auto kind : kReactionTypes) j[std::string(to_string(kind))] = dist[index_of(kind)];
  return j;
}

void to_json(nlohmann::json& j, const AnalyticsSnapshot& snapshot) {
  j = nlohmann::json{{"computed_at", snapshot.computed_at},
                     {"log", snapshot.log},
                     {"timeline", snapshot.timeline},
                     {"cumulative", distribution_json(snapshot.cumulative)},
                     {"user_shares", snapshot.shares},
                     {"flags", snapshot.flags}};
}

}  // namespace rxfeed
