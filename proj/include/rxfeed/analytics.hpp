#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

/// An accepted reaction as seen by analytics. `arrival` is the position in
/// the session's submission log and breaks timestamp ties.
struct AcceptedReaction {
  std::uint64_t arrival;
  AnonUserId user;
  ReactionType kind;
  TimestampMs at;
};

struct LogEntry {
  ReactionType kind;
  TimestampMs at;
};

/// Newest first; equal timestamps ordered by arrival, latest first.
std::vector<LogEntry> reaction_log(std::span<const AcceptedReaction> reactions, std::size_t limit);

inline constexpr DurationMs kTimelineSpan = 600'000;
inline constexpr DurationMs kDefaultTimelineBin = 30'000;

struct TimelineSeries {
  DurationMs bin_width = kDefaultTimelineBin;
  /// Start of each bin, ascending. The series covers [now - span, now].
  std::vector<TimestampMs> bin_starts;
  std::array<std::vector<std::uint64_t>, 3> counts;

  std::uint64_t total(ReactionType kind) const noexcept;
};

/// Throws Error(InvalidArgument) if bin_width does not evenly divide the span.
TimelineSeries timeline(std::span<const AcceptedReaction> reactions, TimestampMs now,
                        DurationMs bin_width = kDefaultTimelineBin, DurationMs span = kTimelineSpan);

using Distribution = std::array<std::uint64_t, 3>;

Distribution cumulative_distribution(std::span<const AcceptedReaction> reactions);

struct UserShare {
  AnonUserId user;
  std::uint64_t count;
  double share;
};

/// Users with at least one accepted reaction, by count descending then alias.
std::vector<UserShare> user_shares(std::span<const AcceptedReaction> reactions);

inline constexpr double kDefaultDominanceThreshold = 0.30;

/// Users whose share is >= threshold. Throws Error(InvalidArgument) unless
/// 0 < threshold <= 1.
std::vector<AnonUserId> dominance_flags(std::span<const UserShare> shares,
                                        double threshold = kDefaultDominanceThreshold);

struct AnalyticsConfig {
  std::size_t log_limit = 100;
  DurationMs bin_width = kDefaultTimelineBin;
  double dominance_threshold = kDefaultDominanceThreshold;

  void validate() const;
};

struct AnalyticsSnapshot {
  TimestampMs computed_at = 0;
  std::vector<LogEntry> log;
  TimelineSeries timeline;
  Distribution cumulative{};
  std::vector<UserShare> shares;
  std::vector<AnonUserId> flags;
};

AnalyticsSnapshot compute_analytics(std::span<const AcceptedReaction> reactions, TimestampMs now,
                                    const AnalyticsConfig& config = {});

void to_json(nlohmann::json& j, const LogEntry& entry);
void to_json(nlohmann::json& j, const TimelineSeries& series);
void to_json(nlohmann::json& j, const UserShare& share);
void to_json(nlohmann::json& j, const AnalyticsSnapshot& snapshot);
nlohmann::json distribution_json(const Distribution& dist);

}  // namespace rxfeed
