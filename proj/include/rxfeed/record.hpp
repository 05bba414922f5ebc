#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rxfeed/aggregation.hpp"
#include "rxfeed/analytics.hpp"
#include "rxfeed/moderation.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

/// One submission as it was decided, accepted or not.
struct LoggedSubmission {
  std::uint64_t arrival;  // 1-based position in the session log
  AnonUserId user;
  ReactionType kind;
  TimestampMs at;
  ModerationVerdict verdict;
};

enum class ModerationAction { Warn, Ban };

struct ModerationEvent {
  AnonUserId user;
  ModerationAction action;
  TimestampMs at;
};

/// Everything a terminated session leaves behind. Contains no transport-level
/// data and no participant tokens; users appear only as per-session aliases.
struct SessionRecord {
  SessionId id{"000000"};
  TimestampMs created_at = 0;
  TimestampMs ended_at = 0;
  std::uint64_t participants = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<LoggedSubmission> submissions;
  std::vector<ModerationEvent> moderation;
  std::vector<AggregationWindow> windows;

  std::vector<AcceptedReaction> accepted() const;
  /// Analytics settings the session ran with, defaults for missing keys.
  AnalyticsConfig analytics_config() const;
  /// Recomputes the dashboard views as they stood when the session ended.
  AnalyticsSnapshot analytics() const;
};

inline constexpr int kRecordFormatVersion = 1;

nlohmann::json to_json(const SessionRecord& record);
SessionRecord record_from_json(const nlohmann::json& j);

/// JSON-lines encoding: a header line with the metadata, then one line per
/// submission, moderation event and final window, in that order.
std::string to_jsonl(const SessionRecord& record);
/// Throws Error(Parse) on malformed input.
SessionRecord record_from_jsonl(std::string_view text);

/// Directory of `<SESSION_ID>.jsonl` files plus an `index.jsonl` with one
/// summary line per stored session.
class RecordStore {
 public:
  explicit RecordStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const SessionId& id) const;
  bool contains(const SessionId& id) const;

  /// Throws Error(Io) on write failure.
  void save(const SessionRecord& record);
  /// Throws Error(SessionNotFound) if absent, Error(Parse) if corrupt.
  SessionRecord load(const SessionId& id) const;

 private:
  std::filesystem::path dir_;
};

SessionRecord load_record_file(const std::filesystem::path& path);

std::string_view to_string(ModerationAction action) noexcept;

}  // namespace rxfeed
