#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

enum class Escalation { Off, WarnThenBan };

std::string_view to_string(Escalation e) noexcept;
std::optional<Escalation> parse_escalation(std::string_view text) noexcept;

struct ModerationConfig {
  DurationMs cooldown = 20'000;
  int rate_limit = 4;
  DurationMs rate_window = 300'000;
  std::optional<int> session_cap;
  Escalation escalation = Escalation::WarnThenBan;

  void validate() const;
};

struct UserModerationState {
  std::array<std::optional<TimestampMs>, 3> last_accepted;
  /// Accepted timestamps inside (now - rate_window, now].
  std::deque<TimestampMs> recent;
  bool warned = false;
  bool banned = false;
  std::uint32_t total_accepted = 0;
};

enum class VerdictKind { Accept, RejectCooldown, AcceptWithWarning, RejectBanned, RejectCapReached };

std::string_view to_string(VerdictKind kind) noexcept;
std::optional<VerdictKind> parse_verdict_kind(std::string_view text) noexcept;

struct ModerationVerdict {
  VerdictKind kind = VerdictKind::Accept;
  /// Only meaningful for RejectCooldown, in (0, cooldown].
  DurationMs remaining_ms = 0;

  bool accepted() const noexcept {
    return kind == VerdictKind::Accept || kind == VerdictKind::AcceptWithWarning;
  }

  friend bool operator==(const ModerationVerdict&, const ModerationVerdict&) = default;
};

/// Decides one submission and, when it is accepted, records it in `state`.
///
/// Checks run in this order: ban, session cap, same-type cooldown (a
/// reaction exactly `cooldown` after the last one passes), then the rolling
/// rate. A rate violation warns the first time and bans afterwards; with
/// Escalation::Off the rate is not checked at all.
ModerationVerdict assess(UserModerationState& state, ReactionType kind, TimestampMs now,
                         const ModerationConfig& cfg);

/// max(0, cooldown - (now - last_accepted[kind])); 0 if never accepted.
DurationMs cooldown_remaining(const UserModerationState& state, ReactionType kind, TimestampMs now,
                              const ModerationConfig& cfg) noexcept;

void to_json(nlohmann::json& j, const ModerationConfig& cfg);
void from_json(const nlohmann::json& j, ModerationConfig& cfg);

}  // namespace rxfeed
