#include "rxfeed/moderation.hpp"

namespace rxfeed {

std::string_view to_string(Escalation e) noexcept {
  return e == Escalation::Off ? "off" : "warn_then_ban";
}

std::optional<Escalation> parse_escalation(std::string_view text) noexcept {
  if (text == "off" || text == "Off") return Escalation::Off;
  if (text == "warn_then_ban" || text == "WarnThenBan") return Escalation::WarnThenBan;
  return std::nullopt;
}

std::string_view to_string(VerdictKind kind) noexcept {
  switch (kind) {
    case VerdictKind::Accept: return "Accept";
    case VerdictKind::RejectCooldown: return "RejectCooldown";
    case VerdictKind::AcceptWithWarning: return "AcceptWithWarning";
    case VerdictKind::RejectBanned: return "RejectBanned";
    case VerdictKind::RejectCapReached: return "RejectCapReached";
  }
  return "?";
}

std::optional<VerdictKind> parse_verdict_kind(std::string_view text) noexcept {
  for (auto k : {VerdictKind::Accept, VerdictKind::RejectCooldown, VerdictKind::AcceptWithWarning,
                 VerdictKind::RejectBanned, VerdictKind::RejectCapReached}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void ModerationConfig::validate() const {
  if (cooldown <= 0) throw Error(ErrorCode::InvalidArgument, "cooldown_ms must be > 0");
  if (rate_limit < 1) throw Error(ErrorCode::InvalidArgument, "rate_limit must be >= 1");
  if (rate_window <= 0) throw Error(ErrorCode::InvalidArgument, "rate_window_ms must be > 0");
  if (session_cap && *session_cap < 1) {
    throw Error(ErrorCode::InvalidArgument, "session_cap must be >= 1");
  }
}

DurationMs cooldown_remaining(const UserModerationState& state, ReactionType kind, TimestampMs now,
                              const ModerationConfig& cfg) noexcept {
  const auto& last = state.last_accepted[index_of(kind)];
  if (!last) return 0;
  const DurationMs left = cfg.cooldown - (now - *last);
  return left > 0 ? left : 0;
}

ModerationVerdict assess(UserModerationState& state, ReactionType kind, TimestampMs now,
                         const ModerationConfig& cfg) {
  if (state.banned) return {VerdictKind::RejectBanned};
  if (cfg.session_cap && state.total_accepted >= static_cast<std::uint32_t>(*cfg.session_cap)) {
    return {VerdictKind::RejectCapReached};
  }
  if (const auto left = cooldown_remaining(state, kind, now, cfg); left > 0) {
    return {VerdictKind::RejectCooldown, left};
  }

  while (!state.recent.empty() && state.recent.front() <= now - cfg.rate_window) {
    state.recent.pop_front();
  }

  ModerationVerdict verdict{VerdictKind::Accept};
  if (cfg.escalation == Escalation::WarnThenBan &&
      state.recent.size() + 1 > static_cast<std::size_t>(cfg.rate_limit)) {
    if (state.warned) {
      state.banned = true;
      return {VerdictKind::RejectBanned};
    }
    state.warned = true;
    verdict.kind = VerdictKind::AcceptWithWarning;
  }

  state.last_accepted[index_of(kind)] = now;
  state.recent.push_back(now);
  ++state.total_accepted;
  return verdict;
}

void to_json(nlohmann::json& j, const ModerationConfig& cfg) {
  j = nlohmann::json{{"cooldown_ms", cfg.cooldown},
                     {"rate_limit", cfg.rate_limit},
                     {"rate_window_ms", cfg.rate_window},
                     {"escalation", to_string(cfg.escalation)}};
  j["session_cap"] = cfg.session_cap ? nlohmann::json(*cfg.session_cap) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ModerationConfig& cfg) {
  cfg.cooldown = j.value("cooldown_ms", cfg.cooldown);
  cfg.rate_limit = j.value("rate_limit", cfg.rate_limit);
  cfg.rate_window = j.value("rate_window_ms", cfg.rate_window);
  if (j.contains("session_cap") && !j["session_cap"].is_null()) {
    cfg.session_cap = j["session_cap"].get<int>();
  } else {
    cfg.session_cap.reset();
  }
  if (j.contains("escalation")) {
    auto e = parse_escalation(j["escalation"].get<std::string>());
    if (!e) throw Error(ErrorCode::Parse, "unknown escalation '" + j["escalation"].get<std::string>() + "'");
    cfg.escalation = *e;
  }
}

}  // namespace rxfeed
