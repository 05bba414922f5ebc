#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rxfeed {

/// Milliseconds on the service clock. Every component receives time from its
/// caller; nothing below the service layer reads a wall clock.
using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;

enum class ErrorCode {
  InvalidArgument,
  InvalidBallot,
  SessionNotFound,
  SessionEnded,
  Unauthorized,
  ServiceUnavailable,
  Io,
  Parse,
  Connection,
  Aborted,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class ReactionType : std::uint8_t { HandRaise = 0, Confused = 1, Confident = 2 };

inline constexpr std::array<ReactionType, 3> kReactionTypes = {
    ReactionType::HandRaise, ReactionType::Confused, ReactionType::Confident};

inline constexpr std::size_t index_of(ReactionType kind) noexcept {
  return static_cast<std::size_t>(kind);
}

std::string_view to_string(ReactionType kind) noexcept;
std::optional<ReactionType> parse_reaction_type(std::string_view name) noexcept;
/// Throws Error(InvalidArgument) for unknown names.
ReactionType reaction_type_from_string(std::string_view name);

std::string_view emoji_label(ReactionType kind) noexcept;
std::string_view color_tag(ReactionType kind) noexcept;

/// Six characters over [A-Z0-9].
class SessionId {
 public:
  static constexpr std::size_t kLength = 6;
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

  /// Throws Error(InvalidArgument) unless `text` is a well-formed ID.
  explicit SessionId(std::string_view text);

  static bool is_valid(std::string_view text) noexcept;
  static std::optional<SessionId> parse(std::string_view text) noexcept;

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const SessionId&, const SessionId&) = default;
  friend auto operator<=>(const SessionId&, const SessionId&) = default;

 private:
  std::string value_;
};

SessionId generate_session_id(std::mt19937_64& rng);

/// Per-session anonymous alias used in logs, streams and persisted records.
using AnonUserId = std::string;

struct Reaction {
  SessionId session;
  AnonUserId user;
  ReactionType kind;
  TimestampMs at;
};

}  // namespace rxfeed

template <>
struct std::hash<rxfeed::SessionId> {
  std::size_t operator()(const rxfeed::SessionId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
