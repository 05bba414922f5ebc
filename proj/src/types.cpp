#include "rxfeed/types.hpp"

#include <algorithm>

namespace rxfeed {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::InvalidBallot: return "invalid_ballot";
    case ErrorCode::SessionNotFound: return "session_not_found";
    case ErrorCode::SessionEnded: return "session_ended";
    case ErrorCode::Unauthorized: return "unauthorized";
    case ErrorCode::ServiceUnavailable: return "service_unavailable";
    case ErrorCode::Io: return "io";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Connection: return "connection";
    case ErrorCode::Aborted: return "aborted";
  }
  return "unknown";
}

std::string_view to_string(ReactionType kind) noexcept {
  switch (kind) {
    case ReactionType::HandRaise: return "HandRaise";
    case ReactionType::Confused: return "Confused";
    case ReactionType::Confident: return "Confident";
  }
  return "?";
}

std::optional<ReactionType> parse_reaction_type(std::string_view name) noexcept {
  for (auto kind : kReactionTypes) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

ReactionType reaction_type_from_string(std::string_view name) {
  if (auto kind = parse_reaction_type(name)) return *kind;
  throw Error(ErrorCode::InvalidArgument, "unknown reaction type '" + std::string(name) + "'");
}

std::string_view emoji_label(ReactionType kind) noexcept {
  switch (kind) {
    case ReactionType::HandRaise: return "✋";       // raised hand
    case ReactionType::Confused: return "\U0001F622";    // crying face
    case ReactionType::Confident: return "\U0001F60E";   // sunglasses
  }
  return "";
}

std::string_view color_tag(ReactionType kind) noexcept {
  switch (kind) {
    case ReactionType::HandRaise: return "blue";
    case ReactionType::Confused: return "red";
    case ReactionType::Confident: return "yellow";
  }
  return "";
}

bool SessionId::is_valid(std::string_view text) noexcept {
  return text.size() == kLength && std::all_of(text.begin(), text.end(), [](char c) {
           return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
         });
}

SessionId::SessionId(std::string_view text) {
  if (!is_valid(text)) {
    throw Error(ErrorCode::InvalidArgument, "malformed session id '" + std::string(text) + "'");
  }
  value_ = std::string(text);
}

std::optional<SessionId> SessionId::parse(std::string_view text) noexcept {
  if (!is_valid(text)) return std::nullopt;
  return SessionId(text);
}

SessionId generate_session_id(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, SessionId::kAlphabet.size() - 1);
  std::string text(SessionId::kLength, '0');
  for (auto& c : text) c = SessionId::kAlphabet[pick(rng)];
  return SessionId(text);
}

}  // namespace rxfeed
