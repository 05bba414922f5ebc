#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "rxfeed/aggregation.hpp"
#include "rxfeed/analytics.hpp"
#include "rxfeed/moderation.hpp"

namespace rxfeed {

struct ServiceConfig {
  AggregationConfig aggregation;
  ModerationConfig moderation;
  AnalyticsConfig analytics;

  std::string data_dir;  // empty disables persistence
  std::string bind = "127.0.0.1";
  int port = 8080;
  DurationMs keepalive_ms = 15'000;
  std::size_t subscriber_buffer = 1024;
  int id_retries = 16;
  int join_throttle_per_min = 0;  // 0 = unlimited
  /// Fixes session IDs and tokens for reproducible runs. Leave unset in production.
  std::optional<std::uint64_t> seed;

  void validate() const;
};

/// Flat TOML keys, e.g. `cooldown_ms = 20000`, `escalation = "off"`,
/// `session_cap = 30`. Unknown keys are rejected. Throws Error(Parse).
ServiceConfig parse_service_config(std::string_view toml_text, ServiceConfig base = {});

using EnvLookup = std::function<const char*(const char*)>;

/// Applies RXFEED_<KEY> overrides (RXFEED_COOLDOWN_MS, RXFEED_PORT, ...).
/// RXFEED_SESSION_CAP=none clears the cap.
void apply_env_overrides(ServiceConfig& config, const EnvLookup& lookup);

/// File (optional) then environment, then validate().
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const EnvLookup& lookup);

/// The session-behaviour subset embedded in persisted records.
nlohmann::json session_config_json(const ServiceConfig& config);

}  // namespace rxfeed
