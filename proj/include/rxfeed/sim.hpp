#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rxfeed/config.hpp"
#include "rxfeed/quiz.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

enum class ProfileKind { Engaged, Spammer, Lurker };

/// Reacts to each lecture prompt with probability react_prob after a
/// lognormal delay with the given median.
struct EngagedParams {
  double react_prob = 0.4;
  double latency_median_ms = 4000.0;
  double latency_sigma = 0.6;
};

/// Fires once every period_ms, cycling through `types`.
struct SpammerParams {
  DurationMs period = 20'000;
  std::vector<ReactionType> types{kReactionTypes.begin(), kReactionTypes.end()};
  DurationMs start_offset = 0;
};

struct ProfileGroup {
  ProfileKind kind = ProfileKind::Engaged;
  int count = 0;
  bool fill = false;  // take every active seat not claimed by other groups
  EngagedParams engaged;
  SpammerParams spammer;
};

struct Prompt {
  DurationMs at;
  ReactionType kind;
};

/// confusing_moment -> Confused, question_call -> HandRaise, checkpoint -> Confident
std::optional<ReactionType> prompt_reaction(std::string_view event) noexcept;

struct Scenario {
  std::string name = "custom";
  int enrollment = 0;
  double active_fraction = 0.0;
  double duration_min = 50.0;
  std::uint64_t seed = 1;
  std::vector<ProfileGroup> profiles;
  std::vector<Prompt> script;  // sorted by time
  ModerationConfig moderation;

  int active_count() const;
  DurationMs duration_ms() const;
  /// Throws Error(InvalidArgument).
  void validate() const;
};

/// Throws Error(Parse) on malformed TOML or unknown values.
Scenario parse_scenario(std::string_view toml_text);
Scenario load_scenario_file(const std::string& path);

/// Presets modelled on the six observed lectures: C1..C6, plus "C2-replay"
/// (the C2 class with one student submitting every 20 s, escalation off).
std::vector<std::string> preset_names();
/// Throws Error(InvalidArgument) for unknown names.
Scenario preset_scenario(const std::string& name);
/// TOML text equivalent to a preset, for use as a starting file.
std::string preset_scenario_toml(const std::string& name);

enum class SimMode { InProcess, Http };

struct SimOptions {
  SimMode mode = SimMode::InProcess;
  std::string base_url;            // http mode, e.g. "http://127.0.0.1:8080"
  std::size_t http_workers = 8;    // concurrent submitters in http mode
};

/// Drives the full pipeline and returns the JSON report. Byte-identical for
/// identical scenario + seed in-process. Throws Error(Connection) if the http
/// endpoint cannot be reached.
nlohmann::json run_scenario(const Scenario& scenario, const SimOptions& options = {});

/// Scripted quiz responder from TOML: policy = "perfect" | "random" | "map",
/// with `seed` for random, a [map] table for map, and optional abort_after.
std::unique_ptr<QuizResponder> responder_from_toml(std::string_view toml_text);

}  // namespace rxfeed
