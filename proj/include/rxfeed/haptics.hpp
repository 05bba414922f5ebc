#pragma once

#include <vector>

#include "json.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

/// One actuator burst. Invariants: delay_before >= 0, duration > 0,
/// 0 < intensity <= 1.
struct HapticPulse {
  DurationMs delay_before = 0;
  DurationMs duration = 0;
  double intensity = 0.0;

  friend bool operator==(const HapticPulse&, const HapticPulse&) = default;
};

/// A pulse pattern played `repeats` times with `inter_repeat_gap` of silence
/// between consecutive repetitions.
struct HapticSequence {
  std::vector<HapticPulse> pattern;
  int repeats = 1;
  DurationMs inter_repeat_gap = 0;

  /// Sum of delay_before + duration over the pattern.
  DurationMs pattern_duration() const noexcept;
  /// repeats * pattern_duration + (repeats - 1) * gap
  DurationMs total_duration() const noexcept;
  double max_intensity() const noexcept;

  /// Throws Error(InvalidArgument) when a pulse or the repeat count is out of range.
  void validate() const;

  friend bool operator==(const HapticSequence&, const HapticSequence&) = default;
};

inline constexpr int kBuiltinRepeats = 4;
inline constexpr DurationMs kBuiltinRepeatGap = 150;

/// Built-in descriptor for each reaction. HandRaise is a strong-then-weak
/// heartbeat, Confused one long strong burst, Confident two faint ticks.
HapticSequence haptic_sequence_for(ReactionType kind);

/// Maps an aggregated count to an intensity multiplier base + slope*(count-1).
struct IntensityScaling {
  bool enabled = false;
  double base = 1.0;
  double slope = 0.25;

  void validate() const;
};

/// Copy of `seq` with each intensity set to min(1, intensity * multiplier).
/// count == 1 returns the sequence unchanged. Timing is never touched.
/// Throws Error(InvalidArgument) for count == 0.
HapticSequence scale_sequence(const HapticSequence& seq, std::uint32_t count,
                              const IntensityScaling& scaling = {});

void to_json(nlohmann::json& j, const HapticPulse& pulse);
void from_json(const nlohmann::json& j, HapticPulse& pulse);
void to_json(nlohmann::json& j, const HapticSequence& seq);
void from_json(const nlohmann::json& j, HapticSequence& seq);

/// Alternating off/on durations in the style of the Web Vibration API,
/// starting with the first "on" segment. Used by browser renderers.
std::vector<DurationMs> to_vibrate_pattern(const HapticSequence& seq);

}  // namespace rxfeed
