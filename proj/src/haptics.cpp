#include "rxfeed/haptics.hpp"

#include <algorithm>
#include <cmath>

namespace rxfeed {

DurationMs HapticSequence::pattern_duration() const noexcept {
  DurationMs total = 0;
  for (const auto& p : pattern) total += p.delay_before + p.duration;
  return total;
}

DurationMs HapticSequence::total_duration() const noexcept {
  if (repeats <= 0) return 0;
  return repeats * pattern_duration() + (repeats - 1) * inter_repeat_gap;
}

double HapticSequence::max_intensity() const noexcept {
  double best = 0.0;
  for (const auto& p : pattern) best = std::max(best, p.intensity);
  return best;
}

void HapticSequence::validate() const {
  if (pattern.empty()) throw Error(ErrorCode::InvalidArgument, "haptic pattern is empty");
  if (repeats < 1) throw Error(ErrorCode::InvalidArgument, "haptic repeats must be >= 1");
  if (inter_repeat_gap < 0) throw Error(ErrorCode::InvalidArgument, "haptic gap must be >= 0");
  for (const auto& p : pattern) {
    if (p.delay_before < 0 || p.duration <= 0 || !(p.intensity > 0.0) || p.intensity > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "haptic pulse out of range");
    }
  }
}

HapticSequence haptic_sequence_for(ReactionType kind) {
  HapticSequence seq;
  seq.repeats = kBuiltinRepeats;
  seq.inter_repeat_gap = kBuiltinRepeatGap;
  switch (kind) {
    case ReactionType::HandRaise:
      seq.pattern = {{0, 12, 1.0}, {80, 12, 0.6}};
      break;
    case ReactionType::Confused:
      seq.pattern = {{0, 300, 1.0}};
      break;
    case ReactionType::Confident:
      seq.pattern = {{0, 10, 0.3}, {60, 10, 0.3}};
      break;
  }
  return seq;
}

void IntensityScaling::validate() const {
  if (!(base > 0.0) || !std::isfinite(base)) {
    throw Error(ErrorCode::InvalidArgument, "intensity scaling base must be > 0");
  }
  if (!(slope >= 0.0) || !std::isfinite(slope)) {
    throw Error(ErrorCode::InvalidArgument, "intensity scaling slope must be >= 0");
  }
}

HapticSequence scale_sequence(const HapticSequence& seq, std::uint32_t count,
                              const IntensityScaling& scaling) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "scale_sequence: count must be >= 1");
  scaling.validate();
  HapticSequence out = seq;
  if (count == 1) return out;
  const double factor = scaling.base + scaling.slope * static_cast<double>(count - 1);
  for (auto& p : out.pattern) p.intensity = std::min(1.0, p.intensity * factor);
  return out;
}

void to_json(nlohmann::json& j, const HapticPulse& pulse) {
  j = nlohmann::json{{"delay_ms", pulse.delay_before},
                     {"duration_ms", pulse.duration},
                     {"intensity", pulse.intensity}};
}

void from_json(const nlohmann::json& j, HapticPulse& pulse) {
  j.at("delay_ms").get_to(pulse.delay_before);
  j.at("duration_ms").get_to(pulse.duration);
  j.at("intensity").get_to(pulse.intensity);
}

void to_json(nlohmann::json& j, const HapticSequence& seq) {
  j = nlohmann::json{{"pattern", seq.pattern},
                     {"repeats", seq.repeats},
                     {"gap_ms", seq.inter_repeat_gap}};
}

void from_json(const nlohmann::json& j, HapticSequence& seq) {
  j.at("pattern").get_to(seq.pattern);
  j.at("repeats").get_to(seq.repeats);
  j.at("gap_ms").get_to(seq.inter_repeat_gap);
}

std::vector<DurationMs> to_vibrate_pattern(const HapticSequence& seq) {
  // on/off pairs; leading silence folds into the previous off segment
  std::vector<DurationMs> out;
  DurationMs pending_off = 0;
  for (int r = 0; r < seq.repeats; ++r) {
    if (r > 0) pending_off += seq.inter_repeat_gap;
    for (const auto& p : seq.pattern) {
      pending_off += p.delay_before;
      if (!out.empty()) out.push_back(pending_off);
      out.push_back(p.duration);
      pending_off = 0;
    }
  }
  return out;
}

}  // namespace rxfeed
