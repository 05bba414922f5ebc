#include "rxfeed/quiz.hpp"

#include <algorithm>

namespace rxfeed {

std::uint32_t ConfusionMatrix::row_total(ReactionType truth) const noexcept {
  const auto& row = counts[index_of(truth)];
  return row[0] + row[1] + row[2];
}

std::array<std::array<double, 3>, 3> ConfusionMatrix::normalized() const noexcept {
  std::array<std::array<double, 3>, 3> out{};
  for (auto truth : kReactionTypes) {
    const auto total = row_total(truth);
    if (total == 0) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      out[index_of(truth)][c] = static_cast<double>(counts[index_of(truth)][c]) / total;
    }
  }
  return out;
}

double ConfusionMatrix::accuracy() const noexcept {
  std::uint32_t hit = 0, all = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      all += counts[r][c];
      if (r == c) hit += counts[r][c];
    }
  }
  return all == 0 ? 0.0 : static_cast<double>(hit) / all;
}

std::vector<ReactionType> quiz_trial_order(std::uint64_t seed) {
  std::vector<ReactionType> order;
  for (auto kind : kReactionTypes) order.insert(order.end(), kTrialsPerType, kind);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  return order;
}

QuizResult run_haptics_quiz(QuizResponder& responder, std::uint64_t seed) {
  QuizResult result;
  for (auto kind : kReactionTypes) {
    const auto seq = haptic_sequence_for(kind);
    for (int i = 0; i < kTrainingPlaysPerType; ++i) {
      responder.train(kind, seq);
      result.training_order.push_back(kind);
    }
  }

  result.trial_order = quiz_trial_order(seed);
  int trial = 0;
  for (auto truth : result.trial_order) {
    auto answer = responder.identify(haptic_sequence_for(truth), ++trial);
    if (!answer) throw QuizAborted(std::move(result));
    result.answers.push_back(*answer);
    result.matrix.add(truth, *answer);
  }
  return result;
}

std::optional<ReactionType> classify_builtin(const HapticSequence& seq) {
  for (auto kind : kReactionTypes) {
    if (haptic_sequence_for(kind) == seq) return kind;
  }
  return std::nullopt;
}

std::optional<ReactionType> PerfectResponder::identify(const HapticSequence& seq, int) {
  return classify_builtin(seq);
}

std::optional<ReactionType> RandomResponder::identify(const HapticSequence&, int) {
  std::uniform_int_distribution<std::size_t> pick(0, kReactionTypes.size() - 1);
  return kReactionTypes[pick(rng_)];
}

std::optional<ReactionType> MappedResponder::identify(const HapticSequence& seq, int trial) {
  if (abort_after_ && trial > *abort_after_) return std::nullopt;
  auto truth = classify_builtin(seq);
  if (!truth) return std::nullopt;
  auto it = mapping_.find(*truth);
  return it == mapping_.end() ? *truth : it->second;
}

void to_json(nlohmann::json& j, const ConfusionMatrix& m) {
  auto labels = nlohmann::json::array();
  for (auto kind : kReactionTypes) labels.push_back(to_string(kind));
  j = nlohmann::json{{"labels", labels}, {"counts", m.counts}, {"normalized", m.normalized()},
                     {"accuracy", m.accuracy()}};
}

void to_json(nlohmann::json& j, const QuizResult& r) {
  auto names = [](const std::vector<ReactionType>& v) {
    auto out = nlohmann::json::array();
    for (auto k : v) out.push_back(to_string(k));
    return out;
  };
  j = nlohmann::json{{"training", names(r.training_order)},
                     {"trials", names(r.trial_order)},
                     {"answers", names(r.answers)},
                     {"matrix", r.matrix}};
}

}  // namespace rxfeed
