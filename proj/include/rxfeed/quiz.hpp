#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "json.hpp"
#include "rxfeed/haptics.hpp"
#include "rxfeed/types.hpp"

namespace rxfeed {

/// Rows are the sequence actually played, columns the responder's answer.
struct ConfusionMatrix {
  std::array<std::array<std::uint32_t, 3>, 3> counts{};

  void add(ReactionType truth, ReactionType predicted) { ++counts[index_of(truth)][index_of(predicted)]; }
  std::uint32_t row_total(ReactionType truth) const noexcept;
  /// Row-normalized rates; an all-zero row stays zero.
  std::array<std::array<double, 3>, 3> normalized() const noexcept;
  double accuracy() const noexcept;
};

/// Whoever is being tested: a scripted policy or a person at a terminal.
class QuizResponder {
 public:
  virtual ~QuizResponder() = default;
  /// Labelled presentation during training.
  virtual void train(ReactionType kind, const HapticSequence& seq) { (void)kind, (void)seq; }
  /// Unlabelled trial; std::nullopt aborts the quiz.
  virtual std::optional<ReactionType> identify(const HapticSequence& seq, int trial) = 0;
};

inline constexpr int kTrainingPlaysPerType = 2;
inline constexpr int kTrialsPerType = 3;

struct QuizResult {
  std::vector<ReactionType> training_order;
  std::vector<ReactionType> trial_order;
  std::vector<ReactionType> answers;
  ConfusionMatrix matrix;
};

/// Raised when the responder aborts; carries the trials answered so far.
class QuizAborted : public Error {
 public:
  explicit QuizAborted(QuizResult partial)
      : Error(ErrorCode::Aborted, "quiz aborted after " + std::to_string(partial.answers.size()) + " trials"),
        partial_(std::move(partial)) {}
  const QuizResult& partial() const noexcept { return partial_; }

 private:
  QuizResult partial_;
};

/// The nine test trials, each type exactly three times, in seeded random order.
std::vector<ReactionType> quiz_trial_order(std::uint64_t seed);

/// Training plays every sequence twice with its label, then the nine trials run.
QuizResult run_haptics_quiz(QuizResponder& responder, std::uint64_t seed);

/// Knows the built-in descriptors and always answers correctly.
class PerfectResponder final : public QuizResponder {
 public:
  std::optional<ReactionType> identify(const HapticSequence& seq, int trial) override;
};

/// Ignores the stimulus and answers uniformly at random.
class RandomResponder final : public QuizResponder {
 public:
  explicit RandomResponder(std::uint64_t seed) : rng_(seed) {}
  std::optional<ReactionType> identify(const HapticSequence& seq, int trial) override;

 private:
  std::mt19937_64 rng_;
};

/// Recognises the stimulus, then answers through a fixed substitution table;
/// optionally aborts once `abort_after` trials have been answered.
class MappedResponder final : public QuizResponder {
 public:
  explicit MappedResponder(std::map<ReactionType, ReactionType> mapping, std::optional<int> abort_after = {})
      : mapping_(std::move(mapping)), abort_after_(abort_after) {}
  std::optional<ReactionType> identify(const HapticSequence& seq, int trial) override;

 private:
  std::map<ReactionType, ReactionType> mapping_;
  std::optional<int> abort_after_;
};

/// Which built-in sequence a descriptor is, if any.
std::optional<ReactionType> classify_builtin(const HapticSequence& seq);

void to_json(nlohmann::json& j, const ConfusionMatrix& m);
void to_json(nlohmann::json& j, const QuizResult& r);

}  // namespace rxfeed
