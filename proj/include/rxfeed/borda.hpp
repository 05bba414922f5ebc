#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace rxfeed {

/// A ranked ballot, most preferred first. Candidates are distinct.
struct BordaBallot {
  std::string voter;
  std::vector<std::string> ranking;
};

struct BordaResult {
  std::map<std::string, std::int64_t> totals;
  /// Points descending; equal points ordered by candidate name.
  std::vector<std::pair<std::string, std::int64_t>> ranking;

  std::int64_t total_points() const noexcept;
};

inline const std::vector<std::int64_t> kDefaultBordaWeights = {3, 2, 1};

/// Truncated ("modified") Borda count: the candidate in position i of a ballot
/// earns weights[i]; unlisted candidates earn nothing. Ballots may be shorter
/// than the weight vector.
///
/// Throws Error(InvalidArgument) unless weights are positive and strictly
/// decreasing, and Error(InvalidBallot) for a ballot longer than the weights
/// or one naming a candidate twice.
BordaResult borda_count(const std::vector<BordaBallot>& ballots,
                        const std::vector<std::int64_t>& weights = kDefaultBordaWeights);

void to_json(nlohmann::json& j, const BordaBallot& ballot);
void from_json(const nlohmann::json& j, BordaBallot& ballot);
void to_json(nlohmann::json& j, const BordaResult& result);

}  // namespace rxfeed
