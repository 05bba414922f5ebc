#include "rxfeed/borda.hpp"

#include <algorithm>
#include <set>

#include "rxfeed/types.hpp"

namespace rxfeed {

std::int64_t BordaResult::total_points() const noexcept {
  std::int64_t sum = 0;
  for (const auto& [_, points] : totals) sum += points;
  return sum;
}

namespace {

void check_weights(const std::vector<std::int64_t>& weights) {
  if (weights.empty()) throw Error(ErrorCode::InvalidArgument, "borda: empty weight vector");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0) throw Error(ErrorCode::InvalidArgument, "borda: weights must be positive");
    if (i > 0 && weights[i] >= weights[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "borda: weights must be strictly decreasing");
    }
  }
}

void check_ballot(const BordaBallot& ballot, std::size_t max_len) {
  if (ballot.ranking.size() > max_len) {
    throw Error(ErrorCode::InvalidBallot, "borda: ballot '" + ballot.voter + "' ranks " +
                                              std::to_string(ballot.ranking.size()) +
                                              " candidates, limit is " + std::to_string(max_len));
  }
  std::set<std::string_view> seen;
  for (const auto& c : ballot.ranking) {
    if (!seen.insert(c).second) {
      throw Error(ErrorCode::InvalidBallot,
                  "borda: ballot '" + ballot.voter + "' lists '" + c + "' twice");
    }
  }
}

}  // namespace

BordaResult borda_count(const std::vector<BordaBallot>& ballots,
                        const std::vector<std::int64_t>& weights) {
  check_weights(weights);
  for (const auto& b : ballots) check_ballot(b, weights.size());

  BordaResult result;
  for (const auto& b : ballots) {
    for (std::size_t pos = 0; pos < b.ranking.size(); ++pos) {
      result.totals[b.ranking[pos]] += weights[pos];
    }
  }
  result.ranking.assign(result.totals.begin(), result.totals.end());
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return result;
}

void to_json(nlohmann::json& j, const BordaBallot& ballot) {
  j = nlohmann::json{{"voter", ballot.voter}, {"ranking", ballot.ranking}};
}

void from_json(const nlohmann::json& j, BordaBallot& ballot) {
  ballot.voter = j.value("voter", std::string{});
  j.at("ranking").get_to(ballot.ranking);
}

void to_json(nlohmann::json& j, const BordaResult& result) {
  j = nlohmann::json::object();
  j["totals"] = result.totals;
  auto ranking = nlohmann::json::array();
  for (const auto& [name, points] : result.ranking) {
    ranking.push_back({{"candidate", name}, {"points", points}});
  }
  j["ranking"] = std::move(ranking);
}

}  // namespace rxfeed
