#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "imitation.hpp"

namespace earlyrank {

enum class EarlyAdopterVariant { E1, E2 };
enum class Aggregation { sum, sum_union, g_index };

struct ScoreConfig {
  EarlyAdopterVariant e_variant = EarlyAdopterVariant::E2;
  Aggregation agg = Aggregation::sum;
  FactorSet factors;
  /// g-index parameter; empty selects the tuned default for (e_variant, factors).
  std::optional<double> g_param_c;
};

/// Hand-tuned g-index parameters per early-adopter variant and reciprocity/similarity options.
inline double default_g_param(EarlyAdopterVariant variant, const FactorSet& factors) {
  const bool r = factors.use_nonrec;
  const bool s = factors.use_sim;
  if (variant == EarlyAdopterVariant::E1) return (r && !s) ? 100000.0 : 50000.0;
  return r ? 10.0 : 1.0;
}

inline double resolved_g_param(const ScoreConfig& config) {
  return config.g_param_c.value_or(default_g_param(config.e_variant, config.factors));
}

/// I(u): imitation count over |Followers(u)| * |Friends(u)|, 0 for an empty denominator, clamped to [0, 1].
inline double imitation_ratio(const FollowGraph& g, std::span<const double> cf, NodeId u) {
  const double denom = static_cast<double>(g.follower_count(u)) * static_cast<double>(g.friend_count(u));
  if (denom == 0.0) return 0.0;
  return std::clamp(cf[u] / denom, 0.0, 1.0);
}

inline std::vector<double> imitation_ratios(const FollowGraph& g, std::span<const double> cf) {
  std::vector<double> ratio(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) ratio[u] = imitation_ratio(g, cf, u);
  return ratio;
}

namespace detail {

// |Followers(u) \ Followers(v)|
inline std::size_t followers_not_following(const FollowGraph& g, NodeId u, NodeId v) {
  std::size_t count = 0;
  for (const NodeId x : g.followers_by_id(u)) count += g.has_edge(x, v) ? 0 : 1;
  return count;
}

inline double early_adopter_from_ratio(const FollowGraph& g, double ratio, NodeId u, NodeId v,
                                       EarlyAdopterVariant variant) {
  if (variant == EarlyAdopterVariant::E2 || ratio == 0.0) return ratio;
  return ratio * static_cast<double>(followers_not_following(g, u, v));
}

}  // namespace detail

/// E1(u, v) = I(u) * |Followers(u) \ Followers(v)|;  E2(u, v) = I(u).
inline double early_adopter_score(const FollowGraph& g, std::span<const double> cf, NodeId u, NodeId v,
                                  EarlyAdopterVariant variant) {
  g.check(v);
  return detail::early_adopter_from_ratio(g, imitation_ratio(g, cf, u), u, v, variant);
}

/// Early-adopter scores of all followers of v, in ascending follower id.
inline std::vector<double> follower_scores(const FollowGraph& g, std::span<const double> ratio, NodeId v,
                                           EarlyAdopterVariant variant) {
  std::vector<double> out;
  out.reserve(g.follower_count(v));
  for (const NodeId u : g.followers_by_id(v)) out.push_back(detail::early_adopter_from_ratio(g, ratio[u], u, v, variant));
  return out;
}

/// Sum of early-adopter scores over the followers of v.
inline double future_popularity_sum(const FollowGraph& g, std::span<const double> cf, NodeId v,
                                    EarlyAdopterVariant variant) {
  double total = 0.0;
  for (const NodeId u : g.followers_by_id(v)) total += early_adopter_score(g, cf, u, v, variant);
  return total;
}

namespace detail {

inline double sum_union_from_ratio(const FollowGraph& g, std::span<const double> ratio, NodeId v) {
  // (w, 1 - I(u)) for every u in Followers(v), w in Followers(u)
  std::vector<std::pair<NodeId, double>> misses;
  for (const NodeId u : g.followers_by_id(v)) {
    for (const NodeId w : g.followers_by_id(u)) {
      if (w != v) misses.emplace_back(w, 1.0 - ratio[u]);
    }
  }
  std::stable_sort(misses.begin(), misses.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (std::size_t i = 0; i < misses.size();) {
    double none = 1.0;
    std::size_t j = i;
    for (; j < misses.size() && misses[j].first == misses[i].first; ++j) none *= misses[j].second;
    total += 1.0 - none;
    i = j;
  }
  return total;
}

}  // namespace detail

/**
 * Union form of the E1 sum: for each distinct w following some follower of v, the probability
 * that w copies at least one of those links, with independent copy events of probability I(u).
 * v itself is not counted as a prospective follower.
 */
inline double future_popularity_sum_union(const FollowGraph& g, std::span<const double> cf, NodeId v) {
  g.check(v);
  std::vector<double> ratio(g.num_nodes(), 0.0);
  for (const NodeId u : g.followers_by_id(v)) ratio[u] = imitation_ratio(g, cf, u);
  return detail::sum_union_from_ratio(g, ratio, v);
}

/**
 * Rational g-index. With L sorted descending and S(g) the sum of its first g entries (zero-padded
 * past the end), g is the largest integer with g^2 <= c * S(g). The fractional part interpolates
 * linearly between the g and g+1 thresholds:
 *
 *   RG = g + clamp((c * S(g+1) - g^2) / ((g+1)^2 - g^2), 0, 1)
 */
inline double rational_g_index(std::vector<double> values, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("rational_g_index: c must be positive and finite");
  for (const double x : values) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("rational_g_index: values must be finite and >= 0");
  }
  std::sort(values.begin(), values.end(), std::greater<>{});

  double prefix = 0.0;  // S(g)
  std::size_t g = 0;
  while (g < values.size()) {
    const double next = prefix + values[g];
    const double side = static_cast<double>(g + 1);
    if (side * side > c * next) break;
    prefix = next;
    ++g;
  }
  if (g == values.size()) {
    // past the end S stays at the total
    auto square_fits = [&](double k) { return k * k <= c * prefix; };
    double k = std::floor(std::sqrt(c * prefix));
    while (k > static_cast<double>(g) && !square_fits(k)) k -= 1.0;
    while (square_fits(k + 1.0)) k += 1.0;
    g = std::max(g, static_cast<std::size_t>(k));
  }
  const double next_sum = g < values.size() ? prefix + values[g] : prefix;
  const double gd = static_cast<double>(g);
  const double frac = (c * next_sum - gd * gd) / (2.0 * gd + 1.0);
  if (!std::isfinite(frac)) return gd;
  return gd + std::clamp(frac, 0.0, 1.0);
}

/// Rational g-index of the early-adopter scores of v's followers.
inline double future_popularity_g(const FollowGraph& g, std::span<const double> cf, NodeId v,
                                  EarlyAdopterVariant variant, double c) {
  g.check(v);
  std::vector<double> scores;
  for (const NodeId u : g.followers_by_id(v)) scores.push_back(early_adopter_score(g, cf, u, v, variant));
  return rational_g_index(std::move(scores), c);
}

struct RankEntry {
  NodeId account;
  double score;

  friend bool operator==(const RankEntry&, const RankEntry&) = default;
};

/// Accounts by descending score; ties by ascending external id.
using Ranking = std::vector<RankEntry>;

inline void sort_ranking(const FollowGraph& g, Ranking& ranking) {
  std::sort(ranking.begin(), ranking.end(), [&](const RankEntry& a, const RankEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return g.external_id(a.account) < g.external_id(b.account);
  });
}

inline void validate(const ScoreConfig& config) {
  if (config.agg == Aggregation::sum_union && config.e_variant != EarlyAdopterVariant::E1) {
    throw std::invalid_argument("sum_union aggregation is only defined for E1");
  }
  if (config.g_param_c && !(*config.g_param_c > 0.0)) throw std::invalid_argument("g-index parameter must be > 0");
}

/// Future-popularity score of v under config, given precomputed imitation ratios.
inline double future_popularity(const FollowGraph& g, std::span<const double> ratio, NodeId v,
                                const ScoreConfig& config) {
  switch (config.agg) {
    case Aggregation::sum: {
      double total = 0.0;
      for (const double s : follower_scores(g, ratio, v, config.e_variant)) total += s;
      return total;
    }
    case Aggregation::sum_union: return detail::sum_union_from_ratio(g, ratio, v);
    case Aggregation::g_index:
      return rational_g_index(follower_scores(g, ratio, v, config.e_variant), resolved_g_param(config));
  }
  return 0.0;
}

/// Scores every target with the configured future-popularity function. cf must come from config.factors.
inline Ranking rank_accounts(const FollowGraph& g, std::span<const double> cf, std::span<const NodeId> targets,
                             const ScoreConfig& config) {
  validate(config);
  std::string unknown;
  for (const NodeId v : targets) {
    if (v >= g.num_nodes()) unknown += (unknown.empty() ? "" : ", ") + std::to_string(v);
  }
  if (!unknown.empty()) throw std::invalid_argument("unknown target accounts: " + unknown);

  const auto ratio = imitation_ratios(g, cf);
  Ranking ranking;
  ranking.reserve(targets.size());
  for (const NodeId v : targets) ranking.push_back({v, future_popularity(g, ratio, v, config)});
  sort_ranking(g, ranking);
  return ranking;
}

}  // namespace earlyrank
