#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graph.hpp"
#include "parallel.hpp"

namespace earlyrank {

enum class BaselineMethod { FW, FW_nr, FR, FR_nr, HITS, HITS_nr, PR, PR_nr, AD_sum, AD_mean };
enum class AdamicAdarMode { sum, mean };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::FW;
  int hits_iters = 10;
  int pr_iters = 100;
  double pr_damping = 0.9;
};

/// Same nodes and external ids, with every reciprocal pair of edges removed.
inline FollowGraph nonreciprocal_subgraph(const FollowGraph& g) {
  std::vector<FollowEdge> kept;
  kept.reserve(g.num_edges());
  for (const auto& e : g.edges()) {
    if (!g.has_edge(e.followee, e.follower)) kept.push_back(e);
  }
  std::vector<ExternalId> external(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) external[u] = g.external_id(u);
  return FollowGraph::from_edges(g.num_nodes(), std::move(kept), std::move(external));
}

inline std::size_t degree_score(const FollowGraph& g, NodeId v, BaselineMethod method) {
  switch (method) {
    case BaselineMethod::FW: return g.follower_count(v);
    case BaselineMethod::FW_nr: return followers_nr_count(g, v);
    case BaselineMethod::FR: return g.friend_count(v);
    case BaselineMethod::FR_nr: return friends_nr_count(g, v);
    default: throw std::invalid_argument("degree_score: not a degree method");
  }
}

struct HitsScores {
  std::vector<double> authority;
  std::vector<double> hub;
};

namespace detail {

// Scales to unit L2 norm; leaves an all-zero vector untouched.
inline void normalize_l2(std::vector<double>& x) {
  double sq = 0.0;
  for (const double v : x) sq += v * v;
  if (sq == 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : x) v *= inv;
}

inline HitsScores hits_on(const FollowGraph& g, int iters, unsigned workers) {
  const std::size_t n = g.num_nodes();
  HitsScores s;
  if (n == 0) return s;
  s.hub.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  s.authority.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < iters; ++it) {
    parallel_for(n, workers, [&](std::size_t v) {
      double a = 0.0;
      for (const NodeId u : g.followers_by_id(static_cast<NodeId>(v))) a += s.hub[u];
      s.authority[v] = a;
    });
    normalize_l2(s.authority);
    parallel_for(n, workers, [&](std::size_t u) {
      double h = 0.0;
      for (const NodeId v : g.friends_by_id(static_cast<NodeId>(u))) h += s.authority[v];
      s.hub[u] = h;
    });
    normalize_l2(s.hub);
  }
  return s;
}

inline std::vector<double> pagerank_on(const FollowGraph& g, double damping, int iters, unsigned workers) {
  const std::size_t n = g.num_nodes();
  if (n == 0) return {};
  const double nd = static_cast<double>(n);
  std::vector<double> rank(n, 1.0 / nd);
  std::vector<double> share(n);
  std::vector<double> next(n);
  for (int it = 0; it < iters; ++it) {
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      const auto out = g.friend_count(static_cast<NodeId>(u));
      if (out == 0) {
        dangling += rank[u];
        share[u] = 0.0;
      } else {
        share[u] = rank[u] / static_cast<double>(out);
      }
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    parallel_for(n, workers, [&](std::size_t v) {
      double in = 0.0;
      for (const NodeId u : g.followers_by_id(static_cast<NodeId>(v))) in += share[u];
      next[v] = base + damping * in;
    });
    rank.swap(next);
  }
  return rank;
}

}  // namespace detail

/// Classical mutual-reinforcement HITS from a uniform start, L2-normalized every sweep.
inline HitsScores hits(const FollowGraph& g, bool nonreciprocal_only, int iters, unsigned workers = 1) {
  if (iters < 1) throw std::invalid_argument("hits: iters must be >= 1");
  if (nonreciprocal_only) return detail::hits_on(nonreciprocal_subgraph(g), iters, workers);
  return detail::hits_on(g, iters, workers);
}

/// Power iteration with uniform teleport; dangling mass is spread uniformly, so scores sum to 1.
inline std::vector<double> pagerank(const FollowGraph& g, bool nonreciprocal_only, double damping, int iters,
                                    unsigned workers = 1) {
  if (iters < 1) throw std::invalid_argument("pagerank: iters must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("pagerank: damping must be in (0, 1)");
  if (nonreciprocal_only) return detail::pagerank_on(nonreciprocal_subgraph(g), damping, iters, workers);
  return detail::pagerank_on(g, damping, iters, workers);
}

/**
 * Adamic/Adar over the accounts sharing a friend with v: W = Followers(Friends(v)) \ {v}, and
 * AA(v, w) sums 1 / ln |Followers(z)| over common friends z with at least two followers.
 * Returns the sum over W or the mean (0 for empty W).
 */
inline double adamic_adar(const FollowGraph& g, NodeId v, AdamicAdarMode mode) {
  std::vector<std::pair<NodeId, double>> contributions;
  for (const NodeId z : g.friends_by_id(v)) {
    const auto fz = g.follower_count(z);
    const double weight = fz >= 2 ? 1.0 / std::log(static_cast<double>(fz)) : 0.0;
    for (const NodeId w : g.followers_by_id(z)) {
      if (w != v) contributions.emplace_back(w, weight);
    }
  }
  std::stable_sort(contributions.begin(), contributions.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  std::size_t candidates = 0;
  for (std::size_t i = 0; i < contributions.size();) {
    double aa = 0.0;
    std::size_t j = i;
    for (; j < contributions.size() && contributions[j].first == contributions[i].first; ++j) {
      aa += contributions[j].second;
    }
    total += aa;
    ++candidates;
    i = j;
  }
  if (mode == AdamicAdarMode::sum) return total;
  return candidates == 0 ? 0.0 : total / static_cast<double>(candidates);
}

/// Score of each target under the configured baseline, aligned with targets.
inline std::vector<double> baseline_scores(const FollowGraph& g, const BaselineConfig& config,
                                           std::span<const NodeId> targets, unsigned workers = 1) {
  for (const NodeId v : targets) g.check(v);
  std::vector<double> out(targets.size());
  auto pick = [&](const std::vector<double>& table) {
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = table[targets[i]];
  };
  switch (config.method) {
    case BaselineMethod::FW:
    case BaselineMethod::FW_nr:
    case BaselineMethod::FR:
    case BaselineMethod::FR_nr:
      for (std::size_t i = 0; i < targets.size(); ++i) {
        out[i] = static_cast<double>(degree_score(g, targets[i], config.method));
      }
      break;
    case BaselineMethod::HITS:
    case BaselineMethod::HITS_nr:
      pick(hits(g, config.method == BaselineMethod::HITS_nr, config.hits_iters, workers).authority);
      break;
    case BaselineMethod::PR:
    case BaselineMethod::PR_nr:
      pick(pagerank(g, config.method == BaselineMethod::PR_nr, config.pr_damping, config.pr_iters, workers));
      break;
    case BaselineMethod::AD_sum:
    case BaselineMethod::AD_mean: {
      const auto mode = config.method == BaselineMethod::AD_sum ? AdamicAdarMode::sum : AdamicAdarMode::mean;
      parallel_for(targets.size(), workers, [&](std::size_t i) { out[i] = adamic_adar(g, targets[i], mode); });
      break;
    }
  }
  return out;
}

inline std::string_view method_name(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::FW: return "fw";
    case BaselineMethod::FW_nr: return "fw-nr";
    case BaselineMethod::FR: return "fr";
    case BaselineMethod::FR_nr: return "fr-nr";
    case BaselineMethod::HITS: return "hits";
    case BaselineMethod::HITS_nr: return "hits-nr";
    case BaselineMethod::PR: return "pr";
    case BaselineMethod::PR_nr: return "pr-nr";
    case BaselineMethod::AD_sum: return "ad-sum";
    case BaselineMethod::AD_mean: return "ad-mean";
  }
  return "";
}

inline BaselineMethod parse_baseline_method(std::string_view name) {
  for (const auto m : {BaselineMethod::FW, BaselineMethod::FW_nr, BaselineMethod::FR, BaselineMethod::FR_nr,
                       BaselineMethod::HITS, BaselineMethod::HITS_nr, BaselineMethod::PR, BaselineMethod::PR_nr,
                       BaselineMethod::AD_sum, BaselineMethod::AD_mean}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown baseline method '" + std::string(name) + "'");
}

}  // namespace earlyrank
