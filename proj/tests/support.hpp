#pragma once

// Shared fixtures and brute-force reference implementations for the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <earlyrank/graph.hpp>
#include <earlyrank/imitation.hpp>
#include <earlyrank/random.hpp>

namespace testing_support {

using namespace earlyrank;

/// Edges given as (follower, followee) in creation order; seq = position + 1.
inline FollowGraph chain_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<FollowEdge> list;
  Seq seq = 0;
  for (const auto& [a, b] : edges) list.push_back({a, b, ++seq});
  return FollowGraph::from_edges(n, std::move(list));
}

/**
 * Random follow graph with n nodes and about m edges. A share of edges is reciprocated and a
 * share closes triangles, so every imitation factor has something to filter. Seqs are distinct,
 * gapped and assigned in random order.
 */
inline FollowGraph random_graph(Rng& rng, std::size_t n, std::size_t m, double reciprocal = 0.2,
                                double closure = 0.4) {
  std::set<std::pair<NodeId, NodeId>> present;
  std::vector<std::pair<NodeId, NodeId>> order;
  std::vector<std::vector<NodeId>> outs(n);
  auto add = [&](NodeId a, NodeId b) {
    if (a == b || !present.insert({a, b}).second) return false;
    order.emplace_back(a, b);
    outs[a].push_back(b);
    return true;
  };
  m = std::min(m, n * (n - 1));
  std::size_t attempts = 0;
  while (order.size() < m && attempts++ < 50 * m + 100) {
    if (!order.empty() && uniform01(rng) < closure) {
      // w -> u -> v  gives w -> v
      const auto [w, u] = order[uniform_index(rng, order.size())];
      if (!outs[u].empty()) add(w, outs[u][uniform_index(rng, outs[u].size())]);
      continue;
    }
    const auto a = static_cast<NodeId>(uniform_index(rng, n));
    const auto b = static_cast<NodeId>(uniform_index(rng, n));
    if (add(a, b) && order.size() < m && uniform01(rng) < reciprocal) add(b, a);
  }
  std::vector<Seq> seqs(order.size());
  Seq s = 0;
  for (auto& x : seqs) x = (s += 1 + uniform_index(rng, 3));
  shuffle(seqs, rng);
  std::vector<FollowEdge> edges;
  for (std::size_t i = 0; i < order.size(); ++i) edges.push_back({order[i].first, order[i].second, seqs[i]});
  return FollowGraph::from_edges(n, std::move(edges));
}

/// Every combination of the optional factors and nonrec variants.
inline std::vector<FactorSet> all_factor_sets() {
  std::vector<FactorSet> out;
  for (const bool t : {false, true}) {
    for (const bool s : {false, true}) {
      out.push_back({t, false, s, NonrecVariant::original_link});
      for (const auto variant : {NonrecVariant::original_link, NonrecVariant::copied_link, NonrecVariant::both}) {
        out.push_back({t, true, s, variant});
      }
    }
  }
  return out;
}

/**
 * Dense-matrix reference for the expected imitation counts: for every edge w->v in creation
 * order and every account x, evaluates the triangle, time, reciprocity and similarity factors
 * straight from adjacency and list positions, normalizes, and accumulates.
 */
class CopyOracle {
 public:
  explicit CopyOracle(const FollowGraph& g) : n_(g.num_nodes()), seq_(n_ * n_, 0), edges_(g.edges().begin(), g.edges().end()) {
    for (const auto& e : edges_) seq_[e.follower * n_ + e.followee] = e.seq;
    // newest-first friend and follower lists built by sorting on seq
    friends_.resize(n_);
    followers_.resize(n_);
    for (const auto& e : edges_) {
      friends_[e.follower].push_back(e.followee);
      followers_[e.followee].push_back(e.follower);
    }
    for (NodeId u = 0; u < n_; ++u) {
      std::sort(friends_[u].begin(), friends_[u].end(), [&](NodeId a, NodeId b) { return at(u, a) > at(u, b); });
      std::sort(followers_[u].begin(), followers_[u].end(), [&](NodeId a, NodeId b) { return at(a, u) > at(b, u); });
    }
    jaccard_.assign(n_ * n_, 0.0);
    for (NodeId a = 0; a < n_; ++a) {
      const std::set<NodeId> fa(friends_[a].begin(), friends_[a].end());
      for (NodeId b = 0; b < n_; ++b) {
        const std::set<NodeId> fb(friends_[b].begin(), friends_[b].end());
        std::size_t common = 0;
        for (const NodeId x : fa) common += fb.count(x);
        const std::size_t uni = fa.size() + fb.size() - common;
        jaccard_[a * n_ + b] = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
      }
    }
    std::sort(edges_.begin(), edges_.end(), [](const FollowEdge& a, const FollowEdge& b) { return a.seq < b.seq; });
  }

  bool edge(NodeId a, NodeId b) const { return at(a, b) != 0; }

  static std::size_t position(const std::vector<NodeId>& list, NodeId x) {
    return static_cast<std::size_t>(std::find(list.begin(), list.end(), x) - list.begin());
  }

  /// Unnormalized p for candidate x of edge w->v.
  double weight(NodeId x, NodeId v, NodeId w, const FactorSet& f) const {
    if (x == v || x == w || v == w) return 0.0;
    if (!(edge(x, v) && edge(w, v) && edge(w, x))) return 0.0;
    if (f.use_time) {
      const bool newer_in_friends = position(friends_[w], v) < position(friends_[w], x);
      const bool newer_in_followers = position(followers_[v], w) < position(followers_[v], x);
      if (!(newer_in_friends && newer_in_followers)) return 0.0;
    }
    if (f.use_nonrec) {
      const bool original_ok = !edge(v, x);
      const bool copied_ok = !edge(v, w);
      const bool ok = f.nonrec_variant == NonrecVariant::original_link ? original_ok
                      : f.nonrec_variant == NonrecVariant::copied_link ? copied_ok
                                                                       : original_ok && copied_ok;
      if (!ok) return 0.0;
    }
    if (f.use_sim) return jaccard_[x * n_ + v] * jaccard_[w * n_ + x];
    return 1.0;
  }

  /// Normalized candidates of edge w->v, ascending by account.
  std::vector<Candidate> candidates(NodeId w, NodeId v, const FactorSet& f) const {
    std::vector<Candidate> out;
    double total = 0.0;
    for (NodeId x = 0; x < n_; ++x) {
      const double p = weight(x, v, w, f);
      if (p > 0.0) {
        out.push_back({x, p});
        total += p;
      }
    }
    if (total <= 0.0) return {};
    for (auto& c : out) c.probability /= total;
    return out;
  }

  std::vector<double> cf(const FactorSet& f) const {
    std::vector<double> out(n_, 0.0);
    for (const auto& e : edges_) {
      for (const auto& c : candidates(e.follower, e.followee, f)) out[c.account] += c.probability;
    }
    return out;
  }

  const std::vector<NodeId>& friends(NodeId u) const { return friends_[u]; }
  const std::vector<NodeId>& followers(NodeId u) const { return followers_[u]; }

 private:
  Seq at(NodeId a, NodeId b) const { return seq_[a * n_ + b]; }

  std::size_t n_;
  std::vector<Seq> seq_;
  std::vector<FollowEdge> edges_;
  std::vector<std::vector<NodeId>> friends_;
  std::vector<std::vector<NodeId>> followers_;
  std::vector<double> jaccard_;
};

/// 1-based average ranks by direct counting.
inline std::vector<double> brute_mid_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0;
    std::size_t equal = 0;
    for (const double x : v) {
      less += x < v[i] ? 1 : 0;
      equal += x == v[i] ? 1 : 0;
    }
    r[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return r;
}

inline double brute_spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = brute_mid_ranks(a);
  const auto rb = brute_mid_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double brute_ndcg(const std::vector<double>& ranked_gains, std::size_t k) {
  auto dcg = [&](const std::vector<double>& gains) {
    double total = 0.0;
    for (std::size_t i = 0; i < std::min(k, gains.size()); ++i) total += gains[i] / std::log2(static_cast<double>(i) + 2.0);
    return total;
  };
  auto ideal = ranked_gains;
  std::sort(ideal.begin(), ideal.end(), std::greater<>{});
  const double best = dcg(ideal);
  return best == 0.0 ? 0.0 : dcg(ranked_gains) / best;
}

}  // namespace testing_support
