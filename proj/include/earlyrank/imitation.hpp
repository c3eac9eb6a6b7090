#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "graph.hpp"

namespace earlyrank {

/// Which reciprocal link disqualifies a triad.
enum class NonrecVariant {
  original_link,  // u <-> v reciprocal
  copied_link,    // w <-> v reciprocal
  both,
};

/// Optional factors used when attributing a link to the account it was copied from.
/// The structure (triangle) condition is always applied.
struct FactorSet {
  bool use_time = false;
  bool use_nonrec = false;
  bool use_sim = false;
  NonrecVariant nonrec_variant = NonrecVariant::original_link;

  friend bool operator==(const FactorSet&, const FactorSet&) = default;
};

/// A possible original of a copied link and the probability that it is the one.
struct Candidate {
  NodeId account;
  double probability;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// u->v, w->v and w->u all exist: w may have copied u's link to v.
inline bool structure(const FollowGraph& g, NodeId u, NodeId v, NodeId w) {
  if (u == v || v == w || u == w) return false;
  return g.has_edge(u, v) && g.has_edge(w, v) && g.has_edge(w, u);
}

/// w->v is newer than both w->u and u->v, read off the newest-first lists.
inline bool time_ok(const FollowGraph& g, NodeId u, NodeId v, NodeId w) {
  if (!structure(g, u, v, w)) throw std::invalid_argument("time_ok: (u, v, w) is not a candidate triad");
  return *idx(g, w, ListKind::friends, v) < *idx(g, w, ListKind::friends, u) &&
         *idx(g, v, ListKind::followers, w) < *idx(g, v, ListKind::followers, u);
}

inline bool nonrec(const FollowGraph& g, NodeId u, NodeId v, NodeId w, NonrecVariant variant) {
  const bool original_ok = !g.has_edge(v, u);
  const bool copied_ok = !g.has_edge(v, w);
  switch (variant) {
    case NonrecVariant::original_link: return original_ok;
    case NonrecVariant::copied_link: return copied_ok;
    case NonrecVariant::both: return original_ok && copied_ok;
  }
  return false;
}

/// Jaccard similarity of the friend sets of a and b; 0 when both are empty.
inline double sim(const FollowGraph& g, NodeId a, NodeId b) {
  const auto fa = g.friends_by_id(a);
  const auto fb = g.friends_by_id(b);
  std::size_t common = 0;
  auto ia = fa.begin();
  auto ib = fb.begin();
  while (ia != fa.end() && ib != fb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t total = fa.size() + fb.size() - common;
  if (total == 0) return 0.0;
  return static_cast<double>(common) / static_cast<double>(total);
}

namespace detail {

// Fills out with the normalized candidates of edge w->v (seq_wv), ascending by account id.
// Leaves out empty when no candidate carries positive weight.
inline void edge_candidates(const FollowGraph& g, NodeId w, NodeId v, Seq seq_wv, const FactorSet& factors,
                            std::vector<Candidate>& out) {
  out.clear();
  if (factors.use_nonrec && factors.nonrec_variant != NonrecVariant::original_link && g.has_edge(v, w)) return;
  const bool check_original = factors.use_nonrec && factors.nonrec_variant != NonrecVariant::copied_link;

  auto consider = [&](NodeId x, Seq seq_wx, Seq seq_xv) {
    if (factors.use_time && !(seq_wv > seq_wx && seq_wv > seq_xv)) return;
    if (check_original && g.has_edge(v, x)) return;
    double weight = 1.0;
    if (factors.use_sim) {
      weight = sim(g, x, v) * sim(g, w, x);
      if (weight <= 0.0) return;
    }
    out.push_back({x, weight});  // normalized below
  };

  // U = Followers(v) ∩ Friends(w), walked from the shorter list
  const auto friends_w = g.friends_by_id(w);
  const auto followers_v = g.followers_by_id(v);
  if (friends_w.size() <= followers_v.size()) {
    const auto seqs = g.friend_seqs_by_id(w);
    for (std::size_t i = 0; i < friends_w.size(); ++i) {
      const NodeId x = friends_w[i];
      if (x == v) continue;
      if (const auto seq_xv = g.edge_seq(x, v)) consider(x, seqs[i], *seq_xv);
    }
  } else {
    const auto seqs = g.follower_seqs_by_id(v);
    for (std::size_t i = 0; i < followers_v.size(); ++i) {
      const NodeId x = followers_v[i];
      if (x == w) continue;
      if (const auto seq_wx = g.edge_seq(w, x)) consider(x, *seq_wx, seqs[i]);
    }
  }

  double total = 0.0;
  for (const auto& c : out) total += c.probability;
  if (total <= 0.0) {
    out.clear();
    return;
  }
  for (auto& c : out) c.probability /= total;
}

}  // namespace detail

/// Candidates for the original of edge w->v with their normalized probabilities, ascending by id.
/// Throws std::invalid_argument when w->v is not an edge.
inline std::vector<Candidate> copy_prob(const FollowGraph& g, NodeId w, NodeId v, const FactorSet& factors) {
  const auto seq = g.edge_seq(w, v);
  if (!seq) throw std::invalid_argument("copy_prob: not an edge");
  std::vector<Candidate> out;
  detail::edge_candidates(g, w, v, *seq, factors, out);
  return out;
}

/// Expected imitation counts for every account.
struct CopyProbTable {
  std::vector<double> cf;
  /// Edges that received at least one candidate; equals the sum of cf up to rounding.
  std::size_t contributing_edges = 0;
};

/// Receives every contributing edge with its candidates, in ascending seq order.
using EdgeObserver = std::function<void(const FollowEdge&, std::span<const Candidate>)>;

/**
 * Accumulates, for every edge w->v, the probability that each candidate u was the original.
 *
 * Edges are cut into fixed-size blocks that workers process independently; the per-block
 * contributions are then folded in ascending seq order. The result is therefore bit-identical
 * for every worker count, and equal to a sequential pass over the edges.
 */
inline CopyProbTable cf_all(const FollowGraph& g, const FactorSet& factors, unsigned workers = 1,
                            const EdgeObserver& observer = {}) {
  constexpr std::size_t kBlockEdges = 8192;
  CopyProbTable table;
  table.cf.assign(g.num_nodes(), 0.0);
  const auto edges = g.edges();
  const std::size_t blocks = (edges.size() + kBlockEdges - 1) / kBlockEdges;
  workers = std::max(1u, workers);

  struct Block {
    std::vector<Candidate> candidates;
    std::vector<std::size_t> ends;  // one past the last candidate of each edge
  };

  auto fill = [&](std::size_t b, Block& out) {
    out.candidates.clear();
    out.ends.clear();
    std::vector<Candidate> scratch;
    const std::size_t lo = b * kBlockEdges;
    const std::size_t hi = std::min(edges.size(), lo + kBlockEdges);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& e = edges[i];
      detail::edge_candidates(g, e.follower, e.followee, e.seq, factors, scratch);
      out.candidates.insert(out.candidates.end(), scratch.begin(), scratch.end());
      out.ends.push_back(out.candidates.size());
    }
  };

  auto fold = [&](std::size_t b, const Block& block) {
    const std::size_t lo = b * kBlockEdges;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < block.ends.size(); ++k) {
      const std::size_t end = block.ends[k];
      if (end == begin) continue;
      const std::span<const Candidate> cands(block.candidates.data() + begin, end - begin);
      for (const auto& c : cands) table.cf[c.account] += c.probability;
      ++table.contributing_edges;
      if (observer) observer(edges[lo + k], cands);
      begin = end;
    }
  };

  const std::size_t batch = static_cast<std::size_t>(workers) * 4;
  std::vector<Block> buffers(std::min(batch, std::max<std::size_t>(blocks, 1)));
  for (std::size_t first = 0; first < blocks; first += buffers.size()) {
    const std::size_t count = std::min(buffers.size(), blocks - first);
    if (workers == 1 || count == 1) {
      for (std::size_t k = 0; k < count; ++k) fill(first + k, buffers[k]);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::jthread> pool;
      const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t k = next++; k < count; k = next++) fill(first + k, buffers[k]);
        });
      }
    }
    for (std::size_t k = 0; k < count; ++k) fold(first + k, buffers[k]);
  }
  return table;
}

/**
 * CF of a single account from its neighbourhood only: every follower w of u, every friend v of
 * w that u also follows. Each such edge w->v is scored against its full candidate set, and the
 * contributions are summed in ascending seq so the value matches cf_all exactly.
 */
inline double cf_local(const FollowGraph& g, NodeId u, const FactorSet& factors) {
  std::vector<std::pair<Seq, double>> contributions;
  std::vector<Candidate> scratch;
  g.check(u);
  for (const NodeId w : g.followers(u)) {
    const auto friends_w = g.friends(w);
    const auto seqs_w = g.friend_seqs(w);
    for (std::size_t i = 0; i < friends_w.size(); ++i) {
      const NodeId v = friends_w[i];
      if (v == u || !g.has_edge(u, v)) continue;
      detail::edge_candidates(g, w, v, seqs_w[i], factors, scratch);
      const auto it = std::lower_bound(scratch.begin(), scratch.end(), u,
                                       [](const Candidate& c, NodeId id) { return c.account < id; });
      if (it != scratch.end() && it->account == u) contributions.emplace_back(seqs_w[i], it->probability);
    }
  }
  std::sort(contributions.begin(), contributions.end());
  double total = 0.0;
  for (const auto& [seq, p] : contributions) total += p;
  return total;
}

}  // namespace earlyrank
