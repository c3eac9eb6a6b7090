#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsv.hpp"

namespace earlyrank {

/// Dense internal account index, 0..n-1.
using NodeId = std::uint32_t;
/// Account id as it appears in input files.
using ExternalId = std::uint64_t;
/// Global edge-creation sequence number; larger is newer.
using Seq = std::uint64_t;

struct FollowEdge {
  NodeId follower;
  NodeId followee;
  Seq seq;

  friend bool operator==(const FollowEdge&, const FollowEdge&) = default;
};

enum class NeighborKind { friends, followers, friends_nr, followers_nr };
enum class ListKind { friends, followers };

struct AccountMeta {
  ExternalId account = 0;
  std::int64_t created_at = 0;
  bool active_at_horizon = true;
  /// Ground-truth non-reciprocal follower count at the future horizon; empty when unlabeled.
  std::optional<std::uint64_t> fw_nr_horizon;
};

/**
 * Immutable directed follow graph.
 *
 * Each node keeps its friend and follower lists twice: ordered newest-first by edge seq
 * (the order the imitation factors reason about) and ordered by node id (for membership
 * tests and intersections). Both views carry the seq of the underlying edge.
 */
class FollowGraph {
 public:
  FollowGraph() = default;

  /// Builds a graph over nodes 0..n-1. External ids default to the dense ids.
  /// Throws DataError on self-loops, duplicate edges, duplicate seqs or out-of-range nodes.
  static FollowGraph from_edges(std::size_t n, std::vector<FollowEdge> edges,
                                std::vector<ExternalId> external_ids = {}) {
    FollowGraph g;
    if (external_ids.empty()) {
      external_ids.resize(n);
      std::iota(external_ids.begin(), external_ids.end(), ExternalId{0});
    }
    if (external_ids.size() != n) throw DataError("external id table size does not match node count");
    for (const auto& e : edges) {
      if (e.follower >= n || e.followee >= n) throw DataError("edge refers to a node outside 0..n-1");
      if (e.follower == e.followee) throw DataError("self-loop on node " + std::to_string(e.follower));
    }
    std::sort(edges.begin(), edges.end(), [](const FollowEdge& a, const FollowEdge& b) { return a.seq < b.seq; });
    for (std::size_t i = 1; i < edges.size(); ++i) {
      if (edges[i].seq == edges[i - 1].seq) throw DataError("duplicate seq " + std::to_string(edges[i].seq));
    }

    g.n_ = n;
    g.external_ = std::move(external_ids);
    g.index_.reserve(n);
    for (NodeId u = 0; u < n; ++u) {
      if (!g.index_.emplace(g.external_[u], u).second) {
        throw DataError("duplicate external account id " + std::to_string(g.external_[u]));
      }
    }
    g.edges_ = std::move(edges);
    build_side(g.out_, n, g.edges_, [](const FollowEdge& e) { return std::pair{e.follower, e.followee}; });
    build_side(g.in_, n, g.edges_, [](const FollowEdge& e) { return std::pair{e.followee, e.follower}; });

    for (NodeId u = 0; u < n; ++u) {
      const auto ids = g.out_.ids_by_id(u);
      for (std::size_t i = 1; i < ids.size(); ++i) {
        if (ids[i] == ids[i - 1]) {
          throw DataError("duplicate edge " + std::to_string(g.external_[u]) + " -> " +
                          std::to_string(g.external_[ids[i]]));
        }
      }
    }
    return g;
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  /// All edges, ascending by seq.
  std::span<const FollowEdge> edges() const noexcept { return edges_; }

  /// Accounts followed by u, newest first.
  std::span<const NodeId> friends(NodeId u) const { return out_.ids_by_seq(check(u)); }
  /// Accounts following u, newest first.
  std::span<const NodeId> followers(NodeId u) const { return in_.ids_by_seq(check(u)); }
  std::span<const Seq> friend_seqs(NodeId u) const { return out_.seqs_by_seq(check(u)); }
  std::span<const Seq> follower_seqs(NodeId u) const { return in_.seqs_by_seq(check(u)); }

  /// Friend and follower lists sorted by ascending node id.
  std::span<const NodeId> friends_by_id(NodeId u) const { return out_.ids_by_id(check(u)); }
  std::span<const NodeId> followers_by_id(NodeId u) const { return in_.ids_by_id(check(u)); }
  std::span<const Seq> friend_seqs_by_id(NodeId u) const { return out_.seqs_by_id(check(u)); }
  std::span<const Seq> follower_seqs_by_id(NodeId u) const { return in_.seqs_by_id(check(u)); }

  std::size_t friend_count(NodeId u) const { return out_.degree(check(u)); }
  std::size_t follower_count(NodeId u) const { return in_.degree(check(u)); }

  /// Seq of edge from -> to, if present.
  std::optional<Seq> edge_seq(NodeId from, NodeId to) const {
    check(from);
    check(to);
    // search whichever side is shorter
    if (out_.degree(from) <= in_.degree(to)) return out_.find(from, to);
    return in_.find(to, from);
  }

  bool has_edge(NodeId from, NodeId to) const { return edge_seq(from, to).has_value(); }
  bool reciprocal(NodeId a, NodeId b) const { return has_edge(a, b) && has_edge(b, a); }

  ExternalId external_id(NodeId u) const { return external_[check(u)]; }
  std::optional<NodeId> find(ExternalId id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId check(NodeId u) const {
    if (u >= n_) throw std::out_of_range("account id " + std::to_string(u) + " out of range");
    return u;
  }

 private:
  // One direction of the adjacency in CSR form.
  struct Side {
    std::vector<std::size_t> offsets;
    std::vector<NodeId> by_seq;
    std::vector<Seq> by_seq_seq;
    std::vector<NodeId> by_id;
    std::vector<Seq> by_id_seq;

    std::size_t degree(NodeId u) const { return offsets[u + 1] - offsets[u]; }
    std::span<const NodeId> ids_by_seq(NodeId u) const { return slice(by_seq, u); }
    std::span<const Seq> seqs_by_seq(NodeId u) const { return slice(by_seq_seq, u); }
    std::span<const NodeId> ids_by_id(NodeId u) const { return slice(by_id, u); }
    std::span<const Seq> seqs_by_id(NodeId u) const { return slice(by_id_seq, u); }

    std::optional<Seq> find(NodeId owner, NodeId member) const {
      const auto ids = ids_by_id(owner);
      const auto it = std::lower_bound(ids.begin(), ids.end(), member);
      if (it == ids.end() || *it != member) return std::nullopt;
      return seqs_by_id(owner)[static_cast<std::size_t>(it - ids.begin())];
    }

    template <typename T>
    std::span<const T> slice(const std::vector<T>& v, NodeId u) const {
      return std::span<const T>(v).subspan(offsets[u], offsets[u + 1] - offsets[u]);
    }
  };

  // edges must be sorted by ascending seq.
  template <typename Project>
  static void build_side(Side& side, std::size_t n, const std::vector<FollowEdge>& edges, Project project) {
    side.offsets.assign(n + 1, 0);
    for (const auto& e : edges) ++side.offsets[project(e).first + 1];
    std::partial_sum(side.offsets.begin(), side.offsets.end(), side.offsets.begin());
    const std::size_t m = edges.size();
    side.by_seq.resize(m);
    side.by_seq_seq.resize(m);
    auto cursor = side.offsets;
    // walking newest to oldest fills each list newest-first
    for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
      const auto [owner, member] = project(*it);
      const auto pos = cursor[owner]++;
      side.by_seq[pos] = member;
      side.by_seq_seq[pos] = it->seq;
    }
    side.by_id = side.by_seq;
    side.by_id_seq = side.by_seq_seq;
    std::vector<std::pair<NodeId, Seq>> scratch;
    for (std::size_t u = 0; u < n; ++u) {
      const auto lo = side.offsets[u];
      const auto hi = side.offsets[u + 1];
      scratch.clear();
      for (auto i = lo; i < hi; ++i) scratch.emplace_back(side.by_id[i], side.by_id_seq[i]);
      std::sort(scratch.begin(), scratch.end());
      for (auto i = lo; i < hi; ++i) {
        side.by_id[i] = scratch[i - lo].first;
        side.by_id_seq[i] = scratch[i - lo].second;
      }
    }
  }

  std::size_t n_ = 0;
  std::vector<FollowEdge> edges_;
  std::vector<ExternalId> external_;
  std::unordered_map<ExternalId, NodeId> index_;
  Side out_;
  Side in_;
};

/// Ordered neighbor list; the _nr kinds drop reciprocal partners and keep the newest-first order.
inline std::vector<NodeId> neighbors(const FollowGraph& g, NodeId u, NeighborKind kind) {
  const bool outgoing = kind == NeighborKind::friends || kind == NeighborKind::friends_nr;
  const bool drop_reciprocal = kind == NeighborKind::friends_nr || kind == NeighborKind::followers_nr;
  const auto list = outgoing ? g.friends(u) : g.followers(u);
  if (!drop_reciprocal) return {list.begin(), list.end()};
  std::vector<NodeId> out;
  out.reserve(list.size());
  for (const NodeId x : list) {
    if (!g.reciprocal(u, x)) out.push_back(x);
  }
  return out;
}

inline std::size_t friends_nr_count(const FollowGraph& g, NodeId u) {
  std::size_t count = 0;
  for (const NodeId x : g.friends_by_id(u)) count += g.has_edge(x, u) ? 0 : 1;
  return count;
}

inline std::size_t followers_nr_count(const FollowGraph& g, NodeId u) {
  std::size_t count = 0;
  for (const NodeId x : g.followers_by_id(u)) count += g.has_edge(u, x) ? 0 : 1;
  return count;
}

/// 0-based position of member in owner's newest-first list, or empty when absent.
inline std::optional<std::size_t> idx(const FollowGraph& g, NodeId owner, ListKind kind, NodeId member) {
  const auto seq = kind == ListKind::friends ? g.edge_seq(owner, member) : g.edge_seq(member, owner);
  if (!seq) return std::nullopt;
  const auto seqs = kind == ListKind::friends ? g.friend_seqs(owner) : g.follower_seqs(owner);
  const auto it = std::lower_bound(seqs.begin(), seqs.end(), *seq, std::greater<>{});
  return static_cast<std::size_t>(it - seqs.begin());
}

/// A loaded graph together with its per-account metadata (indexed by dense id).
struct Snapshot {
  FollowGraph graph;
  std::vector<AccountMeta> meta;
};

/// Reads the meta TSV: account_id, created_at, active{0,1}, fw_nr_horizon (may be empty).
inline std::vector<AccountMeta> load_meta(const std::string& path) {
  std::vector<AccountMeta> meta;
  std::unordered_map<ExternalId, std::size_t> seen;
  tsv::for_each_record(path, [&](std::size_t line, const std::vector<std::string_view>& f) {
    const auto where = tsv::location(path, line);
    if (f.size() < 3 || f.size() > 4) throw DataError(where + ": expected 4 tab-separated fields");
    AccountMeta m;
    const auto id = tsv::parse_number<ExternalId>(f[0]);
    const auto created = tsv::parse_number<std::int64_t>(f[1]);
    if (!id) throw DataError(where + ": bad account id '" + std::string(f[0]) + "'");
    if (!created) throw DataError(where + ": bad created_at '" + std::string(f[1]) + "'");
    if (f[2] != "0" && f[2] != "1") throw DataError(where + ": active flag must be 0 or 1");
    m.account = *id;
    m.created_at = *created;
    m.active_at_horizon = f[2] == "1";
    if (f.size() == 4 && !f[3].empty()) {
      const auto fw = tsv::parse_number<std::uint64_t>(f[3]);
      if (!fw) throw DataError(where + ": bad fw_nr_horizon '" + std::string(f[3]) + "'");
      m.fw_nr_horizon = *fw;
    }
    if (!seen.emplace(m.account, line).second) {
      throw DataError(where + ": duplicate account " + std::to_string(m.account));
    }
    meta.push_back(m);
  });
  std::sort(meta.begin(), meta.end(), [](const auto& a, const auto& b) { return a.account < b.account; });
  return meta;
}

/**
 * Loads the edge TSV (seq, follower_id, followee_id) against the meta table.
 * Dense ids follow ascending external id. Errors carry file:line.
 */
inline Snapshot load_snapshot(const std::string& edge_path, const std::string& meta_path) {
  Snapshot snap;
  snap.meta = load_meta(meta_path);
  const std::size_t n = snap.meta.size();
  std::vector<ExternalId> external(n);
  std::unordered_map<ExternalId, NodeId> index;
  index.reserve(n);
  for (NodeId u = 0; u < n; ++u) {
    external[u] = snap.meta[u].account;
    index.emplace(external[u], u);
  }

  std::vector<FollowEdge> edges;
  std::unordered_map<std::uint64_t, std::size_t> pair_line;
  std::unordered_map<Seq, std::size_t> seq_line;
  tsv::for_each_record(edge_path, [&](std::size_t line, const std::vector<std::string_view>& f) {
    const auto where = tsv::location(edge_path, line);
    if (f.size() != 3) throw DataError(where + ": expected 3 tab-separated fields");
    const auto seq = tsv::parse_number<Seq>(f[0]);
    const auto a = tsv::parse_number<ExternalId>(f[1]);
    const auto b = tsv::parse_number<ExternalId>(f[2]);
    if (!seq || !a || !b) throw DataError(where + ": malformed edge record");
    const auto ia = index.find(*a);
    const auto ib = index.find(*b);
    if (ia == index.end()) throw DataError(where + ": unknown account " + std::to_string(*a));
    if (ib == index.end()) throw DataError(where + ": unknown account " + std::to_string(*b));
    if (ia->second == ib->second) throw DataError(where + ": self-loop on account " + std::to_string(*a));
    const auto key = (static_cast<std::uint64_t>(ia->second) << 32) | ib->second;
    if (const auto [it, fresh] = pair_line.emplace(key, line); !fresh) {
      throw DataError(where + ": duplicate edge (first seen on line " + std::to_string(it->second) + ")");
    }
    if (const auto [it, fresh] = seq_line.emplace(*seq, line); !fresh) {
      throw DataError(where + ": duplicate seq " + std::to_string(*seq) + " (first seen on line " +
                      std::to_string(it->second) + ")");
    }
    edges.push_back({ia->second, ib->second, *seq});
  });
  snap.graph = FollowGraph::from_edges(n, std::move(edges), std::move(external));
  return snap;
}

/// Writes edges in ascending seq using external ids; load_snapshot reads this back unchanged.
inline void write_edges(std::ostream& out, const FollowGraph& g) {
  for (const auto& e : g.edges()) {
    out << e.seq << '\t' << g.external_id(e.follower) << '\t' << g.external_id(e.followee) << '\n';
  }
}

inline void write_meta(std::ostream& out, std::span<const AccountMeta> meta) {
  for (const auto& m : meta) {
    out << m.account << '\t' << m.created_at << '\t' << (m.active_at_horizon ? 1 : 0) << '\t';
    if (m.fw_nr_horizon) out << *m.fw_nr_horizon;
    out << '\n';
  }
}

}  // namespace earlyrank
