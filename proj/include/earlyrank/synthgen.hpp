#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "graph.hpp"
#include "random.hpp"

namespace earlyrank {

struct SynthParams {
  std::size_t n_accounts = 2000;
  std::size_t n_events = 20000;
  double adopter_fraction = 0.1;
  /// Probability that a user who picked friend u copies one of u's links, by u's kind.
  double copy_prob_adopter = 0.6;
  double copy_prob_other = 0.0;
  std::size_t horizon_events = 100000;
  std::uint64_t seed = 1;

  /// Fraction of accounts present before the first event; the rest join at evenly spaced events.
  double initial_fraction = 0.1;
  /// Preferential-attachment follows made by an account when it joins.
  std::size_t follows_on_join = 1;
  /// Probability that a fresh link is followed back.
  double reciprocation_prob = 0.2;
  /// Probability that a fresh link from an adopter / other user goes to a recently joined account.
  double discover_prob_adopter = 0.9;
  double discover_prob_other = 0.7;
  /// How many of the most recent joins count as "recent".
  std::size_t recent_window = 80;
  /// Spread of the latent account quality q in [1 - spread, 1]. Adopters accept a fresh-link target
  /// with probability q, and so does every preferential-attachment link after the snapshot. 0 disables.
  double quality_spread = 1.0;
  /// Preferential-attachment weight every account starts with (added to its follower count).
  std::size_t attraction_offset = 30;
  /// Extra preferential-attachment weight an adopter starts with.
  std::size_t adopter_attraction = 20;
  /// A copy picks among the imitated user's `copy_recent` newest links with probability copy_recent_prob.
  std::size_t copy_recent = 5;
  double copy_recent_prob = 0.8;
  /// Per-event probability of closing a mutual-friend triangle with reciprocal links (noise for the Nonrec filter).
  double noise_triangle_prob = 0.05;
  /// Fraction of accounts that go quiet after the snapshot: no new links in or out.
  double inactive_fraction = 0.2;
  std::int64_t seconds_per_event = 100;
  /// How many times more often an adopter acts than another user.
  double adopter_activity = 3.0;

  void validate() const {
    auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n_accounts < 2) throw std::invalid_argument("synth: need at least 2 accounts");
    if (n_events < n_accounts) throw std::invalid_argument("synth: n_events must be >= n_accounts");
    if (!unit(adopter_fraction) || !unit(copy_prob_adopter) || !unit(copy_prob_other) || !unit(initial_fraction) ||
        !unit(reciprocation_prob) || !unit(discover_prob_adopter) || !unit(discover_prob_other) ||
        !unit(noise_triangle_prob) || !unit(inactive_fraction) || !unit(copy_recent_prob) ||
        !unit(quality_spread)) {
      throw std::invalid_argument("synth: probabilities and fractions must lie in [0, 1]");
    }
    if (copy_prob_adopter < copy_prob_other) throw std::invalid_argument("synth: copy_prob_adopter < copy_prob_other");
    if (!(adopter_activity >= 1.0)) throw std::invalid_argument("synth: adopter_activity must be >= 1");
    if (seconds_per_event <= 0) throw std::invalid_argument("synth: seconds_per_event must be > 0");
  }
};

struct CopyEvent {
  Seq copied_seq;
  Seq original_seq;
  NodeId imitated;

  friend bool operator==(const CopyEvent&, const CopyEvent&) = default;
};

struct GroundTruth {
  /// Copies made before the snapshot, in creation order.
  std::vector<CopyEvent> copy_events;
  std::vector<std::size_t> true_copy_count;
  std::vector<std::uint64_t> fw_nr_horizon;
  /// Designated early adopters, ascending.
  std::vector<NodeId> adopters;
};

struct SynthOutput {
  /// Snapshot edges; account ids equal node ids.
  std::vector<FollowEdge> edges;
  std::vector<AccountMeta> meta;
  GroundTruth truth;
  std::int64_t snapshot_time = 0;

  FollowGraph graph() const { return FollowGraph::from_edges(meta.size(), edges); }
};

namespace detail {

class SynthState {
 public:
  explicit SynthState(const SynthParams& params)
      : p_(params), rng_(params.seed), friends_(params.n_accounts), friend_seq_(params.n_accounts),
        followers_(params.n_accounts),
        adopter_(params.n_accounts, false), active_(params.n_accounts, true), quality_(params.n_accounts, 1.0) {}

  SynthOutput run() {
    const std::size_t n = p_.n_accounts;
    SynthOutput out;
    out.meta.resize(n);

    std::vector<NodeId> perm(n);
    for (NodeId u = 0; u < n; ++u) perm[u] = u;
    shuffle(perm, rng_);
    const auto adopters = static_cast<std::size_t>(p_.adopter_fraction * static_cast<double>(n) + 0.5);
    for (std::size_t i = 0; i < adopters; ++i) adopter_[perm[i]] = true;
    shuffle(perm, rng_);
    const auto inactive = static_cast<std::size_t>(p_.inactive_fraction * static_cast<double>(n) + 0.5);
    for (std::size_t i = 0; i < inactive; ++i) active_[perm[i]] = false;
    // skewed towards low quality: few accounts are very good sources
    for (NodeId u = 0; u < n; ++u) {
      const double x = uniform01(rng_);
      quality_[u] = 1.0 - p_.quality_spread * (1.0 - x * x);
    }

    // join schedule: account ids join in id order
    const auto initial =
        std::max<std::size_t>(2, static_cast<std::size_t>(p_.initial_fraction * static_cast<double>(n)));
    std::vector<std::size_t> join_step(n, 0);
    for (std::size_t k = initial; k < n; ++k) join_step[k] = (k - initial + 1) * p_.n_events / (n - initial + 1);
    for (NodeId u = 0; u < n; ++u) {
      out.meta[u].account = u;
      out.meta[u].created_at = static_cast<std::int64_t>(join_step[u]) * p_.seconds_per_event;
      out.meta[u].active_at_horizon = active_[u];
    }

    std::size_t next_join = 0;
    auto admit = [&](std::size_t step) {
      while (next_join < n && join_step[next_join] <= step) {
        const auto u = static_cast<NodeId>(next_join++);
        joined_.push_back(u);
        urn_.insert(urn_.end(), p_.attraction_offset, u);
        if (adopter_[u]) urn_.insert(urn_.end(), p_.adopter_attraction, u);
        for (std::size_t k = 0; k < p_.follows_on_join && joined_.size() > 1; ++k) fresh_link(u, false);
      }
    };

    for (std::size_t step = 0; step < p_.n_events; ++step) {
      admit(step);
      this->step();
    }
    admit(p_.n_events);
    out.snapshot_time = static_cast<std::int64_t>(p_.n_events) * p_.seconds_per_event;
    out.edges = edges_;
    out.truth.copy_events = events_;

    horizon_ = true;
    for (NodeId u = 0; u < n; ++u) {
      if (active_[u]) active_joined_.push_back(u);
    }
    for (std::size_t step = 0; step < p_.horizon_events && active_joined_.size() > 1; ++step) this->step();

    out.truth.true_copy_count.assign(n, 0);
    for (const auto& e : out.truth.copy_events) ++out.truth.true_copy_count[e.imitated];
    out.truth.fw_nr_horizon.assign(n, 0);
    for (NodeId u = 0; u < n; ++u) {
      std::uint64_t nr = 0;
      for (const NodeId x : followers_[u]) nr += has(u, x) ? 0 : 1;
      out.truth.fw_nr_horizon[u] = nr;
      out.meta[u].fw_nr_horizon = nr;
      if (adopter_[u]) out.truth.adopters.push_back(u);
    }
    return out;
  }

 private:
  static std::uint64_t key(NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }
  bool has(NodeId a, NodeId b) const { return edge_set_.count(key(a, b)) != 0; }
  bool can_receive(NodeId v) const { return !horizon_ || active_[v]; }

  Seq link(NodeId a, NodeId b) {
    const Seq seq = ++seq_;
    edge_set_.insert(key(a, b));
    friends_[a].push_back(b);
    friend_seq_[a].push_back(seq);
    followers_[b].push_back(a);
    urn_.push_back(b);
    if (!horizon_) edges_.push_back({a, b, seq});
    return seq;
  }

  // a -> b is allowed if new, not a self-loop, and does not reverse an information link
  bool allowed(NodeId a, NodeId b) const {
    return a != b && !has(a, b) && !protected_.count(key(b, a)) && can_receive(b);
  }

  NodeId random_joined() {
    const auto& pool = horizon_ ? active_joined_ : joined_;
    for (;;) {
      const NodeId w = pool[uniform_index(rng_, pool.size())];
      if (adopter_[w] || p_.adopter_activity == 1.0 || bernoulli(rng_, 1.0 / p_.adopter_activity)) return w;
    }
  }

  bool fresh_link(NodeId w, bool allow_follow_back) {
    const double discover = adopter_[w] ? p_.discover_prob_adopter : p_.discover_prob_other;
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeId t;
      if (!horizon_ && bernoulli(rng_, discover)) {
        const std::size_t window = std::min(p_.recent_window, joined_.size());
        t = joined_[joined_.size() - 1 - uniform_index(rng_, window)];
        if (adopter_[w] && !bernoulli(rng_, quality_[t])) continue;
      } else {
        t = urn_[uniform_index(rng_, urn_.size())];
        if ((horizon_ || adopter_[w]) && !bernoulli(rng_, quality_[t])) continue;
      }
      if (!allowed(w, t)) continue;
      link(w, t);
      if (allow_follow_back && bernoulli(rng_, p_.reciprocation_prob) && allowed(t, w) && can_receive(w)) link(t, w);
      return true;
    }
    return false;
  }

  bool try_copy(NodeId w, NodeId u) {
    const auto& source = friends_[u];
    if (source.empty()) return false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::size_t i;
      if (p_.copy_recent > 0 && bernoulli(rng_, p_.copy_recent_prob)) {
        const std::size_t window = std::min(p_.copy_recent, source.size());
        i = source.size() - 1 - static_cast<std::size_t>(uniform_index(rng_, window));
      } else {
        i = static_cast<std::size_t>(uniform_index(rng_, source.size()));
      }
      const NodeId v = source[i];
      if (v == w || has(v, u) || has(v, w) || !allowed(w, v)) continue;
      const Seq original = friend_seq_[u][i];
      const Seq copied = link(w, v);
      protected_.insert(key(u, v));
      protected_.insert(key(w, v));
      if (!horizon_) events_.push_back({copied, original, u});
      return true;
    }
    return false;
  }

  bool try_noise_triangle(NodeId w) {
    const auto& fw = friends_[w];
    if (fw.empty()) return false;
    const NodeId u = fw[uniform_index(rng_, fw.size())];
    if (!has(u, w) || friends_[u].empty()) return false;
    const NodeId v = friends_[u][uniform_index(rng_, friends_[u].size())];
    if (!has(v, u) || !allowed(w, v) || !allowed(v, w) || !can_receive(w)) return false;
    link(w, v);
    link(v, w);
    return true;
  }

  void step() {
    const NodeId w = random_joined();
    if (p_.noise_triangle_prob > 0.0 && bernoulli(rng_, p_.noise_triangle_prob) && try_noise_triangle(w)) return;
    const auto& fw = friends_[w];
    if (!fw.empty()) {
      const NodeId u = fw[uniform_index(rng_, fw.size())];
      const double copy = adopter_[u] ? p_.copy_prob_adopter : p_.copy_prob_other;
      if (copy > 0.0 && bernoulli(rng_, copy) && try_copy(w, u)) return;
    }
    fresh_link(w, true);
  }

  const SynthParams& p_;
  Rng rng_;
  std::vector<std::vector<NodeId>> friends_;
  std::vector<std::vector<Seq>> friend_seq_;
  std::vector<std::vector<NodeId>> followers_;
  std::vector<bool> adopter_;
  std::vector<bool> active_;
  std::vector<double> quality_;
  std::vector<NodeId> joined_;
  std::vector<NodeId> active_joined_;
  std::vector<NodeId> urn_;
  std::unordered_set<std::uint64_t> edge_set_;
  std::unordered_set<std::uint64_t> protected_;
  std::vector<FollowEdge> edges_;
  std::vector<CopyEvent> events_;
  Seq seq_ = 0;
  bool horizon_ = false;
};

}  // namespace detail

/**
 * Synthetic follow graph with planted link copying.
 *
 * Each event picks a random user w. With probability equal to the copy propensity of a random
 * friend u, w copies one of u's non-reciprocal links (a planted copy); otherwise w makes a fresh
 * link by preferential attachment on follower counts, or to a recently joined account. Copied and
 * original links are never reciprocated later. Adopters act more often and mostly discover recent
 * accounts, keeping the ones of high latent quality. After `n_events` the snapshot is frozen; the
 * next `horizon_events` continue among the active accounts, with preferential attachment now also
 * screened by quality, to produce fw_nr_horizon. Same params, same output.
 */
inline SynthOutput generate(const SynthParams& params) {
  params.validate();
  return detail::SynthState(params).run();
}

/// Writes <prefix>.edges.tsv, <prefix>.meta.tsv, <prefix>.truth.tsv and <prefix>.adopters.txt.
inline void write_synth(const SynthOutput& out, const std::string& prefix) {
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    return f;
  };
  {
    auto f = open(prefix + ".edges.tsv");
    f << "# seq\tfollower_id\tfollowee_id\n";
    for (const auto& e : out.edges) f << e.seq << '\t' << e.follower << '\t' << e.followee << '\n';
  }
  {
    auto f = open(prefix + ".meta.tsv");
    f << "# account_id\tcreated_at\tactive\tfw_nr_horizon\n";
    f << "# snapshot_time=" << out.snapshot_time << '\n';
    write_meta(f, out.meta);
  }
  {
    auto f = open(prefix + ".truth.tsv");
    f << "# copied_seq\toriginal_seq\timitated_account\n";
    for (const auto& e : out.truth.copy_events) f << e.copied_seq << '\t' << e.original_seq << '\t' << e.imitated << '\n';
  }
  {
    auto f = open(prefix + ".adopters.txt");
    for (const NodeId u : out.truth.adopters) f << u << '\n';
  }
}

}  // namespace earlyrank
