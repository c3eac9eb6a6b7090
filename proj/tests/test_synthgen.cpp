#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <earlyrank/graph.hpp>
#include <earlyrank/imitation.hpp>
#include <earlyrank/io.hpp>
#include <earlyrank/synthgen.hpp>

using namespace earlyrank;

namespace {

SynthParams small(std::uint64_t seed) {
  SynthParams p;
  p.seed = seed;
  p.n_accounts = 400;
  p.n_events = 4000;
  p.horizon_events = 4000;
  return p;
}

// Settings under which adopters and other accounts are statistically indistinguishable apart
// from copying.
SynthParams neutral(std::uint64_t seed) {
  SynthParams p;
  p.seed = seed;
  p.n_accounts = 1000;
  p.n_events = 10000;
  p.horizon_events = 0;
  p.adopter_activity = 1.0;
  p.adopter_attraction = 0;
  p.discover_prob_adopter = 0.7;
  p.discover_prob_other = 0.7;
  p.quality_spread = 0.0;
  return p;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double adopter_to_other_ratio(const SynthParams& base, int seeds) {
  double adopter_sum = 0.0;
  double other_sum = 0.0;
  double adopters = 0.0;
  double others = 0.0;
  for (int seed = 1; seed <= seeds; ++seed) {
    auto p = base;
    p.seed = static_cast<std::uint64_t>(seed);
    const auto out = generate(p);
    const auto cf = cf_all(out.graph(), FactorSet{}).cf;
    std::vector<bool> is_adopter(p.n_accounts, false);
    for (const NodeId a : out.truth.adopters) is_adopter[a] = true;
    for (NodeId u = 0; u < p.n_accounts; ++u) {
      (is_adopter[u] ? adopter_sum : other_sum) += cf[u];
      (is_adopter[u] ? adopters : others) += 1.0;
    }
  }
  return (adopter_sum / adopters) / (other_sum / others);
}

}  // namespace

TEST(Synth, SameSeedSameOutput) {
  const auto a = generate(small(5));
  const auto b = generate(small(5));
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.truth.copy_events, b.truth.copy_events);
  EXPECT_EQ(a.truth.fw_nr_horizon, b.truth.fw_nr_horizon);
  EXPECT_NE(generate(small(6)).edges, a.edges);
}

TEST(Synth, WrittenFilesAreByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "earlyrank_synth_files";
  std::filesystem::create_directories(dir);
  const auto one = (dir / "one").string();
  const auto two = (dir / "two").string();
  write_synth(generate(small(9)), one);
  write_synth(generate(small(9)), two);
  for (const char* ext : {".edges.tsv", ".meta.tsv", ".truth.tsv", ".adopters.txt"}) {
    EXPECT_EQ(slurp(one + ext), slurp(two + ext)) << ext;
    EXPECT_FALSE(slurp(one + ext).empty()) << ext;
  }
  const auto snap = load_snapshot(one + ".edges.tsv", one + ".meta.tsv");
  EXPECT_EQ(snap.graph.num_nodes(), 400u);
  EXPECT_EQ(declared_snapshot_time(one + ".meta.tsv"), generate(small(9)).snapshot_time);
  std::filesystem::remove_all(dir);
}

TEST(Synth, NoCopyingNoEvents) {
  auto p = small(3);
  p.copy_prob_adopter = 0.0;
  p.copy_prob_other = 0.0;
  const auto out = generate(p);
  EXPECT_TRUE(out.truth.copy_events.empty());
  for (const auto c : out.truth.true_copy_count) EXPECT_EQ(c, 0u);
}

TEST(Synth, OnlyAdoptersAreImitated) {
  auto p = small(4);
  p.copy_prob_adopter = 1.0;
  p.copy_prob_other = 0.0;
  p.adopter_fraction = 0.1;
  const auto out = generate(p);
  ASSERT_FALSE(out.truth.copy_events.empty());
  EXPECT_EQ(out.truth.adopters.size(), 40u);
  for (const auto& e : out.truth.copy_events) {
    EXPECT_TRUE(std::binary_search(out.truth.adopters.begin(), out.truth.adopters.end(), e.imitated));
  }
}

TEST(Synth, RejectsInvalidParams) {
  auto p = small(1);
  p.copy_prob_other = 0.9;
  p.copy_prob_adopter = 0.5;
  EXPECT_THROW(generate(p), std::invalid_argument);
  p = small(1);
  p.n_events = p.n_accounts - 1;
  EXPECT_THROW(generate(p), std::invalid_argument);
  p = small(1);
  p.adopter_fraction = 1.5;
  EXPECT_THROW(generate(p), std::invalid_argument);
  p = small(1);
  p.adopter_activity = 0.5;
  EXPECT_THROW(generate(p), std::invalid_argument);
}

TEST(SynthProperties, CopyEventsReplayAgainstSnapshot) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto out = generate(small(seed));
    const auto g = out.graph();
    std::map<Seq, FollowEdge> by_seq;
    for (const auto& e : out.edges) by_seq[e.seq] = e;
    ASSERT_FALSE(out.truth.copy_events.empty());
    for (const auto& ev : out.truth.copy_events) {
      ASSERT_TRUE(by_seq.count(ev.copied_seq));
      ASSERT_TRUE(by_seq.count(ev.original_seq));
      const auto copied = by_seq[ev.copied_seq];
      const auto original = by_seq[ev.original_seq];
      const NodeId w = copied.follower;
      const NodeId v = copied.followee;
      const NodeId u = ev.imitated;
      EXPECT_EQ(original.follower, u);
      EXPECT_EQ(original.followee, v);
      EXPECT_TRUE(structure(g, u, v, w));
      EXPECT_TRUE(time_ok(g, u, v, w));
      EXPECT_TRUE(nonrec(g, u, v, w, NonrecVariant::copied_link));
      EXPECT_TRUE(nonrec(g, u, v, w, NonrecVariant::original_link));
    }
  }
}

TEST(SynthProperties, CopyCountsBoundedByImitationCapacity) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto out = generate(small(seed));
    const auto g = out.graph();
    std::vector<std::size_t> recount(g.num_nodes(), 0);
    for (const auto& ev : out.truth.copy_events) ++recount[ev.imitated];
    EXPECT_EQ(recount, out.truth.true_copy_count);
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      EXPECT_LE(out.truth.true_copy_count[u], g.follower_count(u) * g.friend_count(u));
    }
  }
}

TEST(SynthProperties, PlantedCopiesAreCandidatesOfTheirEdge) {
  const auto out = generate(small(2));
  const auto g = out.graph();
  std::map<Seq, NodeId> imitated;
  for (const auto& ev : out.truth.copy_events) imitated[ev.copied_seq] = ev.imitated;
  std::size_t found = 0;
  cf_all(g, FactorSet{true, true, false, NonrecVariant::copied_link}, 1,
         [&](const FollowEdge& e, std::span<const Candidate> c) {
           const auto it = imitated.find(e.seq);
           if (it == imitated.end()) return;
           for (const auto& x : c) found += x.account == it->second ? 1 : 0;
         });
  EXPECT_EQ(found, imitated.size());
}

TEST(SynthProperties, SnapshotIsFrozenBeforeHorizon) {
  auto p = small(8);
  const auto with = generate(p);
  p.horizon_events = 0;
  const auto without = generate(p);
  EXPECT_EQ(with.edges, without.edges);
  EXPECT_EQ(with.truth.copy_events, without.truth.copy_events);
  for (const auto& m : with.meta) {
    EXPECT_LE(m.created_at, with.snapshot_time);
    ASSERT_TRUE(m.fw_nr_horizon.has_value());
  }
  // without a horizon the ground truth is the snapshot's own non-reciprocal follower count
  const auto g = without.graph();
  for (NodeId u = 0; u < g.num_nodes(); ++u) EXPECT_EQ(without.truth.fw_nr_horizon[u], followers_nr_count(g, u));
}

TEST(SynthProperties, WithoutCopyingAdoptersLookLikeEveryoneElse) {
  auto p = neutral(1);
  p.copy_prob_adopter = 0.0;
  p.copy_prob_other = 0.0;
  const double ratio = adopter_to_other_ratio(p, 20);
  EXPECT_GT(ratio, 0.85);
  EXPECT_LT(ratio, 1.15);
}

TEST(SynthProperties, CopyingLiftsAdopterImitationCounts) {
  const double ratio = adopter_to_other_ratio(neutral(1), 20);
  EXPECT_GT(ratio, 1.5);
}
