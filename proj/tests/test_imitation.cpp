#include <gtest/gtest.h>

#include <numeric>

#include <earlyrank/imitation.hpp>

#include "support.hpp"

using namespace earlyrank;
using testing_support::all_factor_sets;
using testing_support::chain_graph;
using testing_support::CopyOracle;
using testing_support::random_graph;

namespace {

constexpr NodeId u = 0;
constexpr NodeId v = 1;
constexpr NodeId w = 2;

// u->v (1), w->u (2), w->v (3): w copied u's link
FollowGraph copy_triangle() { return chain_graph(3, {{u, v}, {w, u}, {w, v}}); }

const FactorSet kNone{};

}  // namespace

TEST(Structure, CopyTriangle) {
  EXPECT_TRUE(structure(copy_triangle(), u, v, w));
}

TEST(Structure, MissingCopiedEdge) {
  EXPECT_FALSE(structure(chain_graph(3, {{u, v}, {w, u}}), u, v, w));
}

TEST(Structure, DirectedCycleIsNotATriad) {
  const auto g = chain_graph(3, {{u, v}, {v, w}, {w, u}});
  EXPECT_FALSE(structure(g, u, v, w));
}

TEST(Structure, DegenerateNodes) {
  const auto g = copy_triangle();
  EXPECT_FALSE(structure(g, u, u, w));
  EXPECT_FALSE(structure(g, u, v, v));
}

TEST(TimeOk, CopyCreatedLast) {
  EXPECT_TRUE(time_ok(copy_triangle(), u, v, w));
}

TEST(TimeOk, CopyOlderThanOriginal) {
  // w->v (1), u->v (2), w->u (3)
  const auto g = chain_graph(3, {{w, v}, {u, v}, {w, u}});
  EXPECT_EQ(idx(g, v, ListKind::followers, w), 1u);
  EXPECT_EQ(idx(g, v, ListKind::followers, u), 0u);
  EXPECT_FALSE(time_ok(g, u, v, w));
}

TEST(TimeOk, OriginalNewerThanCopy) {
  // w->u (1), w->v (2), u->v (3)
  const auto g = chain_graph(3, {{w, u}, {w, v}, {u, v}});
  EXPECT_FALSE(time_ok(g, u, v, w));
}

TEST(TimeOk, RequiresATriad) {
  EXPECT_THROW(time_ok(chain_graph(3, {{u, v}}), u, v, w), std::invalid_argument);
}

TEST(TimeOk, AgreesWithSeqComparison) {
  Rng rng(3);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 3 + uniform_index(rng, 25);
    const auto g = random_graph(rng, n, 40 + uniform_index(rng, 200));
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = 0; b < n; ++b) {
        for (NodeId c = 0; c < n; ++c) {
          if (!structure(g, a, b, c)) continue;
          const Seq cb = *g.edge_seq(c, b);
          EXPECT_EQ(time_ok(g, a, b, c), cb > *g.edge_seq(c, a) && cb > *g.edge_seq(a, b));
        }
      }
    }
  }
}

TEST(Nonrec, NoReverseEdges) {
  const auto g = copy_triangle();
  for (const auto variant : {NonrecVariant::original_link, NonrecVariant::copied_link, NonrecVariant::both}) {
    EXPECT_TRUE(nonrec(g, u, v, w, variant));
  }
}

TEST(Nonrec, ReverseOfOriginalLink) {
  const auto g = chain_graph(3, {{u, v}, {w, u}, {w, v}, {v, u}});
  EXPECT_FALSE(nonrec(g, u, v, w, NonrecVariant::original_link));
  EXPECT_TRUE(nonrec(g, u, v, w, NonrecVariant::copied_link));
  EXPECT_FALSE(nonrec(g, u, v, w, NonrecVariant::both));
}

TEST(Nonrec, ReverseOfCopiedLink) {
  const auto g = chain_graph(3, {{u, v}, {w, u}, {w, v}, {v, w}});
  EXPECT_TRUE(nonrec(g, u, v, w, NonrecVariant::original_link));
  EXPECT_FALSE(nonrec(g, u, v, w, NonrecVariant::copied_link));
  EXPECT_FALSE(nonrec(g, u, v, w, NonrecVariant::both));
}

TEST(Sim, IdenticalFriendSets) {
  // a=0, b=1 both follow x=2, y=3
  const auto g = chain_graph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  EXPECT_EQ(sim(g, 0, 1), 1.0);
}

TEST(Sim, OneSharedOfThree) {
  // a -> {x, y}, b -> {y, z}
  const auto g = chain_graph(5, {{0, 2}, {0, 3}, {1, 3}, {1, 4}});
  EXPECT_DOUBLE_EQ(sim(g, 0, 1), 1.0 / 3.0);
}

TEST(Sim, EmptyFriendSets) {
  const auto g = chain_graph(3, {{0, 2}});
  EXPECT_EQ(sim(g, 0, 1), 0.0);
  EXPECT_EQ(sim(g, 1, 1), 0.0);
}

TEST(CopyProb, SingleCandidate) {
  const auto c = copy_prob(copy_triangle(), w, v, FactorSet{true, true, false});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (Candidate{u, 1.0}));
}

TEST(CopyProb, TwoSymmetricCandidates) {
  // u1=0, u2=3 both follow v=1 and are followed by w=2
  const auto g = chain_graph(4, {{0, 1}, {3, 1}, {2, 0}, {2, 3}, {2, 1}});
  const auto c = copy_prob(g, 2, 1, kNone);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (Candidate{0, 0.5}));
  EXPECT_EQ(c[1], (Candidate{3, 0.5}));
}

TEST(CopyProb, SimilarityWeights) {
  // w=0, v=1, candidates u1=2 and u2=3. Similarity products: u1 gets 1/4 * 1/6, u2 gets 1/2 * 1/4,
  // a 1:3 split like weights 0.2 and 0.6.
  const auto g = chain_graph(8, {{0, 1}, {0, 2}, {0, 3}, {1, 7}, {2, 1}, {2, 4}, {2, 6}, {2, 7}, {3, 1}, {3, 7}, {5, 2}});
  EXPECT_DOUBLE_EQ(sim(g, 2, 1) * sim(g, 0, 2), 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(sim(g, 3, 1) * sim(g, 0, 3), 1.0 / 8.0);
  const auto c = copy_prob(g, 0, 1, FactorSet{false, false, true});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0].probability, 0.25, 1e-15);
  EXPECT_NEAR(c[1].probability, 0.75, 1e-15);
}

TEST(CopyProb, NotAnEdge) {
  EXPECT_THROW(copy_prob(copy_triangle(), v, w, kNone), std::invalid_argument);
}

TEST(CopyProb, AllWeightsZeroGivesEmptyList) {
  // the only candidate fails the time factor
  const auto g = chain_graph(3, {{w, u}, {w, v}, {u, v}});
  EXPECT_TRUE(copy_prob(g, w, v, FactorSet{true, false, false}).empty());
}

TEST(CfAll, CopyTriangle) {
  const auto t = cf_all(copy_triangle(), kNone);
  EXPECT_EQ(t.cf, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(t.contributing_edges, 1u);
}

TEST(CfAll, EmptyGraph) {
  const auto t = cf_all(FollowGraph::from_edges(4, {}), kNone);
  EXPECT_EQ(t.cf, std::vector<double>(4, 0.0));
}

TEST(CfAll, DisjointTriangles) {
  const auto g = chain_graph(6, {{0, 1}, {2, 0}, {2, 1}, {3, 4}, {5, 3}, {5, 4}});
  const auto cf = cf_all(g, kNone).cf;
  EXPECT_EQ(cf[0], 1.0);
  EXPECT_EQ(cf[3], 1.0);
  EXPECT_EQ(std::accumulate(cf.begin(), cf.end(), 0.0), 2.0);
}

TEST(CfLocal, CopyTriangle) {
  EXPECT_EQ(cf_local(copy_triangle(), u, kNone), 1.0);
  EXPECT_EQ(cf_local(copy_triangle(), w, kNone), 0.0);
}

TEST(CfLocal, ThreeRivals) {
  // rivals 0, 1, 2 follow v=3 and are followed by w=4, who then follows v
  const auto g = chain_graph(5, {{0, 3}, {1, 3}, {2, 3}, {4, 0}, {4, 1}, {4, 2}, {4, 3}});
  const auto cf = cf_all(g, kNone).cf;
  for (NodeId r = 0; r < 3; ++r) {
    EXPECT_DOUBLE_EQ(cf_local(g, r, kNone), 1.0 / 3.0);
    EXPECT_EQ(cf_local(g, r, kNone), cf[r]);
  }
}

TEST(CfAllProperties, MatchesOracleAndLocal) {
  Rng rng(17);
  const auto sets = all_factor_sets();
  for (int round = 0; round < 12; ++round) {
    const std::size_t n = 3 + uniform_index(rng, 40);
    const auto g = random_graph(rng, n, uniform_index(rng, 400));
    const CopyOracle oracle(g);
    for (const auto& f : sets) {
      const auto table = cf_all(g, f);
      EXPECT_EQ(table.cf, oracle.cf(f));
      double total = 0.0;
      for (NodeId x = 0; x < n; ++x) {
        EXPECT_EQ(cf_local(g, x, f), table.cf[x]);
        EXPECT_GE(table.cf[x], 0.0);
        total += table.cf[x];
      }
      EXPECT_NEAR(total, static_cast<double>(table.contributing_edges), 1e-9);
    }
  }
}

TEST(CfAllProperties, WorkerCountDoesNotChangeResult) {
  Rng rng(5);
  const auto g = random_graph(rng, 400, 12000, 0.2, 0.3);
  for (const auto& f : all_factor_sets()) {
    const auto one = cf_all(g, f, 1).cf;
    for (const unsigned k : {2u, 3u, 8u}) EXPECT_EQ(cf_all(g, f, k).cf, one);
  }
}

TEST(CopyProbProperties, NormalizedAndFilteringOnlyShrinks) {
  Rng rng(23);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 3 + uniform_index(rng, 30);
    const auto g = random_graph(rng, n, uniform_index(rng, 300));
    for (const auto& e : g.edges()) {
      const auto base = copy_prob(g, e.follower, e.followee, kNone);
      auto ids = [](const std::vector<Candidate>& c) {
        std::vector<NodeId> out;
        for (const auto& x : c) out.push_back(x.account);
        return out;
      };
      const auto base_ids = ids(base);
      for (const auto& f : all_factor_sets()) {
        const auto c = copy_prob(g, e.follower, e.followee, f);
        double total = 0.0;
        for (const auto& x : c) {
          EXPECT_GE(x.probability, 0.0);
          total += x.probability;
        }
        if (!c.empty()) {
          EXPECT_NEAR(total, 1.0, 1e-12);
        }
        for (const NodeId x : ids(c)) EXPECT_TRUE(std::binary_search(base_ids.begin(), base_ids.end(), x));
      }
    }
  }
}

TEST(CfAll, ObserverSeesEdgesInSeqOrder) {
  Rng rng(9);
  const auto g = random_graph(rng, 60, 1500);
  Seq last = 0;
  std::size_t seen = 0;
  cf_all(g, kNone, 4, [&](const FollowEdge& e, std::span<const Candidate> c) {
    EXPECT_GT(e.seq, last);
    EXPECT_FALSE(c.empty());
    last = e.seq;
    ++seen;
  });
  EXPECT_EQ(seen, cf_all(g, kNone).contributing_edges);
}
