#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace ecodec;
using namespace testing_support;

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

Gene deployable(Ecosystem& e, std::uint64_t at, std::vector<AttributeId> provides = {0}) {
  Gene g = make_gene(e.next_gene_id++, std::move(provides), 1.0, at);
  return g;
}

}  // namespace

TEST(Hebbian, ReinforceExamples) {
  EXPECT_EQ(hebbian_reinforce({HabitatId(1), 1.0}).probability, 1.0);
  EXPECT_DOUBLE_EQ(hebbian_reinforce({HabitatId(1), 0.5}).probability, 0.55);
}

TEST(Hebbian, DecayExamples) {
  const auto zero = hebbian_decay({HabitatId(1), 0.0});
  EXPECT_TRUE(zero.prune);
  const auto half = hebbian_decay({HabitatId(1), 0.5});
  EXPECT_DOUBLE_EQ(half.connection.probability, 0.475);
  EXPECT_FALSE(half.prune);
}

TEST(Hebbian, ReinforcementClosedForm) {
  for (double p0 : {0.0, 0.1, 0.37, 0.9}) {
    Connection c{HabitatId(1), p0};
    for (int n = 1; n <= 200; ++n) {
      c = hebbian_reinforce(c);
      ASSERT_NEAR(c.probability, 1.0 - (1.0 - p0) * std::pow(0.9, n), 1e-12);
      ASSERT_LE(c.probability, 1.0);
    }
  }
}

TEST(Hebbian, SeventySevenDecaysFromHalfToPrune) {
  const int expected = static_cast<int>(std::ceil(std::log(0.01 / 0.5) / std::log(0.95)));
  ASSERT_EQ(expected, 77);
  Connection c{HabitatId(1), 0.5};
  int n = 0;
  bool pruned = false;
  while (!pruned) {
    const auto d = hebbian_decay(c);
    c = d.connection;
    pruned = d.prune;
    ++n;
  }
  EXPECT_EQ(n, expected);
}

TEST(Hebbian, ReinforceThenDecayIsNotIdentity) {
  Gen gen(3);
  for (int i = 0; i < 1000; ++i) {
    const double p = gen.uniform(0.01, 0.99);
    const double back = hebbian_decay(hebbian_reinforce({HabitatId(1), p})).connection.probability;
    ASSERT_NE(back, p);
  }
}

TEST(EscapeRange, Examples) {
  EXPECT_EQ(escape_range(1), 2u);
  EXPECT_EQ(escape_range(3), 2u);
  EXPECT_EQ(escape_range(7), 3u);
  EXPECT_EQ(escape_range(8), 4u);
  EXPECT_THROW(escape_range(0), ArgumentError);
}

TEST(EscapeRange, MonotoneAndMatchesLogFormula) {
  std::uint32_t last = 0;
  for (std::size_t n = 1; n <= 10000; ++n) {
    const auto v = escape_range(n);
    ASSERT_GE(v, last);
    last = v;
    // integer ceil(log2(n+1)): smallest k with 2^k >= n+1
    std::uint32_t k = 0;
    while ((std::size_t{1} << k) < n + 1) ++k;
    ASSERT_EQ(v, std::max<std::uint32_t>(2, k)) << n;
  }
}

TEST(DeployGene, IsolatedHabitatKeepsGeneLocally) {
  auto e = bare_world(3);
  const Gene g = deployable(e, 0);
  const auto attempts = deploy(e, g);
  EXPECT_TRUE(attempts.empty());
  EXPECT_TRUE(e.habitat(HabitatId(0)).has_gene(g.id));
  EXPECT_FALSE(e.habitat(HabitatId(1)).has_gene(g.id));
  EXPECT_TRUE(e.registry.contains(g.id));
}

TEST(DeployGene, CertainLinkAlwaysCopies) {
  auto e = bare_world(3);
  link(e, 0, 1, 1.0);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  EXPECT_TRUE(e.habitat(HabitatId(0)).has_gene(g.id));
  EXPECT_TRUE(e.habitat(HabitatId(1)).has_gene(g.id));
  EXPECT_EQ(e.habitat(HabitatId(1)).pool.at(g.id).arrived_from, HabitatId(0));
}

TEST(DeployGene, HalfProbabilityLinkCopiesHalfTheTime) {
  auto e = bare_world(2);
  e.record_events = false;
  link(e, 0, 1, 0.5);
  const int trials = 10000;
  int received = 0;
  for (int i = 0; i < trials; ++i) {
    const Gene g = deployable(e, 0);
    deploy(e, g);
    received += e.habitat(HabitatId(1)).has_gene(g.id);
    e.habitat(HabitatId(1)).pool.clear();
    e.habitat(HabitatId(0)).pool.clear();
  }
  EXPECT_NEAR(static_cast<double>(received) / trials, 0.5, 0.02);
}

TEST(DeployGene, DuplicateIsLoggedNoOp) {
  auto e = bare_world(2);
  link(e, 0, 1, 1.0);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  const auto pools = e.habitats;
  const auto attempts = deploy(e, g);
  EXPECT_TRUE(attempts.empty());
  EXPECT_EQ(e.habitats, pools);
  EXPECT_EQ(e.event_log.back().kind, EventKind::deploy_duplicate);
}

TEST(DeployGene, ForeignOriginRejected) {
  auto e = bare_world(2);
  const Gene g = deployable(e, 1);
  EXPECT_THROW(deploy_gene(e, HabitatId(0), g), ArgumentError);
}

TEST(MigrateCopy, NoConnectionsNoAttempts) {
  auto e = bare_world(2);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  EXPECT_TRUE(migrate_copy(e, HabitatId(0), g.id).attempts.empty());
}

TEST(MigrateCopy, CertainLinksDeliverEverywhereAndKeepSource) {
  auto e = bare_world(4);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  for (int t = 1; t < 4; ++t) link(e, 0, t, 1.0);
  const auto m = migrate_copy(e, HabitatId(0), g.id);
  ASSERT_EQ(m.attempts.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(m.attempts[i].delivered);
    EXPECT_EQ(m.attempts[i].target, HabitatId(i + 1));  // ascending target order
  }
  apply_effects(e, m.effects);
  for (int h = 0; h < 4; ++h) EXPECT_TRUE(e.habitat(HabitatId(h)).has_gene(g.id));
}

TEST(MigrateCopy, DeliveredSetBringsItsMembers) {
  Gen gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto e = bare_world(5, 8, trial + 1);
    std::vector<GeneId> ids;
    for (int k = 0; k < 6; ++k) {
      const Gene g = deployable(e, 0, {static_cast<AttributeId>(k)});
      deploy(e, g);
      ids.push_back(g.id);
    }
    for (int t = 1; t < 5; ++t) link(e, 0, t, gen.uniform());
    GeneSet gs = make_gene_set(gen.subset(ids).members, {HabitatId(0)});
    if (gs.empty()) gs = make_gene_set({ids[0]}, {HabitatId(0)});
    const auto source_before = e.habitat(HabitatId(0)).pool;
    const auto m = migrate_copy(e, HabitatId(0), gs, make_request({{0, 1.0}}));
    apply_effects(e, m.effects);
    ASSERT_EQ(e.habitat(HabitatId(0)).pool, source_before);
    for (const auto& a : m.attempts) {
      const Habitat& t = e.habitat(a.target);
      const bool archived = std::any_of(t.archive.begin(), t.archive.end(),
                                        [&](const ArchiveEntry& x) { return x.set.members == gs.members; });
      ASSERT_EQ(archived, a.delivered);
      if (a.delivered) {
        for (GeneId g : gs.members) ASSERT_TRUE(t.has_gene(g));
      }
    }
  }
}

TEST(RegisterGeneset, StoredAndCountersZeroed) {
  auto e = bare_world(1);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  Habitat& h = e.habitat(HabitatId(0));
  h.pool.at(g.id).unused_request_count = 4;
  const GeneSet gs = make_gene_set({g.id}, {HabitatId(0)});
  register_geneset(h, gs, make_request({{0, 1.0}}), 3, 256);
  ASSERT_EQ(h.archive.size(), 1u);
  EXPECT_EQ(h.archive[0].set, gs);
  EXPECT_EQ(h.pool.at(g.id).unused_request_count, 0u);
  EXPECT_THROW(register_geneset(h, make_gene_set({g.id}, {}), make_request({{0, 1.0}}), 3, 256), ArgumentError);
}

TEST(RegisterGeneset, EvictsLeastRelevantThenOldest) {
  Gen gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    Habitat h;
    h.id = HabitatId(0);
    const std::size_t cap = gen.between(1, 6);
    for (int k = 0; k < 3; ++k) note_request(h, gen.request(6, 1, 3), 8);
    std::vector<ArchiveEntry> expected;
    for (std::size_t k = 0; k < cap + 4; ++k) {
      const GeneSet gs = make_gene_set({GeneId(k + 1)}, {HabitatId(0)});
      const Request r = gen.request(6, 1, 3);
      register_geneset(h, gs, r, k, cap);
      // oracle: append, then drop the entry ranked lowest by (relevance, registration time)
      expected.push_back({gs, r, k});
      if (expected.size() > cap) {
        auto relevance = [&](const ArchiveEntry& a) {
          double best = 0.0;
          for (const auto& q : h.recent_requests) best = std::max(best, request_similarity(a.request, q));
          return best;
        };
        auto victim = std::min_element(expected.begin(), expected.end(), [&](const auto& a, const auto& b) {
          const double ra = relevance(a), rb = relevance(b);
          return ra != rb ? ra < rb : a.registered_at < b.registered_at;
        });
        expected.erase(victim);
      }
      ASSERT_EQ(h.archive, expected) << "trial " << trial << " step " << k;
    }
  }
}

TEST(RegisterGeneset, IdenticalMembersMergeInPlace) {
  Habitat h;
  register_geneset(h, make_gene_set({GeneId(1)}, {HabitatId(2)}), make_request({{0, 1.0}}), 0, 4);
  register_geneset(h, make_gene_set({GeneId(1)}, {HabitatId(3)}), make_request({{1, 1.0}}), 5, 4);
  ASSERT_EQ(h.archive.size(), 1u);
  EXPECT_EQ(h.archive[0].set.provenance, (std::vector<HabitatId>{HabitatId(2), HabitatId(3)}));
  EXPECT_EQ(h.archive[0].registered_at, 5u);
}

TEST(ExecutionFeedback, LocalProvenanceOnlyMigrates) {
  auto e = bare_world(3);
  link(e, 0, 1, 0.4);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  const auto before = e.habitat(HabitatId(0)).connections;
  apply_effects(e, execution_feedback(e, HabitatId(0), make_gene_set({g.id}, {HabitatId(0)}), make_request({{0, 1.0}})));
  EXPECT_EQ(e.habitat(HabitatId(0)).connections, before);
}

TEST(ExecutionFeedback, UnconnectedProvenanceOpensLinkAtInitialProbability) {
  auto e = bare_world(10);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  apply_effects(e, execution_feedback(e, HabitatId(0), make_gene_set({g.id}, {HabitatId(0), HabitatId(9)}),
                                      make_request({{0, 1.0}})));
  ASSERT_TRUE(e.habitat(HabitatId(0)).probability_to(HabitatId(9)).has_value());
  EXPECT_EQ(*e.habitat(HabitatId(0)).probability_to(HabitatId(9)), 0.1);
}

TEST(ExecutionFeedback, RepeatedSuccessApproachesOneByClosedForm) {
  auto e = bare_world(2);
  link(e, 0, 1, 0.3);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  const GeneSet gs = make_gene_set({g.id}, {HabitatId(1)});
  for (int n = 1; n <= 100; ++n) {
    apply_effects(e, execution_feedback(e, HabitatId(0), gs, make_request({{0, 1.0}})));
    const double p = *e.habitat(HabitatId(0)).probability_to(HabitatId(1));
    ASSERT_NEAR(p, 1.0 - 0.7 * std::pow(0.9, n), 1e-12);
    ASSERT_LE(p, 1.0);
  }
}

TEST(ExecutionFeedback, ReverseLinkReinforcedOnlyIfPresent) {
  auto e = bare_world(3);
  link(e, 1, 0, 0.5);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  const GeneSet gs = make_gene_set({g.id}, {HabitatId(1), HabitatId(2)});
  apply_effects(e, execution_feedback(e, HabitatId(0), gs, make_request({{0, 1.0}})));
  EXPECT_DOUBLE_EQ(*e.habitat(HabitatId(1)).probability_to(HabitatId(0)), 0.55);
  EXPECT_FALSE(e.habitat(HabitatId(2)).probability_to(HabitatId(0)).has_value());
}

TEST(ExecutionFeedback, EveryProvenanceHabitatEndsAtLeastInitial) {
  Gen gen(23);
  for (int trial = 0; trial < 300; ++trial) {
    auto e = bare_world(6);
    for (int t = 1; t < 6; ++t)
      if (gen.coin()) link(e, 0, t, gen.uniform(0.0, 0.2));
    const Gene g = deployable(e, 0);
    deploy(e, g);
    GeneSet gs;
    gs.members = {g.id};
    for (int t = 0; t < 6; ++t)
      if (gen.coin()) gs.provenance.push_back(HabitatId(t));
    if (gs.provenance.empty()) gs.provenance = {HabitatId(0)};
    apply_effects(e, execution_feedback(e, HabitatId(0), gs, make_request({{0, 1.0}})));
    for (HabitatId p : gs.provenance) {
      if (p == HabitatId(0)) continue;
      ASSERT_GE(*e.habitat(HabitatId(0)).probability_to(p), 0.1);
    }
  }
}

TEST(UsageTick, UsedGeneNeverLeaves) {
  auto e = bare_world(2);
  link(e, 0, 1, 0.5);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  const GeneSet sol = make_gene_set({g.id}, {HabitatId(0)});
  for (int i = 0; i < 100; ++i) {
    apply_effects(e, usage_tick(e, HabitatId(0), sol));
    ASSERT_TRUE(e.habitat(HabitatId(0)).has_gene(g.id));
    ASSERT_EQ(e.habitat(HabitatId(0)).pool.at(g.id).unused_request_count, 0u);
  }
}

TEST(UsageTick, IsolatedUnusedGeneDeletedAtThreshold) {
  auto e = bare_world(1);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  for (std::uint32_t i = 1; i < e.scenario.habitat.unused_threshold; ++i) {
    apply_effects(e, usage_tick(e, HabitatId(0), GeneSet{}));
    ASSERT_TRUE(e.habitat(HabitatId(0)).has_gene(g.id));
  }
  apply_effects(e, usage_tick(e, HabitatId(0), GeneSet{}));
  EXPECT_FALSE(e.habitat(HabitatId(0)).has_gene(g.id));
  EXPECT_EQ(e.event_log.back().note, "deletion");
  EXPECT_TRUE(e.registry.contains(g.id));
}

TEST(UsageTick, EscapeMovesWithDecrementedBudget) {
  auto e = bare_world(2);
  const Gene g = deployable(e, 0);
  deploy(e, g);
  link(e, 0, 1, 0.05);
  const auto budget = e.habitat(HabitatId(0)).pool.at(g.id).escapes_remaining;
  ASSERT_EQ(budget, escape_range(1));
  for (std::uint32_t i = 0; i < e.scenario.habitat.unused_threshold; ++i)
    apply_effects(e, usage_tick(e, HabitatId(0), GeneSet{}));
  EXPECT_FALSE(e.habitat(HabitatId(0)).has_gene(g.id));
  ASSERT_TRUE(e.habitat(HabitatId(1)).has_gene(g.id));
  const auto& s = e.habitat(HabitatId(1)).pool.at(g.id);
  EXPECT_EQ(s.escapes_remaining, budget - 1);
  EXPECT_EQ(s.unused_request_count, 0u);
  EXPECT_EQ(s.arrived_from, HabitatId(0));
}

TEST(UsageTick, EscapeTargetIsUniform) {
  std::vector<int> hits(4, 0);
  for (int trial = 0; trial < 3000; ++trial) {
    auto e = bare_world(4, 8, trial + 1);
    e.record_events = false;
    link(e, 0, 1, 0.9);
    link(e, 0, 2, 0.02);
    link(e, 0, 3, 0.5);
    const Gene g = deployable(e, 0);
    e.registry.add(g);
    e.habitat(HabitatId(0)).pool.emplace(g.id, GeneUsageState{g.id, 4, 2, 0, HabitatId(0)});
    apply_effects(e, usage_tick(e, HabitatId(0), GeneSet{}));
    for (int t = 1; t < 4; ++t) hits[t] += e.habitat(HabitatId(t)).has_gene(g.id);
  }
  double chi2 = 0.0;
  for (int t = 1; t < 4; ++t) chi2 += (hits[t] - 1000.0) * (hits[t] - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 13.82);  // 2 dof, p = 0.001
}

TEST(ClusterOf, IsolatedAndComplete) {
  auto e = bare_world(5);
  EXPECT_EQ(cluster_of(e, HabitatId(2)), (std::set<HabitatId>{HabitatId(2)}));
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      if (a != b) link(e, a, b, 1.0);
  EXPECT_EQ(cluster_of(e, HabitatId(2)).size(), 5u);
}

TEST(ClusterOf, MatchesUnionFind) {
  Gen gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen.between(1, 15);
    auto e = bare_world(n);
    UnionFind uf(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b || gen.uniform() > 0.15) continue;
        const double p = gen.uniform(0.0, 0.4);
        link(e, a, b, p);
        if (p >= e.scenario.habitat.cluster_edge_threshold) uf.unite(a, b);
      }
    for (std::size_t h = 0; h < n; ++h) {
      std::set<HabitatId> expected;
      for (std::size_t k = 0; k < n; ++k)
        if (uf.find(k) == uf.find(h)) expected.insert(HabitatId(k));
      ASSERT_EQ(cluster_of(e, HabitatId(h)), expected);
    }
  }
}
