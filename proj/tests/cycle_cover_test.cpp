#include <gtest/gtest.h>

#include <random>

#include "hamlab/blowup.hpp"
#include "hamlab/cycle_cover.hpp"
#include "test_util.hpp"

using namespace hamlab;

namespace {

/// Treats r as its own blow-up with clusters of size 1.
struct Identity {
  ClusterPartition part;
  ReducedDigraph red;
};

Identity identity_of(const Digraph& r) {
  Identity id;
  for (int v = 0; v < r.order(); ++v) id.part.clusters.push_back({v});
  id.red.base = r;
  id.red.densities = cluster_densities(r, id.part);
  return id;
}

bool is_partition(const PathCyclePartition& p, int k) {
  std::vector<int> seen(k, 0);
  for (const auto& c : p.cycles)
    for (int v : c) ++seen[v];
  for (const auto& c : p.paths)
    for (int v : c) ++seen[v];
  for (int v : p.waste) ++seen[v];
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

}  // namespace

TEST(InheritedDegrees, CompleteBlowup) {
  std::vector<int> succ{1, 2, 3, 4, 5, 0};
  auto b = gen_blowup(Digraph::complete(6), OneFactor(succ), 6, Rational(1), 0, 1);
  auto r = build_reduced(b.g, b.partition, rat(1, 2), rat(1, 2));
  EXPECT_EQ(r.base, Digraph::complete(6));
  auto rep = verify_inherited_degrees(b.g, b.partition, r, rat(1, 100), rat(3, 10));
  ASSERT_EQ(rep.clauses.size(), 6u);
  EXPECT_TRUE(rep.holds());
  EXPECT_EQ(rep.clauses[0].margin, rat(12, 100));
  EXPECT_EQ(rep.clauses[2].margin, Rational(5) - rat(9, 10));
}

TEST(InheritedDegrees, SyntheticAndAdversarial) {
  std::mt19937_64 rng(1);
  auto r = testutil::synthetic_reduced(40, 1, 0.5, rng).r;
  auto id = identity_of(r);
  auto rep = verify_inherited_degrees(r, id.part, id.red, rat(1, 40), rat(3, 10));
  EXPECT_TRUE(rep.holds());
  EXPECT_GE(rep.clauses[2].margin, Rational(0));

  // one cluster with out-degree 1
  auto e = Digraph::complete(10).edges();
  std::erase_if(e, [](const Edge& x) { return x.first == 3 && x.second != 4; });
  Digraph low(10, e);
  auto idl = identity_of(low);
  auto bad = verify_inherited_degrees(low, idl.part, idl.red, rat(1, 100), rat(3, 10));
  EXPECT_LT(bad.clauses[2].margin, Rational(0));
  EXPECT_EQ(bad.clauses[2].clause, "iii");
  ClusterPartition wrong;
  wrong.clusters = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
  EXPECT_THROW(verify_inherited_degrees(low, wrong, idl.red, rat(1, 100), rat(3, 10)), Error);
}

TEST(Outexpansion, Examples) {
  EXPECT_FALSE(check_outexpansion(Digraph::complete(8), rat(1, 100)).has_value());
  std::vector<Edge> e{{0, 1}, {1, 0}, {2, 0}};
  for (int u = 3; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      if (u != v) e.emplace_back(u, v);
  auto viol = check_outexpansion(Digraph(8, e), rat(1, 100));
  ASSERT_TRUE(viol.has_value());
  EXPECT_LT(neighborhood(Digraph(8, e), viol->set, viol->dir).size(), viol->set.size());
  EXPECT_THROW(check_outexpansion(Digraph::complete(23), rat(1, 100)), Error);
  EXPECT_FALSE(check_outexpansion(Digraph::complete(30), rat(1, 100), 5).has_value());
}

TEST(Outexpansion, HoldsWhenClausesHold) {
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int rep = 0; rep < 200 && checked < 25; ++rep) {
    const int k = 10 + rep % 9;
    auto r = testutil::random_digraph(k, 0.55 + 0.05 * (rep % 5), rng);
    auto id = identity_of(r);
    if (!verify_inherited_degrees(r, id.part, id.red, rat(1, 50), rat(3, 10)).holds()) continue;
    ++checked;
    EXPECT_FALSE(check_outexpansion(r, rat(1, 50)).has_value());
  }
  for (int rep = 0; rep < 10; ++rep) {
    auto r = testutil::synthetic_reduced(16, 1, 0.6, rng).r;
    auto id = identity_of(r);
    ASSERT_TRUE(verify_inherited_degrees(r, id.part, id.red, rat(1, 16), rat(3, 10)).holds());
    EXPECT_FALSE(check_outexpansion(r, rat(1, 16)).has_value());
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(LargeDegreeCensus, Examples) {
  EXPECT_EQ(large_degree_census(Digraph::complete(10), rat(1, 50)), std::make_pair(10, 10));
  EXPECT_EQ(large_degree_census(Digraph::cycle(10), rat(1, 50)), std::make_pair(0, 0));
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto r = testutil::synthetic_reduced(40, 1, 0.5, rng).r;
    ASSERT_FALSE(find_one_factor(r).has_factor());
    auto [out, in] = large_degree_census(r, rat(1, 40));
    EXPECT_GT(Rational(out), (rat(1, 2) + rat(2, 40)) * Rational(40));
    EXPECT_GT(Rational(in), (rat(1, 2) + rat(2, 40)) * Rational(40));
  }
}

TEST(PartitionCyclesPaths, Examples) {
  auto f = partition_cycles_paths(Digraph::complete(6), rat(1, 100));
  EXPECT_TRUE(f.paths.empty());
  EXPECT_TRUE(is_partition(f, 6));

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 5; ++rep) {
    const int k = 200;
    const Rational d(1, 100);
    auto r = testutil::synthetic_reduced(k, 1 + rep % 2, 0.5, rng).r;
    auto p = partition_cycles_paths(r, d);
    EXPECT_TRUE(is_partition(p, k));
    EXPECT_LE(p.paths.size(), 8u);
    EXPECT_GE(p.paths.size(), 1u);
    const Rational thr = (rat(1, 2) - Rational(2) * d) * Rational(k);
    for (const auto& path : p.paths) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) EXPECT_TRUE(r.has_edge(path[i], path[i + 1]));
      EXPECT_GE(Rational(r.in_degree(path.front())), thr);
      EXPECT_GE(Rational(r.out_degree(path.back())), thr);
    }
  }
  // degree preconditions broken badly: a vertex with no out-edges
  std::vector<Edge> e;
  for (int u = 1; u < 6; ++u)
    for (int v = 0; v < 6; ++v)
      if (u != v) e.emplace_back(u, v);
  EXPECT_THROW(partition_cycles_paths(Digraph(6, e), rat(1, 100)), Error);
}

TEST(CoverByCycles, NoPaths) {
  auto c = cover_by_cycles(Digraph::complete(5), rat(1, 100));
  EXPECT_TRUE(c.waste.empty());
  EXPECT_TRUE(c.trace.empty());
  EXPECT_TRUE(validate_cover(Digraph::complete(5), c));
}

TEST(CoverByCycles, SinglePathHandSimulated) {
  // S = 10 > 5 sqrt(3/100) 10 ~ 8.66; alpha = 3/20, ell = 3/2.
  // Condition (3) on P itself: i = 2 (w_2 = 1 -> u), j = 3 (v -> w_3 = 2).
  PathCyclePartition start;
  start.paths = {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  auto k10 = Digraph::complete(10);
  auto c = cover_by_cycles(k10, rat(3, 100), start);
  ASSERT_EQ(c.trace.size(), 1u);
  EXPECT_EQ(c.trace[0].action, "3ii");
  EXPECT_EQ(c.trace[0].alpha, rat(3, 20));
  EXPECT_TRUE(c.waste.empty());
  ASSERT_EQ(c.cycles.size(), 2u);
  EXPECT_EQ(c.cycles[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(c.cycles[1], (std::vector<int>{9, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_TRUE(validate_cover(k10, c));
  // at d = 1/25 the threshold 5 sqrt(d) k equals S, so everything is dumped
  auto dumped = cover_by_cycles(k10, rat(1, 25), start);
  EXPECT_EQ(dumped.trace.at(0).action, "dump");
  EXPECT_EQ(dumped.waste.size(), 10u);
}

TEST(CoverByCycles, WasteBoundAtScale) {
  std::mt19937_64 rng(5);
  const Rational d(1, 400);
  for (int rep = 0; rep < 4; ++rep) {
    auto s = testutil::synthetic_reduced(400, 1 + rep % 2, 0.5, rng);
    // from the augmented 1-factor (short paths, dumped at once)
    auto c0 = cover_by_cycles(s.r, d);
    EXPECT_TRUE(validate_cover(s.r, c0));
    EXPECT_LE(c0.waste.size(), 140u);
    // from long alternating paths, which exercises conditions (1)-(4)
    PathCyclePartition start;
    start.paths = testutil::alternating_paths(s, rng);
    auto c = cover_by_cycles(s.r, d, start);
    EXPECT_TRUE(validate_cover(s.r, c));
    EXPECT_LE(c.waste.size(), 140u);
    EXPECT_TRUE(charge_audit(c, d));
    EXPECT_GT(c.trace.size(), 1u);
    for (const auto& st : c.trace) EXPECT_TRUE(st.endpoint_invariant);
    auto again = cover_by_cycles(s.r, d, start);
    EXPECT_EQ(again.cycles, c.cycles);
    EXPECT_EQ(again.trace.size(), c.trace.size());
    auto rnd = cover_by_cycles(s.r, d, start, CoverOptions{true, 9});
    EXPECT_TRUE(validate_cover(s.r, rnd));
    EXPECT_LE(rnd.waste.size(), 140u);
  }
}

TEST(CoverByCycles, RandomInstancesStayValid) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 40; ++rep) {
    const int k = 20 + 2 * rep;
    auto s = testutil::synthetic_reduced(k, 1 + rep % 2, 0.4, rng);
    const Rational d(1, k);
    PathCyclePartition start;
    start.paths = testutil::alternating_paths(s, rng);
    auto c = cover_by_cycles(s.r, d, start, CoverOptions{rep % 2 == 1, static_cast<std::uint64_t>(rep)});
    EXPECT_TRUE(validate_cover(s.r, c));
    EXPECT_TRUE(charge_audit(c, d));
    EXPECT_TRUE(le_coef_sqrt(Rational(static_cast<std::int64_t>(c.waste.size())), Rational(7 * k), d));
  }
}

TEST(CoverByCycles, EachConditionByHand) {
  auto k5 = Digraph::complete(5);
  PathCyclePartition w;
  w.paths = {{0, 1, 2}};
  w.waste = {3, 4};
  auto c1 = cover_by_cycles(k5, rat(1, 100), w);
  EXPECT_EQ(c1.trace.at(0).action, "1");
  EXPECT_EQ(c1.cycles.at(0), (std::vector<int>{3, 0, 1, 2}));
  EXPECT_EQ(c1.waste, (VertexSet{4}));

  PathCyclePartition cyc;
  cyc.paths = {{0, 1, 2}};
  cyc.cycles = {{3, 4}};
  auto c2 = cover_by_cycles(k5, rat(1, 100), cyc);
  EXPECT_EQ(c2.trace.at(0).action, "2");
  EXPECT_EQ(c2.cycles.at(0), (std::vector<int>{3, 0, 1, 2, 4}));

  PathCyclePartition tri;
  tri.paths = {{0, 1, 2}};
  auto c4 = cover_by_cycles(Digraph::cycle(3), rat(1, 10000), tri);
  EXPECT_EQ(c4.trace.at(0).action, "4iii");
  EXPECT_EQ(c4.cycles.at(0), (std::vector<int>{0, 1, 2}));

  // two paths; the other path ends in an in-neighbour of u, so 4i merges them
  Digraph g(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  PathCyclePartition two;
  two.paths = {{0, 1}, {2, 3}};
  auto c5 = cover_by_cycles(g, rat(1, 10000), two);
  EXPECT_EQ(c5.trace.at(0).action, "4i");
  EXPECT_EQ(c5.trace.at(1).action, "4iii");
  EXPECT_TRUE(validate_cover(g, c5));
  EXPECT_TRUE(c5.waste.empty());

  PathCyclePartition stuck;
  stuck.paths = {{0, 1, 2}};
  EXPECT_THROW(cover_by_cycles(Digraph::path(3), rat(1, 10000), stuck), Error);
}
