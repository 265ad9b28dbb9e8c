#include <gtest/gtest.h>

#include <random>

#include "hamlab/blowup.hpp"
#include "hamlab/regular_pairs.hpp"
#include "test_util.hpp"

using namespace hamlab;

namespace {

Digraph bipartite_host(const BipartiteGraph& b) {
  std::vector<Edge> e;
  for (const auto& [x, y] : b.edges()) e.emplace_back(x, b.a_size() + y);
  return Digraph(b.a_size() + b.b_size(), e);
}

Pair host_pair(const Digraph& g, int na, int nb) {
  std::vector<int> a(na), b(nb);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), na);
  return Pair(g, a, b);
}

BipartiteGraph half_graph(int m) {
  std::vector<Edge> e;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) e.emplace_back(i, j);
  return BipartiteGraph(m, m, e);
}

/// Independent oracle: worst deviation over all qualifying (X, Y) by double enumeration.
Rational brute_worst(const BipartiteGraph& g, const Rational& eps) {
  const int na = g.a_size(), nb = g.b_size();
  const Rational d(static_cast<std::int64_t>(g.size()), static_cast<std::int64_t>(na) * nb);
  Rational worst(0);
  for (int x = 1; x < (1 << na); ++x) {
    const int sx = __builtin_popcount(x);
    if (Rational(sx) < eps * Rational(na)) continue;
    for (int y = 1; y < (1 << nb); ++y) {
      const int sy = __builtin_popcount(y);
      if (Rational(sy) < eps * Rational(nb)) continue;
      int e = 0;
      for (int a = 0; a < na; ++a)
        if (x >> a & 1)
          for (int b : g.adj(a)) e += y >> b & 1;
      Rational dev = Rational(e, sx * sy) - d;
      if (dev < 0) dev = -dev;
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

Rational witness_deviation(const BipartiteGraph& g, const VertexSet& x, const VertexSet& y) {
  int e = 0;
  for (int a : x)
    for (int b : y) e += g.has_edge(a, b);
  Rational dev = Rational(e, static_cast<std::int64_t>(x.size() * y.size())) - density(g);
  return dev < 0 ? -dev : dev;
}

Blowup cycle_blowup(int k, int m, Rational p, int v0, std::uint64_t seed) {
  auto r0 = Digraph::cycle(k);
  std::vector<int> succ(k);
  for (int i = 0; i < k; ++i) succ[i] = (i + 1) % k;
  return gen_blowup(r0, OneFactor(succ), m, p, v0, seed);
}

}  // namespace

TEST(Density, Examples) {
  std::vector<Edge> all;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) all.emplace_back(i, j);
  EXPECT_EQ(density(BipartiteGraph(5, 5, all)), Rational(1));
  EXPECT_EQ(density(BipartiteGraph(5, 5, {})), Rational(0));
  EXPECT_EQ(density(half_graph(4)), rat(10, 16));
  EXPECT_THROW(density(BipartiteGraph(0, 3, {})), Error);
}

TEST(CertifyRegular, Examples) {
  std::vector<Edge> all;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) all.emplace_back(i, j);
  auto full = certify_regular(BipartiteGraph(6, 6, all), rat(1, 10), CertifyMode::exhaustive);
  EXPECT_TRUE(full.regular);
  EXPECT_EQ(full.worst_deviation, Rational(0));

  auto half = half_graph(8);
  auto v = certify_regular(half, rat(1, 4), CertifyMode::exhaustive);
  ASSERT_FALSE(v.regular);
  ASSERT_TRUE(v.witness);
  EXPECT_GE(witness_deviation(half, v.witness->first, v.witness->second), rat(1, 4));

  std::mt19937_64 rng(11);
  auto rnd = testutil::random_bipartite(10, 10, 0.5, rng);
  EXPECT_TRUE(certify_regular(rnd, rat(45, 100), CertifyMode::exhaustive).regular);
  EXPECT_THROW(certify_regular(testutil::random_bipartite(13, 5, 0.5, rng), rat(1, 4), CertifyMode::exhaustive),
               Error);
}

TEST(CertifyRegular, ExhaustiveMatchesBruteForce) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 60; ++rep) {
    auto g = testutil::random_bipartite(2 + rep % 5, 2 + (rep * 3) % 5, 0.2 + 0.1 * (rep % 6), rng);
    if (g.size() == 0) continue;
    const Rational eps = rat(1 + rep % 4, 5);
    auto v = certify_regular(g, eps, CertifyMode::exhaustive);
    EXPECT_EQ(v.worst_deviation, brute_worst(g, eps));
    if (!v.regular) {
      EXPECT_GE(witness_deviation(g, v.witness->first, v.witness->second), eps);
    }
  }
}

TEST(CertifyRegular, SampledIsOneSided) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = testutil::random_bipartite(10, 10, 0.5, rng);
    const Rational eps = rat(1, 5);
    auto ex = certify_regular(g, eps, CertifyMode::exhaustive);
    auto sm = certify_regular(g, eps, CertifyMode::sampled, rep, 2000);
    EXPECT_LE(sm.worst_deviation, ex.worst_deviation);
    if (!sm.regular) {
      EXPECT_FALSE(ex.regular);
      EXPECT_GE(witness_deviation(g, sm.witness->first, sm.witness->second), eps);
    }
  }
  // a planted dense block is found by sampling on a large pair
  std::vector<Edge> e;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      if ((i < 20) == (j < 20)) e.emplace_back(i, j);
  auto blocks = certify_regular(BipartiteGraph(40, 40, e), rat(1, 4), CertifyMode::sampled, 1, 4000);
  EXPECT_FALSE(blocks.regular);
}

TEST(CertifySuperRegular, Examples) {
  std::vector<Edge> all;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) all.emplace_back(i, j);
  EXPECT_TRUE(certify_super_regular(BipartiteGraph(5, 5, all), rat(1, 10), Rational(1), CertifyMode::exhaustive).regular);
  std::vector<Edge> iso;
  for (const auto& [a, b] : all)
    if (a != 2) iso.emplace_back(a, b);
  BipartiteGraph bg(5, 5, iso);
  auto g = bipartite_host(bg);
  auto v = certify_super_regular(host_pair(g, 5, 5), rat(1, 2), rat(1, 10), CertifyMode::exhaustive);
  EXPECT_FALSE(v.regular);
  EXPECT_EQ(v.degree_witness, 2);
  std::mt19937_64 rng(14);
  int ok = 0;
  for (int rep = 0; rep < 10; ++rep)
    ok += certify_super_regular(testutil::random_bipartite(12, 12, 0.8, rng), rat(2, 5), rat(2, 5),
                                CertifyMode::exhaustive)
              .regular;
  EXPECT_GE(ok, 9);
}

TEST(RegularPairMatching, Examples) {
  std::vector<Edge> all;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) all.emplace_back(i, j);
  auto g = bipartite_host(BipartiteGraph(10, 10, all));
  EXPECT_EQ(regular_pair_matching(host_pair(g, 10, 10), rat(1, 10), true).size(), 10u);

  std::mt19937_64 rng(15);
  auto h = bipartite_host(testutil::random_bipartite(64, 64, 0.5, rng));
  auto m = regular_pair_matching(host_pair(h, 64, 64), rat(1, 4));
  EXPECT_GE(m.size(), 48u);
  for (const auto& [a, b] : m.pairs) EXPECT_TRUE(h.has_edge(a, b));

  // a pair with an isolated A vertex cannot carry the asserted perfect matching
  std::vector<Edge> iso;
  for (const auto& [a, b] : all)
    if (a != 0) iso.emplace_back(a, b);
  auto gi = bipartite_host(BipartiteGraph(10, 10, iso));
  try {
    regular_pair_matching(host_pair(gi, 10, 10), rat(1, 10), true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
    EXPECT_EQ(e.witness(), (std::vector<int>{0}));
  }
}

TEST(Blowup, Generation) {
  auto b = cycle_blowup(4, 12, rat(4, 5), 2, 7);
  EXPECT_EQ(b.g.order(), 50);
  b.partition.validate(50);
  for (int i = 0; i < 4; ++i) {
    Pair p(b.g, b.partition.clusters[i], b.partition.clusters[(i + 1) % 4]);
    EXPECT_TRUE(certify_super_regular(p, rat(3, 4), rat(2, 5), CertifyMode::exhaustive).regular);
  }
  EXPECT_THROW(gen_blowup(Digraph::cycle(3), OneFactor({1, 2, 0}), 10, rat(1), 0, 1), Error);
  EXPECT_THROW(cycle_blowup(4, 11, rat(1), 0, 1), Error);
}

TEST(MakeSuperRegular, Examples) {
  auto full = cycle_blowup(4, 10, Rational(1), 0, 1);
  auto h = Digraph::cycle(4);
  auto res = make_super_regular(full.g, full.partition, h, 2, rat(1, 10), rat(1, 2));
  for (int c = 0; c < 4; ++c) {
    EXPECT_TRUE(res.low_degree[c].empty());
    EXPECT_EQ(res.moved[c].size(), 2u);
  }
  res.partition.validate(full.g.order());
  EXPECT_THROW(make_super_regular(full.g, full.partition, h, 2, rat(3, 10), rat(1, 2)), Error);

  auto b = cycle_blowup(4, 12, rat(4, 5), 0, 3);
  auto r = make_super_regular(b.g, b.partition, h, 2, rat(1, 4), rat(4, 5));
  EXPECT_EQ(r.partition.m(), 6);
  for (int c = 0; c < 4; ++c) {
    Pair p(b.g, r.partition.clusters[c], r.partition.clusters[(c + 1) % 4]);
    EXPECT_TRUE(certify_super_regular(p, rat(1, 2), rat(2, 5), CertifyMode::exhaustive).regular) << c;
  }
}

TEST(Hypergeometric, Examples) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_EQ(sample_hypergeometric(10, 10, 4, s), 4);
    EXPECT_EQ(sample_hypergeometric(10, 0, 4, s), 0);
  }
  std::mt19937_64 rng(3);
  double mean = 0;
  for (int t = 0; t < 20000; ++t) mean += sample_hypergeometric(50, 20, 10, rng);
  EXPECT_NEAR(mean / 20000, 4.0, 0.05);
  auto a = chernoff_audit(1000, 300, 200, rat(1, 2), 20000, 9);
  EXPECT_TRUE(a.pass);
  EXPECT_NEAR(a.bound, 2 * std::exp(-5.0), 1e-12);
  EXPECT_THROW(chernoff_audit(10, 3, 2, rat(3, 2), 10, 0), Error);
  EXPECT_THROW(sample_hypergeometric(10, 11, 2, 0), Error);
}

TEST(ExcisePreserving, Audits) {
  std::mt19937_64 rng(16);
  auto g = bipartite_host(testutil::random_bipartite(60, 60, 0.6, rng));
  auto p = host_pair(g, 60, 60);
  VertexSet x;
  for (int i = 0; i < 15; ++i) x.push_back(i * 4);
  auto y = excise_preserving(p, x, rat(1, 2), 5);
  ASSERT_EQ(y.size(), x.size());
  VertexSet a2, b2;
  for (int v : p.a)
    if (!std::binary_search(x.begin(), x.end(), v)) a2.push_back(v);
  for (int v : p.b)
    if (!std::binary_search(y.begin(), y.end(), v)) b2.push_back(v);
  auto bg = Pair(g, a2, b2).bipartite();
  EXPECT_FALSE(degree_floor_violation(bg, rat(1, 4)).has_value());
  VertexSet too_many;
  for (int i = 0; i < 21; ++i) too_many.push_back(i);
  EXPECT_THROW(excise_preserving(p, too_many, rat(1, 2), 5), Error);
}

TEST(SelectIdeal, Audits) {
  std::mt19937_64 rng(17);
  auto g = bipartite_host(testutil::random_bipartite(100, 100, 0.5, rng));
  auto p = host_pair(g, 100, 100);
  auto ideal = select_ideal(p, rat(1, 5), rat(1, 2), 3);
  ASSERT_EQ(ideal.a_star.size(), 20u);
  for (int a : p.a) {
    int c = 0;
    for (int b : ideal.b_star) c += g.has_edge(a, b);
    EXPECT_GE(c, 3);
  }
  for (int b : p.b) {
    int c = 0;
    for (int a : ideal.a_star) c += g.has_edge(a, b);
    EXPECT_GE(c, 3);
  }
  auto full = cycle_blowup(4, 10, Rational(1), 0, 1);
  Pair fp(full.g, full.partition.clusters[0], full.partition.clusters[1]);
  auto fi = select_ideal(fp, rat(1, 5), Rational(1), 1);
  EXPECT_TRUE(audit_ideal(fp, fi, rat(1, 2), rat(1, 20), 20, 4));
}

TEST(HamiltonSuperRegular, Examples) {
  EXPECT_TRUE(verify_hamilton_cycle(Digraph::complete(10), hamilton_in_super_regular(Digraph::complete(10),
                                                                                      std::chrono::seconds(1), 1)));
  EXPECT_TRUE(verify_hamilton_cycle(Digraph::cycle(12), hamilton_in_super_regular(Digraph::cycle(12),
                                                                                   std::chrono::seconds(1), 1)));
  std::mt19937_64 rng(18);
  int found = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto g = testutil::random_digraph(40, 0.8, rng);
    try {
      auto c = hamilton_in_super_regular(g, std::chrono::milliseconds(500), rep);
      found += verify_hamilton_cycle(g, c);
    } catch (const Error&) {
    }
  }
  EXPECT_GE(found, 95);
}

TEST(BuildReduced, Examples) {
  Digraph r0(4, std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  auto b = gen_blowup(r0, OneFactor({1, 2, 3, 0}), 6, Rational(1), 0, 2);
  auto r = build_reduced(b.g, b.partition, rat(1, 4), rat(3, 10));
  EXPECT_EQ(r.base, r0);
  EXPECT_EQ(r.densities[0][2], Rational(1));

  // densities {0, 0.7}: plant exact 0.7 pairs (each b hit by 7 of 10 a's, cyclically)
  std::vector<Edge> e;
  auto plant = [&](int i, int j) {
    for (int a = 0; a < 10; ++a)
      for (int s = 0; s < 7; ++s) e.emplace_back(i * 10 + a, j * 10 + (a + s) % 10);
  };
  plant(0, 1);
  plant(1, 2);
  plant(2, 0);
  e.emplace_back(0, 25);  // noise edge below d
  Digraph g(30, e);
  ClusterPartition part;
  for (int i = 0; i < 3; ++i) {
    part.clusters.emplace_back();
    for (int a = 0; a < 10; ++a) part.clusters.back().push_back(i * 10 + a);
  }
  auto rr = build_reduced(g, part, rat(1, 2), rat(3, 10));
  EXPECT_EQ(rr.base, Digraph::cycle(3));
  EXPECT_EQ(rr.densities[0][1], rat(7, 10));
  EXPECT_EQ(rr.densities[0][2], rat(1, 100));
}

TEST(PruneAtypical, Examples) {
  auto full = cycle_blowup(4, 20, Rational(1), 0, 1);
  auto res = prune_atypical(full.g, full.partition, rat(1, 1600), rat(1, 10));
  EXPECT_EQ(res.quota, 8);
  for (const auto& mv : res.moved) EXPECT_EQ(mv.size(), 8u);
  EXPECT_TRUE(res.post_audit_ok);

  // planted: one vertex per cluster loses its out-edges to the next cluster except two
  auto b = cycle_blowup(4, 20, Rational(1), 0, 2);
  auto edges = b.g.edges();
  VertexSet planted;
  for (int c = 0; c < 4; ++c) planted.push_back(c * 20 + 5);
  std::erase_if(edges, [&](const Edge& e) {
    return std::binary_search(planted.begin(), planted.end(), e.first) && e.second % 20 >= 2;
  });
  Digraph g(b.g.order(), edges);
  auto audit = typicality_audit(g, b.partition, rat(1, 1600), rat(1, 10));
  for (int v = 0; v < g.order(); ++v)
    EXPECT_EQ(!audit.typical[v], std::binary_search(planted.begin(), planted.end(), v)) << v;
  auto pr = prune_atypical(g, b.partition, rat(1, 1600), rat(1, 10));
  for (int c = 0; c < 4; ++c) EXPECT_TRUE(std::binary_search(pr.moved[c].begin(), pr.moved[c].end(), c * 20 + 5));
  EXPECT_TRUE(pr.post_audit_ok);
}
