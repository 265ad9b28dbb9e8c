#include <gtest/gtest.h>

#include <random>

#include "hamlab/matching.hpp"
#include "test_util.hpp"

using namespace hamlab;

namespace {

BipartiteGraph complete_bipartite(int a, int b) {
  std::vector<Edge> e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, j);
  return BipartiteGraph(a, b, e);
}

bool covers(const BipartiteGraph& b, const Cover& c) {
  for (const auto& [x, y] : b.edges())
    if (!std::binary_search(c.a_side.begin(), c.a_side.end(), x) &&
        !std::binary_search(c.b_side.begin(), c.b_side.end(), y))
      return false;
  return true;
}

bool valid_matching(const BipartiteGraph& b, const Matching& m) {
  std::set<int> as, bs;
  for (const auto& [x, y] : m.pairs) {
    if (!b.has_edge(x, y) || !as.insert(x).second || !bs.insert(y).second) return false;
  }
  return true;
}

}  // namespace

TEST(MaxMatching, Examples) {
  EXPECT_EQ(max_matching(complete_bipartite(3, 3)).size(), 3u);
  BipartiteGraph path(2, 1, {{0, 0}, {1, 0}});
  EXPECT_EQ(max_matching(path).size(), 1u);
  EXPECT_EQ(max_matching(BipartiteGraph(0, 0, {})).size(), 0u);
}

TEST(MaxMatching, AgreesWithBruteForce) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 300; ++rep) {
    const int a = 1 + rep % 12, b = 1 + (rep * 7) % 10;
    auto g = testutil::random_bipartite(a, b, 0.15 + 0.1 * (rep % 7), rng);
    auto m = max_matching(g);
    ASSERT_TRUE(valid_matching(g, m));
    EXPECT_EQ(static_cast<int>(m.size()), testutil::brute_matching(g));
  }
}

TEST(MinCover, ExamplesAndKonig) {
  EXPECT_EQ(min_cover(complete_bipartite(3, 3)).size(), 3u);
  BipartiteGraph star(1, 5, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto c = min_cover(star);
  EXPECT_EQ(c.a_side, (VertexSet{0}));
  EXPECT_TRUE(c.b_side.empty());
  BipartiteGraph c6(3, 3, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {2, 0}});
  EXPECT_EQ(min_cover(c6).size(), 3u);
  EXPECT_EQ(testutil::brute_cover(c6), 3);
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    auto g = testutil::random_bipartite(1 + rep % 9, 1 + rep % 8, 0.3, rng);
    auto cov = min_cover(g);
    EXPECT_TRUE(covers(g, cov));
    EXPECT_EQ(cov.size(), max_matching(g).size());
    EXPECT_EQ(static_cast<int>(cov.size()), testutil::brute_cover(g));
  }
}

TEST(DefectHall, Examples) {
  EXPECT_EQ(defect_hall_matching(complete_bipartite(4, 4), 0).size(), 4u);
  BipartiteGraph iso(4, 4, {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {2, 2}, {2, 3},
                            {3, 0}, {3, 1}, {3, 2}, {3, 3}});
  EXPECT_GE(defect_hall_matching(iso, 1).size(), 3u);
  try {
    defect_hall_matching(iso, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
    auto s = e.witness();
    EXPECT_LT(bipartite_neighborhood(iso, s).size(), s.size());
  }
}

TEST(DefectHall, MeasuredDefect) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto g = testutil::random_bipartite(1 + rep % 12, 1 + rep % 11, 0.25, rng);
    const int d = exhaustive_deficiency(g);
    EXPECT_GE(static_cast<int>(defect_hall_matching(g, d).size()), g.a_size() - d);
    // the Konig violator attains the maximum deficiency
    auto s = hall_violator(g);
    EXPECT_EQ(static_cast<int>(s.size()) - static_cast<int>(bipartite_neighborhood(g, s).size()), d);
  }
}

TEST(OneFactorSearch, Examples) {
  auto c = find_one_factor(Digraph::cycle(7));
  ASSERT_TRUE(c.has_factor());
  EXPECT_EQ(c.factor().cycles().size(), 1u);
  Digraph sink(3, std::vector<Edge>{{0, 1}, {1, 0}, {2, 0}, {0, 2}, {1, 2}});
  // vertex 2 has out-edge to 0 only; force N^+(v) empty:
  Digraph dead(3, std::vector<Edge>{{0, 1}, {1, 0}, {0, 2}});
  auto v = find_one_factor(dead);
  ASSERT_FALSE(v.has_factor());
  EXPECT_EQ(v.violator(), (VertexSet{2}));
  auto k5 = find_one_factor(Digraph::complete(5));
  ASSERT_TRUE(k5.has_factor());
  EXPECT_TRUE(k5.factor().is_factor_of(Digraph::complete(5)));
  EXPECT_TRUE(find_one_factor(sink).has_factor());
}

TEST(OneFactorSearch, DichotomyAgainstHall) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 300; ++rep) {
    auto g = testutil::random_digraph(2 + rep % 10, 0.12 + 0.05 * (rep % 6), rng);
    auto cert = find_one_factor(g);
    EXPECT_EQ(cert.has_factor(), testutil::hall_holds(g));
    if (cert.has_factor()) {
      EXPECT_TRUE(cert.factor().is_factor_of(g));
    } else {
      const auto& s = cert.violator();
      EXPECT_LT(neighborhood(g, s, Direction::out).size(), s.size());
    }
  }
}

TEST(DisjointPaths, Examples) {
  auto k5 = internally_disjoint_paths(Digraph::complete(5), 0, 1, 4);
  ASSERT_EQ(k5.size(), 4u);
  EXPECT_EQ(k5[0], (std::vector<int>{0, 1}));
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(k5[i].size(), 3u);
  EXPECT_EQ(internally_disjoint_paths(Digraph::path(5), 0, 4, 2).size(), 1u);
  EXPECT_THROW(internally_disjoint_paths(Digraph::path(5), 1, 1, 2), Error);
}

TEST(DisjointPaths, MengerAgainstBruteForce) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 150; ++rep) {
    const int n = 4 + rep % 8;
    auto g = testutil::random_digraph(n, 0.35, rng);
    const int x = rng() % n;
    int y = rng() % n;
    if (x == y) y = (y + 1) % n;
    auto paths = internally_disjoint_paths(g, x, y, n);
    // validate disjointness and edges
    std::set<int> inner;
    for (const auto& p : paths) {
      ASSERT_EQ(p.front(), x);
      ASSERT_EQ(p.back(), y);
      for (std::size_t i = 0; i + 1 < p.size(); ++i) ASSERT_TRUE(g.has_edge(p[i], p[i + 1]));
      for (std::size_t i = 1; i + 1 < p.size(); ++i) ASSERT_TRUE(inner.insert(p[i]).second);
    }
    if (g.has_edge(x, y)) {
      auto without = g.edges();
      without.erase(std::find(without.begin(), without.end(), Edge{x, y}));
      EXPECT_EQ(static_cast<int>(paths.size()),
                1 + testutil::brute_local_separator(Digraph(n, without), x, y));
    } else {
      EXPECT_EQ(static_cast<int>(paths.size()), testutil::brute_local_separator(g, x, y));
    }
  }
}

TEST(Connectivity, Examples) {
  EXPECT_EQ(strong_connectivity(Digraph::cycle(6)), 1);
  EXPECT_EQ(strong_connectivity(Digraph::complete(6)), 5);
  EXPECT_EQ(strong_connectivity(Digraph::path(4)), 0);
  // two complete blobs {0..4} and {6..10} joined through vertex 5
  std::vector<Edge> e;
  auto blob = [&](int lo, int hi) {
    for (int u = lo; u <= hi; ++u)
      for (int v = lo; v <= hi; ++v)
        if (u != v) e.emplace_back(u, v);
  };
  blob(0, 5);
  blob(5, 10);
  Digraph g(11, e);
  auto sep = find_separator(g, 2);
  ASSERT_TRUE(sep.has_value());
  EXPECT_EQ(*sep, (VertexSet{5}));
  EXPECT_FALSE(find_separator(g, 1).has_value());
  EXPECT_EQ(strong_connectivity(g), 1);
  EXPECT_TRUE(is_strongly_k_connected(Digraph::complete(6), 5));
  EXPECT_FALSE(is_strongly_k_connected(Digraph::complete(6), 6));
}

TEST(Connectivity, AgreesWithBruteForce) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 120; ++rep) {
    const int n = 4 + rep % 7;
    auto g = testutil::random_digraph(n, 0.45 + 0.05 * (rep % 8), rng);
    const int expect = is_strongly_connected(g) ? testutil::brute_strong_connectivity(g) : 0;
    const int got = strong_connectivity(g);
    EXPECT_EQ(got, expect);
    auto sep = find_separator(g, got + 1);
    if (!g.is_complete()) {
      ASSERT_TRUE(sep.has_value());
      EXPECT_EQ(static_cast<int>(sep->size()), got);
      EXPECT_FALSE(is_strongly_connected(remove_vertices(g, *sep)));
    }
    EXPECT_FALSE(find_separator(g, got).has_value());
  }
}
