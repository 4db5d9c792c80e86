#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sequencer/error.hpp"
#include "sequencer/graph.hpp"

using namespace sequencer;

TEST_SUITE_BEGIN("graph");

TEST_CASE("spanning tree validation") {
  CHECK_THROWS_AS(SpanningTree(3, {{0, 1, 1.0}}), Error);  // too few edges
  CHECK_THROWS_AS(SpanningTree(3, {{0, 1, 1.0}, {0, 1, 2.0}}), Error);  // cycle
  CHECK_NOTHROW(SpanningTree(3, {{0, 1, 1.0}, {1, 2, 2.0}}));
}

TEST_CASE("minimum spanning tree basics") {
  SUBCASE("unique tree on three nodes") {
    DistanceMatrix d(3);
    d.set(0, 1, 1.0);
    d.set(1, 2, 2.0);
    d.set(0, 2, 3.0);
    const auto tree = minimum_spanning_tree(d);
    REQUIRE(tree.edges().size() == 2);
    CHECK(tree.edges()[0] == WeightedEdge{0, 1, 1.0});
    CHECK(tree.edges()[1] == WeightedEdge{1, 2, 2.0});
  }

  SUBCASE("all-equal distances resolve to the star on node 0") {
    DistanceMatrix d(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) d.set(i, j, 1.0);
    const auto tree = minimum_spanning_tree(d);
    std::multiset<std::pair<int, int>> got;
    for (const auto& e : tree.edges()) got.insert({e.u, e.v});
    CHECK(got == std::multiset<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});
  }

  SUBCASE("disconnected finite-edge graph is rejected") {
    CHECK_THROWS_AS(minimum_spanning_tree(4, {{0, 1, 1.0}, {2, 3, 1.0}}), DegenerateError);

    DistanceMatrix d(4);
    const double inf = std::numeric_limits<double>::infinity();
    d.set(0, 1, 1.0);
    d.set(2, 3, 1.0);
    d.set(0, 2, inf);
    d.set(0, 3, inf);
    d.set(1, 2, inf);
    d.set(1, 3, inf);
    CHECK_THROWS_AS(minimum_spanning_tree(d), DegenerateError);
  }
}

TEST_CASE("mst equals brute-force enumeration over all labeled trees") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 3;
    const auto d = oracles::random_distance_matrix(n, rng);
    const auto tree = minimum_spanning_tree(d);
    const auto brute = oracles::brute_force_mst(d);

    std::vector<std::pair<int, int>> got;
    for (const auto& e : tree.edges()) got.emplace_back(e.u, e.v);
    std::sort(got.begin(), got.end());
    // Distinct random weights make the minimum unique, so the edge sets and
    // canonically-summed totals match exactly.
    CHECK(got == brute.edges);
    CHECK(oracles::canonical_tree_weight(got, d) == brute.weight);
  }
}

TEST_CASE("mst never beats a sampled spanning tree") {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + trial % 5;  // up to 8 nodes
    const auto d = oracles::random_distance_matrix(n, rng);
    const auto tree = minimum_spanning_tree(d);
    std::vector<std::pair<int, int>> mst_edges;
    for (const auto& e : tree.edges()) mst_edges.emplace_back(e.u, e.v);
    const double mst_weight = oracles::canonical_tree_weight(mst_edges, d);

    const auto random_tree = oracles::random_labeled_tree(static_cast<int>(n), rng);
    CHECK(mst_weight <= oracles::canonical_tree_weight(random_tree, d) + 1e-12);
  }
}

TEST_CASE("least connected node") {
  SUBCASE("path endpoints minimize closeness, index breaks the tie") {
    CHECK(least_connected_node(oracles::path_tree(5)) == 0);
  }
  SUBCASE("star leaves beat the center") {
    // Center is node 4 so every leaf has a smaller index than the hub.
    CHECK(least_connected_node(oracles::star_tree(5, 4)) == 0);
  }
  SUBCASE("single edge resolves to node 0") {
    CHECK(least_connected_node(SpanningTree(2, {{0, 1, 1.0}})) == 0);
  }
}

TEST_CASE("closeness routes agree exactly") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = trial < 20 ? 2 + trial * 2 : 250 + trial;
    std::vector<WeightedEdge> edges;
    for (const auto& [u, v] : oracles::random_labeled_tree(n, rng))
      edges.push_back({u, v, 1.0});
    const SpanningTree tree(n, std::move(edges));
    CHECK(total_node_distances_bfs(tree) == total_node_distances_reroot(tree));
  }
}

TEST_CASE("level assignment") {
  SUBCASE("path from an end") {
    const auto la = level_assignment(oracles::path_tree(5), 0);
    CHECK(la.depth == std::vector<int>{0, 1, 2, 3, 4});
    REQUIRE(la.levels.size() == 5);
    for (std::size_t q = 0; q < 5; ++q) CHECK(la.width(q) == 1);
  }

  SUBCASE("star from a leaf") {
    // Center 0, leaves 1..4, start at leaf 1.
    const auto la = level_assignment(oracles::star_tree(5, 0), 1);
    CHECK(la.depth == std::vector<int>{1, 0, 2, 2, 2});
    REQUIRE(la.levels.size() == 3);
    CHECK(la.width(0) == 1);
    CHECK(la.width(1) == 1);
    CHECK(la.width(2) == 3);
  }

  SUBCASE("re-rooting at a neighbor shifts depths by one") {
    std::mt19937_64 rng(104);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<WeightedEdge> edges;
      for (const auto& [u, v] : oracles::random_labeled_tree(9, rng))
        edges.push_back({u, v, 1.0});
      const SpanningTree tree(9, std::move(edges));
      const int start = 0;
      const int neighbor = tree.neighbors(start).front().first;
      const auto a = level_assignment(tree, start);
      const auto b = level_assignment(tree, neighbor);
      for (int v = 0; v < 9; ++v) CHECK(std::abs(a.depth[v] - b.depth[v]) == 1);
      std::size_t total = 0;
      for (std::size_t q = 0; q < a.levels.size(); ++q) total += a.width(q);
      CHECK(total == 9);
    }
  }
}

TEST_CASE("elongation statistics") {
  SUBCASE("path of five") {
    const auto stats = elongation(oracles::path_tree(5));
    CHECK(stats.a == 2.0);
    CHECK(stats.b == 0.5);
    CHECK(stats.eta == 4.0);
  }

  SUBCASE("star of five, start defaulting to a leaf") {
    const auto stats = elongation(oracles::star_tree(5, 0));
    CHECK(stats.a == doctest::Approx(1.4));
    CHECK(stats.b == doctest::Approx(5.0 / 6.0));
    CHECK(stats.eta == doctest::Approx(1.68));
  }

  SUBCASE("paths reach the n-1 ceiling exactly") {
    for (int n : {2, 3, 7, 20, 50}) {
      const auto stats = elongation(oracles::path_tree(n));
      CHECK(stats.eta == static_cast<double>(n - 1));
    }
  }

  SUBCASE("a trend-like path is more elongated than a star") {
    for (int n : {4, 5, 10, 40}) {
      CHECK(elongation(oracles::path_tree(n)).eta > elongation(oracles::star_tree(n, 0)).eta);
    }
  }

  SUBCASE("eta never exceeds n-1 on random trees") {
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 3 + trial;
      std::vector<WeightedEdge> edges;
      for (const auto& [u, v] : oracles::random_labeled_tree(n, rng))
        edges.push_back({u, v, 1.0});
      const auto stats = elongation(SpanningTree(n, std::move(edges)));
      CHECK(stats.eta <= n - 1 + 1e-9);
      CHECK(stats.b >= 0.5);
      CHECK(stats.a >= 0.0);
    }
  }
}

TEST_CASE("breadth-first walk") {
  SUBCASE("path") {
    CHECK(bfs_walk(oracles::path_tree(5), 0) == std::vector<int>{0, 1, 2, 3, 4});
  }

  SUBCASE("star from a leaf, ties by node index") {
    CHECK(bfs_walk(oracles::star_tree(5, 0), 1) == std::vector<int>{1, 0, 2, 3, 4});
  }

  SUBCASE("children expand in ascending edge weight") {
    const SpanningTree tree(4, {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 2.0}});
    CHECK(bfs_walk(tree, 0) == std::vector<int>{0, 1, 2, 3});
    const SpanningTree flipped(4, {{0, 1, 1.0}, {1, 2, 2.0}, {1, 3, 1.0}});
    CHECK(bfs_walk(flipped, 0) == std::vector<int>{0, 1, 3, 2});
  }

  SUBCASE("output is a bijection starting at start") {
    std::mt19937_64 rng(106);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3 + trial;
      std::vector<WeightedEdge> edges;
      for (const auto& [u, v] : oracles::random_labeled_tree(n, rng))
        edges.push_back({u, v, 1.0});
      const SpanningTree tree(n, std::move(edges));
      const int start = trial % n;
      const auto walk = bfs_walk(tree, start);
      CHECK(walk.front() == start);
      std::set<int> seen(walk.begin(), walk.end());
      CHECK(seen.size() == static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("edge list export") {
  const SpanningTree tree(3, {{0, 1, 0.5}, {1, 2, 2.0}});
  CHECK(format_edge_list(tree) == "0 1 0.5\n1 2 2\n");
}

TEST_SUITE_END();
