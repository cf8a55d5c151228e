#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "kmf/errors.hpp"
#include "kmf/graph.hpp"
#include "support/naive.hpp"

using namespace kmf;

TEST_CASE("pair_index enumerates pairs lexicographically") {
  for (int n : {2, 3, 5, 17, 100}) {
    std::int64_t expect = 0;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) {
        CHECK(pair_index(n, u, v) == expect);
        CHECK(pair_index(n, v, u) == expect);  // order-insensitive
        ++expect;
      }
    CHECK(expect == total_pairs(n));
  }
  CHECK(total_pairs(1) == 0);
  CHECK(total_pairs(1000) == 499500);
  CHECK_THROWS_AS(pair_index(5, 2, 2), ContractViolation);
  CHECK_THROWS_AS(pair_index(5, -1, 3), ContractViolation);
  CHECK_THROWS_AS(pair_index(5, 0, 5), ContractViolation);
}

TEST_CASE("make_pair_sorted normalizes and rejects loops") {
  CHECK(make_pair_sorted(4, 1) == VertexPair{1, 4});
  CHECK(make_pair_sorted(1, 4) == VertexPair{1, 4});
  CHECK_THROWS_AS(make_pair_sorted(2, 2), ContractViolation);
}

TEST_CASE("graph construction and membership") {
  Graph g(5);
  CHECK(g.vertex_count() == 5);
  CHECK(g.edge_count() == 0);
  g.add_edge(0, 1);
  g.add_edge(3, 1);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(1, 3));
  CHECK_FALSE(g.has_edge(0, 3));
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(4) == 0);
  CHECK_FALSE(g.is_complete());

  CHECK_THROWS_AS(g.add_edge(0, 1), ContractViolation);  // duplicate
  CHECK_THROWS_AS(g.add_edge(1, 0), ContractViolation);
  CHECK_THROWS_AS(g.add_edge(2, 2), ContractViolation);  // loop
  CHECK_THROWS_AS(g.add_edge(0, 5), ContractViolation);  // range
  CHECK_THROWS_AS(g.degree(-1), ContractViolation);
  CHECK_THROWS_AS((void)g.has_edge(5, 0), ContractViolation);
  CHECK_THROWS_AS(Graph(0), std::invalid_argument);

  Graph k4(4);
  for (Vertex u = 0; u < 4; ++u)
    for (Vertex v = u + 1; v < 4; ++v) k4.add_edge(u, v);
  CHECK(k4.is_complete());
}

TEST_CASE("isolated vertices and components") {
  // Two triangles {0,1,2}, {5,6,7} and isolated 3, 4.
  Graph g = test::graph_from_edges(
      8, {{0, 1}, {1, 2}, {0, 2}, {5, 6}, {6, 7}, {5, 7}});
  CHECK(g.isolated_count() == 2);
  CHECK(g.isolated_vertices() == std::vector<Vertex>{3, 4});
  auto comps = g.connected_components();
  REQUIRE(comps.size() == 4);
  CHECK(comps[0] == std::vector<Vertex>{0, 1, 2});
  CHECK(comps[1] == std::vector<Vertex>{3});
  CHECK(comps[2] == std::vector<Vertex>{4});
  CHECK(comps[3] == std::vector<Vertex>{5, 6, 7});
}

TEST_CASE("susceptibility sums squared component sizes") {
  // Component sizes 3, 2, 1, 1.
  Graph g = test::graph_from_edges(7, {{0, 1}, {1, 2}, {3, 4}});
  auto s = susceptibility(g);
  CHECK(s.s == 9 + 4 + 1 + 1);
  CHECK(s.s_tilde == 9 + 4);
  CHECK(susceptibility(Graph(4)).s == 4);
  CHECK(susceptibility(Graph(4)).s_tilde == 0);

  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    Graph r = test::random_graph(12, 0.15, rng);
    auto fast = susceptibility(r);
    auto ref = test::naive_susceptibility(r);
    CHECK(fast.s == ref.s);
    CHECK(fast.s_tilde == ref.s_tilde);
  }
}

TEST_CASE("random_edge_permutation covers every pair exactly once") {
  for (int n : {2, 3, 7, 40}) {
    EdgePermutation perm = random_edge_permutation(n, 123);
    CHECK(perm.n == n);
    CHECK(perm.seed == 123);
    REQUIRE(perm.order.size() == static_cast<std::size_t>(total_pairs(n)));
    std::vector<char> seen(total_pairs(n), 0);
    for (VertexPair p : perm.order) {
      CHECK(p.u < p.v);
      std::int64_t i = pair_index(n, p.u, p.v);
      CHECK_FALSE(seen[i]);
      seen[i] = 1;
    }
  }
  CHECK_THROWS_AS(random_edge_permutation(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(random_edge_permutation(kMaxPermutationVertices + 1, 0),
                  std::invalid_argument);
}

TEST_CASE("random_edge_permutation is deterministic in the seed") {
  auto a = random_edge_permutation(25, 9001);
  auto b = random_edge_permutation(25, 9001);
  CHECK(a.order == b.order);
  auto c = random_edge_permutation(25, 9002);
  CHECK(a.order != c.order);
}

TEST_CASE("random_edge_permutation is close to uniform on 3 vertices") {
  // 3 pairs -> 6 orderings; identify one by the first two positions.
  const int reps = 60000;
  std::array<int, 6> count{};
  for (int seed = 0; seed < reps; ++seed) {
    auto perm = random_edge_permutation(3, static_cast<std::uint64_t>(seed));
    int p0 = static_cast<int>(pair_index(3, perm.order[0].u, perm.order[0].v));
    int p1 = static_cast<int>(pair_index(3, perm.order[1].u, perm.order[1].v));
    int rank1 = p1 > p0 ? p1 - 1 : p1;
    ++count[p0 * 2 + rank1];
  }
  for (int c : count) {
    CHECK(c > 10000 - 400);  // ~4.4 sigma around reps/6
    CHECK(c < 10000 + 400);
  }
}

TEST_CASE("edge list round trip") {
  Graph g = test::graph_from_edges(6, {{0, 1}, {0, 5}, {2, 4}, {3, 4}});
  std::stringstream buf;
  write_edge_list(g, buf);
  Graph back = read_edge_list(buf, "buf");
  CHECK(back.vertex_count() == 6);
  CHECK(back.edge_count() == 4);
  for (Vertex u = 0; u < 6; ++u)
    for (Vertex v = u + 1; v < 6; ++v) CHECK(back.has_edge(u, v) == g.has_edge(u, v));
}

TEST_CASE("edge list rejects malformed input with position info") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_edge_list(in, "in.txt");
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("in.txt:") != std::string::npos);
      CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
    }
  };
  fails_with("", "missing header");
  fails_with("x y\n", "header");
  fails_with("3 1 9\n0 1\n", "trailing");
  fails_with("3 2\n0 1\n", "missing edge line");
  fails_with("3 1\n1 0\n", "u < v");
  fails_with("3 1\n0 3\n", "out of range");
  fails_with("3 2\n0 1\n0 1\n", "duplicate");
  fails_with("3 1\n0 1 junk\n", "trailing");
  // The line number points at the offending row.
  std::istringstream in("3 2\n0 1\n1 0\n");
  try {
    read_edge_list(in, "f");
    FAIL_CHECK("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("f:3:") != std::string::npos);
  }
}

TEST_CASE("edge list file errors name the path") {
  CHECK_THROWS_WITH_AS(read_edge_list_file("/nonexistent/kmf-missing.txt"),
                       "/nonexistent/kmf-missing.txt: cannot open for reading",
                       std::runtime_error);
}
