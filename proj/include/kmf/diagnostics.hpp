#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmf/graph.hpp"

namespace kmf {

// Largest edge count of an n-vertex graph with no k disjoint edges:
//   max( C(2k-1,2), C(k-1,2) + (k-1)(n-k+1) ), clamped to C(n,2).
// k = 0 is rejected; k > floor(n/2)+1 yields C(n,2).
std::int64_t erdos_gallai_bound(int n, int k);

// The two extremal graphs meeting that bound: a (k-1)-clique joined to every
// other vertex, and a (2k-1)-clique plus isolated vertices.
Graph construct_g_star(int n, int k);
Graph construct_g_clique(int n, int k);

enum class ClassLabel { kGStar, kGClique, kOther };

std::string to_string(ClassLabel label);

struct Classification {
  ClassLabel label = ClassLabel::kOther;
  // G_star: the degree-(n-1) vertices. G_clique: the clique vertices.
  std::vector<Vertex> witness;
};

// Exact predicates:
//   G_star   <=> the set S of degree-(n-1) vertices has |S| = k-1 and no edge
//                joins two vertices outside S (for k = 1: the empty graph);
//   G_clique <=> some component is a clique on 2k-1 vertices and every other
//                vertex is isolated (for k = 1: again the empty graph; G_star
//                takes precedence there).
Classification classify_extremal(const Graph& g, int k);

// Paths x-y-z whose endpoints x, z both have degree 1.
std::int64_t count_cherries(const Graph& g);

// Triangles all three of whose vertices have degree exactly 2.
std::int64_t count_isolated_triangles(const Graph& g);

// Connected components that are exactly a 3-vertex path.
std::int64_t count_isolated_two_paths(const Graph& g);

// v is dangerous when (a) some neighbour of v has degree 1, or (b) some
// neighbour w of v has degree 2 and a vertex u != w of degree at most 2 lies
// within distance 2 of w (u = v included; the definition is read literally).
std::vector<Vertex> dangerous_vertices(const Graph& g);

// Whether deleting any single non-dangerous vertex leaves a graph with a
// perfect matching. Requires an odd vertex count.
bool is_matching_resilient(const Graph& g);

std::int64_t count_degree_n_minus_1(const Graph& g);

// (number of isolated vertices) * (number of vertices with degree >= 2).
std::int64_t count_iso_deg2_pairs(const Graph& g);

// Predicted window [t_minus, t_plus] for the step at which exactly f+1
// isolated vertices remain:
//   t_minus = floor((ln n - ln(f+1) - h) * n/2), clamped below at 0,
//   t_plus  = ceil ((ln n - ln(f+1) + h) * n/2), clamped above at C(n,2).
struct HittingWindow {
  std::int64_t t_minus = 0;
  std::int64_t t_plus = 0;
};

HittingWindow hitting_prediction(int n, int f, double h);

// Independence number by branch and bound over components, with a greedy
// baseline. The budget counts search-tree nodes (deterministic across runs
// and thread counts, unlike a wall-clock cap). When the budget runs out the
// value is a valid lower bound and exact is false.
struct IndependenceResult {
  int value = 0;
  bool exact = true;
};

inline constexpr std::uint64_t kDefaultIndependenceNodeBudget = 5'000'000;

IndependenceResult independence_number(
    const Graph& g, std::uint64_t node_budget = kDefaultIndependenceNodeBudget);

}  // namespace kmf
