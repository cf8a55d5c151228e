#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kmf/errors.hpp"

namespace kmf {

using Vertex = int;

// An unordered vertex pair, stored normalized with u < v.
struct VertexPair {
  Vertex u = 0;
  Vertex v = 0;

  friend bool operator==(const VertexPair&, const VertexPair&) = default;
};

VertexPair make_pair_sorted(Vertex a, Vertex b);

// Index of the pair {u, v} (u < v) in the lexicographic list of all pairs on
// n vertices: {0,1},{0,2},...,{0,n-1},{1,2},...  The mapping is
//   index = u*n - u*(u+1)/2 + (v - u - 1)
// and ranges over [0, n*(n-1)/2).
std::int64_t pair_index(int n, Vertex u, Vertex v);

std::int64_t total_pairs(int n);

// Simple undirected graph on vertices 0..n-1. No self-loops, no multi-edges.
// Adjacency lists are append-only (edges are never removed); a bitset over
// pair indices backs O(1) worst-case membership queries.
class Graph {
 public:
  explicit Graph(int n);

  int vertex_count() const { return n_; }
  std::int64_t edge_count() const { return m_; }
  int degree(Vertex v) const { return static_cast<int>(adj_[check(v)].size()); }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[check(v)]; }

  bool has_edge(Vertex u, Vertex v) const;
  void add_edge(Vertex u, Vertex v);
  bool is_complete() const { return m_ == total_pairs(n_); }

  std::vector<Vertex> isolated_vertices() const;
  int isolated_count() const;

  // Components as sorted vertex lists, ordered by smallest member.
  std::vector<std::vector<Vertex>> connected_components() const;

 private:
  int check(Vertex v) const {
    if (v < 0 || v >= n_) throw ContractViolation("vertex out of range");
    return v;
  }

  int n_;
  std::int64_t m_ = 0;
  std::vector<std::vector<Vertex>> adj_;
  std::vector<std::uint64_t> bits_;
};

struct Susceptibility {
  std::int64_t s = 0;        // sum over components of |C|^2
  std::int64_t s_tilde = 0;  // same, ignoring isolated vertices
};

Susceptibility susceptibility(const Graph& g);

// All n*(n-1)/2 vertex pairs in uniformly random order (Fisher-Yates over the
// materialized pair list). n is capped at kMaxPermutationVertices.
struct EdgePermutation {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<VertexPair> order;
};

inline constexpr int kMaxPermutationVertices = 5000;

EdgePermutation random_edge_permutation(int n, std::uint64_t seed);

// Edge-list file format: first line "n m", then m lines "u v" with u < v.
Graph read_edge_list(std::istream& in, const std::string& origin);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(const Graph& g, std::ostream& out);
void write_edge_list_file(const Graph& g, const std::string& path);

}  // namespace kmf
