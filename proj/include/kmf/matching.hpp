#pragma once

#include <vector>

#include "kmf/graph.hpp"

namespace kmf {

// A matching stored as a mate table: mate(v) is the matched partner of v or
// -1 when v is unmatched. Always symmetric.
class Matching {
 public:
  Matching() = default;
  explicit Matching(int n) : mate_(n, -1) {}
  explicit Matching(std::vector<int> mate);

  int size() const { return size_; }
  int mate(Vertex v) const { return mate_[v]; }
  bool covers(Vertex v) const { return mate_[v] >= 0; }
  int vertex_count() const { return static_cast<int>(mate_.size()); }
  const std::vector<int>& mates() const { return mate_; }

  std::vector<VertexPair> edges() const;

  // Mate symmetry, no self-matches, and every matched pair an edge of g.
  bool valid_for(const Graph& g) const;

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<int> mate_;
  int size_ = 0;
};

// Maximum matching via repeated blossom-aware augmenting-path search on a
// greedy initial matching. Handles general graphs (odd cycles included).
Matching max_matching(const Graph& g);

// One round of augmentation on an explicit mate table: finds a single
// augmenting path with respect to `mate` (searching from each unmatched
// vertex in turn) and flips it. Returns false when no augmenting path exists.
bool augment_once(const Graph& g, std::vector<int>& mate);

// Independent exhaustive oracle: matching number by recursion over vertex
// subsets. Only for n <= 12.
int nu_brute_force(const Graph& g);

inline constexpr int kMaxBruteForceVertices = 12;

// Whether g + e contains a k-matching, given a maximum matching m of g:
//   |m| <= k-2  ->  false (one edge raises the matching number by at most 1)
//   |m| >= k    ->  true
//   |m| == k-1  ->  true iff g + e admits an m-augmenting path.
// Does not modify g or m. With verify_maximal set, first re-derives that m
// is maximum and throws ContractViolation otherwise.
bool creates_k_matching(const Graph& g, const Matching& m, VertexPair e, int k,
                        bool verify_maximal = false);

// Whether every non-edge of g would complete a k-matching. Precondition:
// nu(g) <= k-1, or g complete.
bool is_saturated(const Graph& g, int k);

}  // namespace kmf
