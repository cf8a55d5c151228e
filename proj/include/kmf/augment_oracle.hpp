#pragma once

#include <cstdint>
#include <vector>

#include "kmf/graph.hpp"

namespace kmf {

// Incremental augmenting-path detector for a fixed matching under edge
// insertions.
//
// Maintains the completed alternating forest of a blossom-aware multi-root
// search seeded at every unmatched vertex: labels Even / Odd / Unreached,
// tree roots, and contracted blossoms (union-find over bases). Once built
// with no augmenting path present, the state answers "would adding {u,v}
// create an augmenting path?" in near-constant amortized time, because label
// upgrades are monotone: Unreached -> Odd/Even and Odd -> Even only.
//
// Soundness of the shortcuts relies on two facts about a completed forest:
//   - the Even set equals the set of vertices missed by some maximum
//     matching, so an insertion can only augment if both endpoints are Even;
//   - every neighbour of an Even vertex is already reached, so processing an
//     accepted insertion only ever needs to start from its own endpoints.
class AugmentOracle {
 public:
  AugmentOracle() = default;

  // Builds the forest for (g, mate). Returns false when an augmenting path
  // for `mate` already exists in g; the oracle is then not ready and must be
  // rebuilt after the matching is augmented. The graph reference is retained;
  // the caller may only grow it through the offer() protocol below.
  bool build(const Graph& g, const std::vector<int>& mate);

  bool ready() const { return ready_; }

  // Whether adding the non-edge {u,v} would create an augmenting path.
  // Leaves the state exactly as it was.
  bool probe(Vertex u, Vertex v);

  // Same answer as probe. On "false" the forest is advanced as if {u,v} were
  // inserted, and the caller must then actually add the edge to the graph.
  // On "true" nothing changes (the process rejects such edges).
  bool offer(Vertex u, Vertex v);

  // Introspection used by tests and by structural final-graph checks.
  bool is_even(Vertex v) const { return label_[v] == kEven; }
  bool is_odd(Vertex v) const { return label_[v] == kOdd; }
  bool is_unreached(Vertex v) const { return label_[v] == kUnreached; }
  Vertex tree_root(Vertex v) const { return root_[v]; }

 private:
  enum : std::int8_t { kUnreached = 0, kOdd = 1, kEven = 2 };
  enum : std::int8_t { kFldLabel, kFldRoot, kFldParent, kFldDsuUp, kFldDsuSz, kFldBase };

  struct JournalEntry {
    std::int8_t field;
    int idx;
    int old;
  };

  int find(int x) const;
  int base(int x) const { return base_of_[find(x)]; }
  void set_field(std::int8_t field, int idx, int value);
  void unite(int a, int b);

  // Returns true when an augmenting path is detected.
  bool handle_edge(Vertex x, Vertex y);
  bool drain(Vertex pu, Vertex pv);
  void contract(Vertex x, Vertex y);
  int lowest_common_base(int bx, int by);
  bool cascade(Vertex u, Vertex v);
  void rollback(std::size_t mark);
  void commit() { journal_.clear(); }

  const Graph* g_ = nullptr;
  std::vector<int> mate_;
  std::vector<std::int8_t> label_;
  std::vector<int> root_;
  std::vector<int> parent_;
  std::vector<int> dsu_up_;
  std::vector<int> dsu_sz_;
  std::vector<int> base_of_;
  std::vector<int> mark_;
  int epoch_ = 0;
  std::vector<int> work_;
  std::vector<int> chain_bases_;
  std::vector<int> chain_odds_;
  std::vector<JournalEntry> journal_;
  bool ready_ = false;
};

}  // namespace kmf
