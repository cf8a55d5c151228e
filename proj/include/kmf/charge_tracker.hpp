#pragma once

#include <cstdint>
#include <iosfwd>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "kmf/graph.hpp"

namespace kmf {

// Summary of a charge-instrumented run. Per-vertex times are -1 when the
// event never happened.
struct ChargeSummary {
  // Every matched vertex saw an edge into its own part strictly after its
  // partner saw an edge to an outside unmatched vertex (the coupling
  // hypothesis; when it holds the final graph must be the star extremal).
  bool lemma24_hypothesis = false;
  bool csub_refines_c = true;
  bool c_prime_refines_f_prime = true;
  bool d_bar_refines_f_prime = true;
  // Accepted edges joining two negatively charged vertices with different
  // roots. Must stay 0; counted as invariant violations.
  int neg_neg_cross_root_accepts = 0;
  // Vertices charged later than their first offer from an outside unmatched
  // vertex. Tracked as a diagnostic, not an invariant.
  int tau_c_gt_tau_b = 0;
  std::vector<int> charge;   // -1, 0 or +1 per vertex
  std::vector<Vertex> root;  // charge root, -1 when uncharged
  // tau_f: first offer into the vertex's own generalised part or to its
  // root. tau_b: first offer to an unmatched vertex other than its root;
  // the offer that assigns the root counts as an offer to the root, not to
  // its complement. tau_c: the step at which the vertex became charged.
  std::vector<std::int64_t> tau_f, tau_b, tau_c;
  friend bool operator==(const ChargeSummary&, const ChargeSummary&) = default;
};

// The partitions of the matched vertex set A maintained by the tracker.
// Parts are sorted internally and ordered by smallest member.
struct ComponentView {
  std::vector<std::vector<Vertex>> charge_parts;     // grouped by root
  std::vector<std::vector<Vertex>> uncharged_parts;  // uncharged components
  std::vector<std::vector<Vertex>> generalized_parts;  // the two combined
  // Charge trees cut at the root: grouped by anchor, uncharged as singletons.
  std::vector<std::vector<Vertex>> chain_parts;
  // chain_parts coarsened by the freeze-time generalized parts.
  std::vector<std::vector<Vertex>> chain_parts_coarse;
  // Union over time of the uncharged components since the freeze.
  std::vector<std::vector<Vertex>> union_parts;
  // Components of the coupled graph.
  std::vector<std::vector<Vertex>> coupled_parts;
};

// One step of the coupled graph: an offer between two matched vertices is
// added unless both endpoints have already seen an offer from an unmatched
// vertex. Offers touching unmatched vertices only raise those flags.
// Returns whether gprime gained an edge. in_a masks the matched vertices.
bool coupled_step(Graph& gprime, std::vector<char>& seen_b_edge,
                  const std::vector<char>& in_a, VertexPair e);

// Tracks charges from the moment the matching freezes. Unmatched vertices
// start with charge -1 rooted at themselves. Whenever an accepted edge joins
// a negative vertex x to an uncharged matched vertex a, the pair (a, mate(a))
// is charged (+1, -1) with x's root; competing chargers are resolved by the
// earliest offer index of the charging edge. Charges never change once set.
class ChargeTracker {
 public:
  // g_tau: the graph at the freeze step; mate: the frozen matching;
  // offer_order: the pair sequence so far (first tau offers, all accepted).
  ChargeTracker(const Graph& g_tau, const std::vector<int>& mate,
                const std::vector<VertexPair>& offer_order, std::int64_t tau);

  // Feed every offer after the freeze, in order, with the post-step graph.
  void on_offer(std::int64_t t, VertexPair e, bool accepted, const Graph& g);

  int charge(Vertex v) const { return charge_[v]; }
  Vertex root(Vertex v) const { return root_[v]; }      // -1 when uncharged
  Vertex anchor(Vertex v) const { return anchor_[v]; }  // -1 when uncharged
  std::int64_t tau() const { return tau_; }
  std::int64_t tau_f(Vertex v) const;  // -1 when never hit
  std::int64_t tau_b(Vertex v) const;
  std::int64_t tau_c(Vertex v) const;
  int neg_neg_cross_root_accepts() const { return neg_neg_cross_; }
  // Charging edges as (root, charger, charged) triples in charge order.
  const std::vector<std::tuple<Vertex, Vertex, Vertex>>& tree_log() const {
    return tree_log_;
  }

  ComponentView component_view() const;
  ChargeSummary summary() const;

  // One line "v charge root" per vertex; root is -1 when uncharged.
  void write_charge_dump(std::ostream& out) const;

 private:
  void drain(const Graph& g, std::int64_t when);
  void charge_pair(Vertex charger, Vertex a, std::int64_t when, const Graph& g);
  void push_candidates(Vertex negative, const Graph& g);
  void rebuild_component(int comp, const Graph& g);
  void merge_components(Vertex u, Vertex v);

  int n_;
  std::int64_t tau_;
  std::int64_t pairs_total_;
  std::int64_t last_t_;
  bool comps_ready_ = false;
  std::vector<int> mate_;
  std::vector<char> in_a_;
  std::vector<int> charge_;
  std::vector<Vertex> root_;
  std::vector<Vertex> anchor_;
  std::vector<std::int64_t> tau_f_, tau_b_, tau_c_;  // INT64_MAX = never
  std::vector<std::int32_t> offer_idx_;              // per pair index
  std::vector<int> comp_id_;                         // -1 for charged / in B
  std::vector<std::vector<Vertex>> comp_members_;
  std::vector<int> dbar_;  // union-find over vertices
  std::vector<int> snapshot_part_;  // generalized part id at the freeze
  Graph gprime_;
  std::vector<char> seen_b_edge_;
  std::vector<std::tuple<Vertex, Vertex, Vertex>> tree_log_;
  int neg_neg_cross_ = 0;
  // (offer index of the charging edge, charger, target); min-heap.
  using Candidate = std::tuple<std::int64_t, Vertex, Vertex>;
  std::priority_queue<Candidate, std::vector<Candidate>,
                      std::greater<Candidate>>
      queue_;

  int dbar_find(int v) const;
};

}  // namespace kmf
