#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmf/augment_oracle.hpp"
#include "kmf/charge_tracker.hpp"
#include "kmf/diagnostics.hpp"
#include "kmf/graph.hpp"
#include "kmf/matching.hpp"

namespace kmf {

struct ProcessOptions {
  bool record_trace = false;
  bool charges = false;
  std::uint64_t independence_node_budget = kDefaultIndependenceNodeBudget;
};

struct TrialRecord {
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;  // pairs offered, C(n,2)
  std::int64_t tau_nu = -1;
  std::int64_t tau_iso = -1;
  std::int64_t final_edges = 0;
  std::int64_t isolated_final = 0;
  std::int64_t deg_n_minus_1_final = 0;
  ClassLabel classification = ClassLabel::kOther;
  int independence_value = 0;
  bool independence_exact = false;
  // Snapshots at tau_nu (-1 when the matching never reaches k-1).
  std::int64_t iso_triangles_tau = -1;
  std::int64_t susceptibility_tau = -1;
  std::int64_t susceptibility_tilde_tau = -1;
  std::int64_t iso_two_paths_tau = -1;
  // Snapshots at tau_iso, or at the end when tau_iso is never hit.
  std::int64_t cherries_snapshot = 0;
  std::int64_t dangerous_snapshot = 0;
  std::int64_t iso_deg2_pairs_snapshot = 0;
  int invariant_violations = 0;
  std::vector<std::uint8_t> trace;  // per-step accept flags when recorded
  std::optional<ChargeSummary> charges;

  std::map<std::string, double> diagnostics_map() const;
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// One run of the greedy process as a resumable machine: feed pairs in any
// order via step(); each pair may be offered once. An offer is accepted
// exactly when the graph plus that edge still has no matching of size k.
// Acceptance is decided incrementally: while the matching can still grow
// (size < k-1) every edge is accepted and the matching is re-augmented;
// once it reaches k-1 it is frozen and offers are answered by the
// augmenting-path oracle.
class ProcessState {
 public:
  ProcessState(int n, int k);

  bool step(VertexPair e);

  const Graph& graph() const { return g_; }
  std::int64_t time() const { return t_; }
  int n() const { return n_; }
  int k() const { return k_; }
  int nu() const { return nu_; }
  bool frozen() const { return frozen_; }
  std::int64_t tau_nu() const { return tau_nu_; }    // -1 until frozen
  std::int64_t tau_iso() const { return tau_iso_; }  // -1 until hit
  int isolated_count() const { return iso_count_; }
  const std::vector<int>& mates() const { return mate_; }
  bool done() const { return t_ == total_pairs(n_); }
  // Edge-count ceiling breaches observed so far (must stay 0).
  int violations() const { return violations_; }

 private:
  int n_, k_;
  Graph g_;
  std::int64_t t_ = 0;
  std::vector<int> mate_;
  int nu_ = 0;
  bool frozen_ = false;
  std::int64_t tau_nu_ = -1;
  std::int64_t tau_iso_ = -1;
  int iso_count_;
  int iso_target_;  // n - 2k + 1, tracked when >= 1
  std::int64_t eg_bound_;
  int violations_ = 0;
  AugmentOracle oracle_;
  std::vector<std::uint64_t> offered_;
};

// Runs the process over a uniformly random pair ordering drawn from seed and
// returns the full record, including invariant-violation counts (expected 0).
TrialRecord run_process(int n, int k, std::uint64_t seed,
                        const ProcessOptions& opts = {});

// Same, over a caller-supplied ordering of all C(n,2) pairs.
TrialRecord run_process_with_order(int n, int k, std::uint64_t seed,
                                   const std::vector<VertexPair>& order,
                                   const ProcessOptions& opts = {});

// --- Exact distribution over all orderings (tiny n) ---------------------

// Edge mask helpers: bit pair_index(n,u,v) of the mask encodes edge {u,v}.
std::uint64_t graph_edge_mask(const Graph& g);  // n <= 10
Graph graph_from_edge_mask(int n, std::uint64_t mask);
// Lexicographically smallest mask over all vertex relabelings. n <= 5.
std::uint64_t canonical_edge_mask(int n, std::uint64_t mask);

struct ExhaustiveOutcome {
  std::uint64_t canonical_mask = 0;
  std::int64_t orderings = 0;  // orderings ending in this isomorphism class
  double probability = 0.0;
  ClassLabel label = ClassLabel::kOther;
  int edge_count = 0;
};

// Runs the process once per permutation of all C(n,2) pairs (n <= 5) and
// aggregates final graphs by isomorphism class, sorted by canonical mask.
std::vector<ExhaustiveOutcome> process_exhaustive(int n, int k);

// --- Trace files ---------------------------------------------------------

// Header "n k seed", then one line "t u v accepted" per step, t from 1.
struct TraceData {
  int n = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<VertexPair> order;
  std::vector<std::uint8_t> accepted;
};

void write_trace(std::ostream& out, const TraceData& trace);
TraceData read_trace(std::istream& in, const std::string& origin);

}  // namespace kmf
