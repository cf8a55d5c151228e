#include "kmf/process.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kmf/errors.hpp"

namespace kmf {

namespace {

// Node budget for the exact independence check run on small final graphs.
constexpr std::uint64_t kConsequenceNodeBudget = 50'000'000;

}  // namespace

ProcessState::ProcessState(int n, int k)
    : n_(n), k_(k), g_(n), mate_(n, -1), iso_count_(n) {
  if (k < 1) throw std::invalid_argument("ProcessState: k must be >= 1");
  iso_target_ = n - 2 * k + 1;
  eg_bound_ = erdos_gallai_bound(n, k);
  offered_.assign(static_cast<std::size_t>((total_pairs(n) + 63) / 64), 0);
  if (k_ == 1) {
    frozen_ = true;
    tau_nu_ = 0;
  }
  if (!oracle_.build(g_, mate_))
    throw ContractViolation("ProcessState: initial oracle build failed");
}

bool ProcessState::step(VertexPair e) {
  if (done()) throw ContractViolation("ProcessState::step: all pairs offered");
  VertexPair p = make_pair_sorted(e.u, e.v);
  std::int64_t pi = pair_index(n_, p.u, p.v);
  std::uint64_t& word = offered_[static_cast<std::size_t>(pi >> 6)];
  std::uint64_t bit = 1ull << (pi & 63);
  if (word & bit)
    throw ContractViolation("ProcessState::step: pair offered twice");
  word |= bit;
  ++t_;

  bool u_iso = g_.degree(p.u) == 0;
  bool v_iso = g_.degree(p.v) == 0;
  bool accepted;
  if (!frozen_) {
    // Growth phase: accept unconditionally, keep the matching maximum.
    bool augments = oracle_.offer(p.u, p.v);
    g_.add_edge(p.u, p.v);
    if (augments) {
      if (!augment_once(g_, mate_))
        throw ContractViolation(
            "internal: predicted augmenting path not found");
      ++nu_;
      if (!oracle_.build(g_, mate_))
        throw ContractViolation(
            "internal: oracle rebuild found a larger matching");
      if (nu_ == k_ - 1) {
        frozen_ = true;
        tau_nu_ = t_;
      }
    }
    accepted = true;
  } else {
    // Frozen phase: accept exactly when no augmenting path appears.
    accepted = !oracle_.offer(p.u, p.v);
    if (accepted) g_.add_edge(p.u, p.v);
  }

  if (accepted) {
    iso_count_ -= (u_iso ? 1 : 0) + (v_iso ? 1 : 0);
    if (iso_target_ >= 1 && tau_iso_ < 0 && iso_count_ == iso_target_)
      tau_iso_ = t_;
  }
  if (g_.edge_count() > eg_bound_) ++violations_;
  return accepted;
}

std::map<std::string, double> TrialRecord::diagnostics_map() const {
  std::map<std::string, double> m;
  m["tau_nu"] = static_cast<double>(tau_nu);
  m["tau_iso"] = static_cast<double>(tau_iso);
  m["final_edges"] = static_cast<double>(final_edges);
  m["isolated_final"] = static_cast<double>(isolated_final);
  m["deg_n_minus_1_final"] = static_cast<double>(deg_n_minus_1_final);
  m["independence_value"] = independence_value;
  m["independence_exact"] = independence_exact ? 1.0 : 0.0;
  m["iso_triangles_tau"] = static_cast<double>(iso_triangles_tau);
  m["susceptibility_tau"] = static_cast<double>(susceptibility_tau);
  m["susceptibility_tilde_tau"] = static_cast<double>(susceptibility_tilde_tau);
  m["iso_two_paths_tau"] = static_cast<double>(iso_two_paths_tau);
  m["cherries"] = static_cast<double>(cherries_snapshot);
  m["dangerous"] = static_cast<double>(dangerous_snapshot);
  m["iso_deg2_pairs"] = static_cast<double>(iso_deg2_pairs_snapshot);
  m["invariant_violations"] = invariant_violations;
  return m;
}

TrialRecord run_process_with_order(int n, int k, std::uint64_t seed,
                                   const std::vector<VertexPair>& order,
                                   const ProcessOptions& opts) {
  if (n < 2) throw std::invalid_argument("run_process: n must be >= 2");
  if (k < 1) throw std::invalid_argument("run_process: k must be >= 1");
  std::int64_t total = total_pairs(n);
  if (static_cast<std::int64_t>(order.size()) != total)
    throw std::invalid_argument(
        "run_process: order must list every pair exactly once");

  ProcessState st(n, k);
  TrialRecord rec;
  rec.n = n;
  rec.k = k;
  rec.seed = seed;
  rec.steps = total;
  if (opts.record_trace) rec.trace.reserve(static_cast<std::size_t>(total));

  std::optional<ChargeTracker> tracker;
  bool iso_snapshot_done = false;
  bool tau_acyclic = true;

  auto take_tau_snapshot = [&]() {
    const Graph& g = st.graph();
    tau_acyclic =
        g.edge_count() ==
        g.vertex_count() - static_cast<int>(g.connected_components().size());
    rec.iso_triangles_tau = count_isolated_triangles(g);
    Susceptibility s = susceptibility(g);
    rec.susceptibility_tau = s.s;
    rec.susceptibility_tilde_tau = s.s_tilde;
    rec.iso_two_paths_tau = count_isolated_two_paths(g);
  };
  auto take_iso_snapshot = [&]() {
    const Graph& g = st.graph();
    rec.cherries_snapshot = count_cherries(g);
    rec.dangerous_snapshot =
        static_cast<std::int64_t>(dangerous_vertices(g).size());
    rec.iso_deg2_pairs_snapshot = count_iso_deg2_pairs(g);
    iso_snapshot_done = true;
  };

  if (st.frozen()) {  // k == 1 freezes on the empty graph
    take_tau_snapshot();
    if (opts.charges) tracker.emplace(st.graph(), st.mates(), order, 0);
  }

  for (std::int64_t t = 1; t <= total; ++t) {
    VertexPair e = order[static_cast<std::size_t>(t - 1)];
    bool was_frozen = st.frozen();
    bool accepted = st.step(e);
    if (opts.record_trace) rec.trace.push_back(accepted ? 1 : 0);
    if (!was_frozen && st.frozen()) {
      take_tau_snapshot();
      if (opts.charges)
        tracker.emplace(st.graph(), st.mates(), order, st.tau_nu());
    } else if (tracker) {
      tracker->on_offer(t, e, accepted, st.graph());
    }
    if (!iso_snapshot_done && st.tau_iso() == t) take_iso_snapshot();
  }

  const Graph& g = st.graph();
  rec.tau_nu = st.tau_nu();
  rec.tau_iso = st.tau_iso();
  rec.final_edges = g.edge_count();
  rec.isolated_final = st.isolated_count();
  rec.deg_n_minus_1_final = count_degree_n_minus_1(g);
  rec.classification = classify_extremal(g, k).label;
  IndependenceResult ind =
      independence_number(g, opts.independence_node_budget);
  rec.independence_value = ind.value;
  rec.independence_exact = ind.exact;
  if (!iso_snapshot_done) take_iso_snapshot();

  int violations = st.violations();

  // The tracked matching size must match a from-scratch recomputation, and a
  // frozen run must end at exactly k-1.
  Matching mm = max_matching(g);
  if (mm.size() != st.nu()) ++violations;
  if (st.frozen() && st.nu() != k - 1) ++violations;
  if (st.isolated_count() != g.isolated_count()) ++violations;

  // Every final graph must be saturated: each missing edge completes a
  // k-matching.
  bool saturated = false;
  try {
    saturated = is_saturated(g, k);
  } catch (const ContractViolation&) {
    saturated = false;
  }
  if (!saturated) ++violations;

  // An isolated triangle at the freeze step blocks the star extremal.
  if (rec.classification == ClassLabel::kGStar && rec.iso_triangles_tau > 0)
    ++violations;

  // Saturated graphs keep a large independent set: alpha > n - 2k + d where
  // d counts degree-(n-1) vertices. Verified exactly on small graphs.
  if (st.frozen() && n <= 60 && 2 * k <= n) {
    IndependenceResult exact = independence_number(g, kConsequenceNodeBudget);
    if (exact.exact &&
        exact.value <= n - 2 * k + static_cast<int>(rec.deg_n_minus_1_final))
      ++violations;
  }

  if (tracker) {
    ChargeSummary cs = tracker->summary();
    violations += cs.neg_neg_cross_root_accepts;
    if (!cs.csub_refines_c) ++violations;
    if (!cs.c_prime_refines_f_prime) ++violations;
    if (!cs.d_bar_refines_f_prime) ++violations;
    // When the coupling hypothesis holds and the freeze graph was acyclic
    // (uncharged components stay forests, so charge cascades 2-colour them
    // cleanly), the run must end at the star.
    if (cs.lemma24_hypothesis && tau_acyclic &&
        rec.classification != ClassLabel::kGStar)
      ++violations;
    rec.charges = std::move(cs);
  }

  rec.invariant_violations = violations;
  return rec;
}

TrialRecord run_process(int n, int k, std::uint64_t seed,
                        const ProcessOptions& opts) {
  EdgePermutation perm = random_edge_permutation(n, seed);
  return run_process_with_order(n, k, seed, perm.order, opts);
}

// --- Exact distribution over all orderings -------------------------------

namespace {

struct CanonTable {
  int n = 0;
  int bits = 0;
  std::vector<std::vector<int>> bit_maps;  // one bit relabeling per vertex permutation
};

CanonTable make_canon_table(int n) {
  CanonTable tbl;
  tbl.n = n;
  tbl.bits = static_cast<int>(total_pairs(n));
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    std::vector<int> map(static_cast<std::size_t>(tbl.bits));
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        int a = std::min(p[u], p[v]);
        int b = std::max(p[u], p[v]);
        map[static_cast<std::size_t>(pair_index(n, u, v))] =
            static_cast<int>(pair_index(n, a, b));
      }
    tbl.bit_maps.push_back(std::move(map));
  } while (std::next_permutation(p.begin(), p.end()));
  return tbl;
}

std::uint64_t canon_with(const CanonTable& tbl, std::uint64_t mask) {
  std::uint64_t best = ~0ull;
  for (const std::vector<int>& map : tbl.bit_maps) {
    std::uint64_t out = 0;
    std::uint64_t rest = mask;
    while (rest) {
      int bit = std::countr_zero(rest);
      rest &= rest - 1;
      out |= 1ull << map[static_cast<std::size_t>(bit)];
    }
    best = std::min(best, out);
  }
  return best;
}

}  // namespace

std::uint64_t graph_edge_mask(const Graph& g) {
  int n = g.vertex_count();
  if (n > 10)
    throw std::invalid_argument("graph_edge_mask: needs n <= 10");
  std::uint64_t mask = 0;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u))
      if (v > u) mask |= 1ull << pair_index(n, u, v);
  return mask;
}

Graph graph_from_edge_mask(int n, std::uint64_t mask) {
  if (n < 1 || n > 10)
    throw std::invalid_argument("graph_from_edge_mask: needs 1 <= n <= 10");
  if (total_pairs(n) < 64 && (mask >> total_pairs(n)) != 0)
    throw std::invalid_argument("graph_from_edge_mask: mask out of range");
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (mask & (1ull << pair_index(n, u, v))) g.add_edge(u, v);
  return g;
}

std::uint64_t canonical_edge_mask(int n, std::uint64_t mask) {
  if (n < 1 || n > 5)
    throw std::invalid_argument("canonical_edge_mask: needs 1 <= n <= 5");
  if ((mask >> total_pairs(n)) != 0)
    throw std::invalid_argument("canonical_edge_mask: mask out of range");
  CanonTable tbl = make_canon_table(n);
  return canon_with(tbl, mask);
}

std::vector<ExhaustiveOutcome> process_exhaustive(int n, int k) {
  if (n < 2 || n > 5)
    throw std::invalid_argument("process_exhaustive: needs 2 <= n <= 5");
  if (k < 1) throw std::invalid_argument("process_exhaustive: k must be >= 1");

  int bits = static_cast<int>(total_pairs(n));
  std::size_t masks = 1ull << bits;
  std::vector<std::int8_t> nu_of(masks);
  for (std::size_t m = 0; m < masks; ++m)
    nu_of[m] =
        static_cast<std::int8_t>(nu_brute_force(graph_from_edge_mask(n, m)));

  CanonTable tbl = make_canon_table(n);
  std::vector<std::int64_t> canon_cache(masks, -1);
  std::map<std::uint64_t, std::int64_t> counts;

  std::vector<int> order(static_cast<std::size_t>(bits));
  std::iota(order.begin(), order.end(), 0);
  std::int64_t total_orderings = 0;
  do {
    std::uint64_t cur = 0;
    for (int idx : order) {
      std::uint64_t next = cur | (1ull << idx);
      if (nu_of[next] <= k - 1) cur = next;
    }
    if (canon_cache[cur] < 0)
      canon_cache[cur] = static_cast<std::int64_t>(canon_with(tbl, cur));
    ++counts[static_cast<std::uint64_t>(canon_cache[cur])];
    ++total_orderings;
  } while (std::next_permutation(order.begin(), order.end()));

  std::vector<ExhaustiveOutcome> out;
  for (const auto& [mask, count] : counts) {
    ExhaustiveOutcome o;
    o.canonical_mask = mask;
    o.orderings = count;
    o.probability =
        static_cast<double>(count) / static_cast<double>(total_orderings);
    Graph g = graph_from_edge_mask(n, mask);
    o.label = classify_extremal(g, k).label;
    o.edge_count = std::popcount(mask);
    out.push_back(o);
  }
  return out;
}

// --- Trace files ----------------------------------------------------------

namespace {

[[noreturn]] void trace_error(const std::string& origin, std::int64_t line,
                              const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

}  // namespace

void write_trace(std::ostream& out, const TraceData& trace) {
  if (trace.order.size() != trace.accepted.size())
    throw ContractViolation("write_trace: order/accepted size mismatch");
  out << trace.n << ' ' << trace.k << ' ' << trace.seed << '\n';
  for (std::size_t i = 0; i < trace.order.size(); ++i)
    out << (i + 1) << ' ' << trace.order[i].u << ' ' << trace.order[i].v << ' '
        << int(trace.accepted[i] ? 1 : 0) << '\n';
}

TraceData read_trace(std::istream& in, const std::string& origin) {
  TraceData tr;
  std::string line;
  std::int64_t lineno = 0;
  if (!std::getline(in, line)) trace_error(origin, 1, "missing header");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> tr.n >> tr.k >> tr.seed) || (hs >> extra))
      trace_error(origin, lineno, "header must be 'n k seed'");
  }
  if (tr.n < 2 || tr.n > kMaxPermutationVertices)
    trace_error(origin, lineno, "vertex count out of range");
  if (tr.k < 1) trace_error(origin, lineno, "k must be >= 1");
  std::int64_t total = total_pairs(tr.n);
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::int64_t t;
    int u, v, acc;
    std::string extra;
    if (!(ls >> t >> u >> v >> acc) || (ls >> extra))
      trace_error(origin, lineno, "expected 't u v accepted'");
    if (t != static_cast<std::int64_t>(tr.order.size()) + 1)
      trace_error(origin, lineno, "step numbers must run 1..N in order");
    if (u < 0 || v < 0 || u >= tr.n || v >= tr.n || u >= v)
      trace_error(origin, lineno, "endpoints must satisfy 0 <= u < v < n");
    if (acc != 0 && acc != 1)
      trace_error(origin, lineno, "accepted flag must be 0 or 1");
    std::int64_t pi = pair_index(tr.n, u, v);
    if (seen[static_cast<std::size_t>(pi)])
      trace_error(origin, lineno, "pair listed twice");
    seen[static_cast<std::size_t>(pi)] = 1;
    tr.order.push_back(VertexPair{u, v});
    tr.accepted.push_back(static_cast<std::uint8_t>(acc));
  }
  if (static_cast<std::int64_t>(tr.order.size()) != total)
    trace_error(origin, lineno + 1, "trace must list every pair exactly once");
  return tr;
}

}  // namespace kmf
