#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kmf/diagnostics.hpp"
#include "kmf/errors.hpp"
#include "kmf/matching.hpp"
#include "kmf/process.hpp"
#include "support/naive.hpp"

using namespace kmf;

namespace {

Graph copy_graph(const Graph& g) {
  Graph h(g.vertex_count());
  for (Vertex u = 0; u < g.vertex_count(); ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) h.add_edge(u, v);
  return h;
}

// Reference run straight from the definition: accept an offer exactly when
// the graph stays free of k disjoint edges. Only for brute-force sizes.
std::vector<std::uint8_t> reference_decisions(int n, int k,
                                              const std::vector<VertexPair>& order) {
  Graph g(n);
  std::vector<std::uint8_t> out;
  for (VertexPair e : order) {
    Graph plus = copy_graph(g);
    plus.add_edge(e.u, e.v);
    bool accept = nu_brute_force(plus) <= k - 1;
    out.push_back(accept ? 1 : 0);
    if (accept) g.add_edge(e.u, e.v);
  }
  return out;
}

}  // namespace

TEST_CASE("process decisions match the definition on brute-force sizes") {
  for (int n : {4, 6, 8})
    for (int k = 1; k <= n / 2 + 1; ++k)
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto order = random_edge_permutation(n, seed).order;
        ProcessOptions opts;
        opts.record_trace = true;
        TrialRecord rec = run_process_with_order(n, k, seed, order, opts);
        CHECK(rec.invariant_violations == 0);
        CHECK(rec.trace == reference_decisions(n, k, order));
      }
}

TEST_CASE("records are deterministic given (n, k, seed)") {
  ProcessOptions opts;
  opts.record_trace = true;
  opts.charges = true;
  TrialRecord a = run_process(30, 5, 77, opts);
  TrialRecord b = run_process(30, 5, 77, opts);
  CHECK(a == b);
  TrialRecord c = run_process(30, 5, 78, opts);
  CHECK(a.seed != c.seed);
}

TEST_CASE("hitting times mean what they claim") {
  for (std::uint64_t seed : {4u, 5u, 6u, 7u}) {
    int n = 12, k = 3;
    auto order = random_edge_permutation(n, seed).order;
    ProcessOptions opts;
    opts.record_trace = true;
    TrialRecord rec = run_process_with_order(n, k, seed, order, opts);

    Graph g(n);
    std::int64_t first_frozen = -1, first_iso = -1;
    int target_iso = n - 2 * k + 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (rec.trace[i]) g.add_edge(order[i].u, order[i].v);
      auto t = static_cast<std::int64_t>(i) + 1;
      if (first_frozen < 0 && nu_brute_force(g) == k - 1) first_frozen = t;
      if (first_iso < 0 && g.isolated_count() == target_iso) first_iso = t;
    }
    CHECK(rec.tau_nu == first_frozen);
    CHECK(rec.tau_iso == first_iso);
    CHECK(rec.final_edges == g.edge_count());
    CHECK(rec.isolated_final == g.isolated_count());
    CHECK(nu_brute_force(g) == k - 1);
  }
}

TEST_CASE("k = 1 runs reject everything from the start") {
  TrialRecord rec = run_process(9, 1, 3, {.record_trace = true, .charges = true});
  CHECK(rec.invariant_violations == 0);
  CHECK(rec.tau_nu == 0);
  CHECK(rec.final_edges == 0);
  CHECK(rec.isolated_final == 9);
  CHECK(rec.tau_iso == -1);  // the count never moves off n
  CHECK(rec.classification == ClassLabel::kGStar);
  CHECK(rec.independence_value == 9);
  CHECK(rec.independence_exact);
  CHECK(std::count(rec.trace.begin(), rec.trace.end(), 1) == 0);
  REQUIRE(rec.charges.has_value());
  CHECK(rec.charges->lemma24_hypothesis);  // vacuous: no matched vertices
}

TEST_CASE("no invariant violations across a parameter grid") {
  for (auto [n, k] : std::vector<std::pair<int, int>>{{13, 3},
                                                      {19, 10},
                                                      {20, 2},
                                                      {20, 9},
                                                      {20, 10},
                                                      {20, 11},
                                                      {30, 5}})
    for (std::uint64_t seed : {1u, 2u}) {
      ProcessOptions opts;
      opts.charges = true;
      TrialRecord rec = run_process(n, k, seed, opts);
      CHECK_MESSAGE(rec.invariant_violations == 0,
                    "n=" << n << " k=" << k << " seed=" << seed);
      CHECK(rec.steps == total_pairs(n));
      CHECK(rec.final_edges <= erdos_gallai_bound(n, k));
    }
}

TEST_CASE("edge mask helpers round trip and canonicalize") {
  std::mt19937_64 rng(31);
  for (int n : {2, 3, 4, 5}) {
    auto bits = total_pairs(n);
    for (int rep = 0; rep < 40; ++rep) {
      std::uint64_t mask = rng() & ((std::uint64_t{1} << bits) - 1);
      Graph g = graph_from_edge_mask(n, mask);
      CHECK(graph_edge_mask(g) == mask);

      std::uint64_t canon = canonical_edge_mask(n, mask);
      CHECK(canon <= mask);
      CHECK(canonical_edge_mask(n, canon) == canon);

      // Relabeling the vertices never changes the canonical form.
      std::vector<Vertex> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Graph h(n);
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.neighbors(u))
          if (u < v) h.add_edge(perm[u], perm[v]);
      CHECK(canonical_edge_mask(n, graph_edge_mask(h)) == canon);
    }
  }
  CHECK_THROWS_AS(graph_from_edge_mask(4, std::uint64_t{1} << 6),
                  std::invalid_argument);
  CHECK_THROWS_AS(canonical_edge_mask(6, 0), std::invalid_argument);
}

TEST_CASE("exhaustive distribution for tiny cases") {
  auto e31 = process_exhaustive(3, 1);
  REQUIRE(e31.size() == 1);
  CHECK(e31[0].canonical_mask == 0);
  CHECK(e31[0].orderings == 6);
  CHECK(e31[0].probability == doctest::Approx(1.0));
  CHECK(e31[0].label == ClassLabel::kGStar);
  CHECK(e31[0].edge_count == 0);

  auto e32 = process_exhaustive(3, 2);
  REQUIRE(e32.size() == 1);
  CHECK(e32[0].canonical_mask == 7);  // the triangle
  CHECK(e32[0].orderings == 6);
  CHECK(e32[0].label == ClassLabel::kGClique);
  CHECK(e32[0].edge_count == 3);
}

TEST_CASE("exhaustive distribution matches an independent count for n=4, k=2") {
  // Reference: simulate all 720 orderings straight from the definition.
  std::vector<VertexPair> pairs;
  for (Vertex u = 0; u < 4; ++u)
    for (Vertex v = u + 1; v < 4; ++v) pairs.push_back({u, v});
  std::vector<int> idx(pairs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::map<std::uint64_t, std::int64_t> ref;
  do {
    std::vector<VertexPair> order;
    for (int i : idx) order.push_back(pairs[i]);
    auto decisions = reference_decisions(4, 2, order);
    Graph g(4);
    for (std::size_t i = 0; i < order.size(); ++i)
      if (decisions[i]) g.add_edge(order[i].u, order[i].v);
    ++ref[canonical_edge_mask(4, graph_edge_mask(g))];
  } while (std::next_permutation(idx.begin(), idx.end()));

  auto out = process_exhaustive(4, 2);
  std::int64_t total = 0;
  double prob = 0.0;
  REQUIRE(out.size() == ref.size());
  for (const auto& o : out) {
    REQUIRE(ref.count(o.canonical_mask) == 1);
    CHECK(o.orderings == ref[o.canonical_mask]);
    CHECK(o.probability == doctest::Approx(o.orderings / 720.0));
    CHECK(o.edge_count == 3);
    CHECK((o.label == ClassLabel::kGStar || o.label == ClassLabel::kGClique));
    total += o.orderings;
    prob += o.probability;
  }
  CHECK(total == 720);
  CHECK(prob == doctest::Approx(1.0));
}

TEST_CASE("monte carlo frequencies track the exact distribution") {
  auto exact = process_exhaustive(4, 2);
  double p_star = 0.0;
  for (const auto& o : exact)
    if (o.label == ClassLabel::kGStar) p_star += o.probability;

  const int trials = 2000;
  int stars = 0;
  for (int i = 0; i < trials; ++i) {
    TrialRecord rec = run_process(4, 2, 1000 + static_cast<std::uint64_t>(i));
    CHECK(rec.invariant_violations == 0);
    if (rec.classification == ClassLabel::kGStar) ++stars;
  }
  double freq = static_cast<double>(stars) / trials;
  double se = std::sqrt(p_star * (1 - p_star) / trials);
  CHECK(std::abs(freq - p_star) < 4 * se);
}

TEST_CASE("step() enforces the offer protocol") {
  ProcessState st(5, 2);
  CHECK(st.step({0, 1}));
  CHECK_THROWS_AS(st.step({0, 1}), ContractViolation);
  CHECK_THROWS_AS(st.step({1, 0}), ContractViolation);
  for (Vertex u = 0; u < 5; ++u)
    for (Vertex v = u + 1; v < 5; ++v)
      if (!(u == 0 && v == 1)) st.step({u, v});
  CHECK(st.done());
  CHECK_THROWS_AS(st.step({0, 1}), ContractViolation);
  CHECK(st.violations() == 0);

  CHECK_THROWS_AS(ProcessState(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_process(1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(
      run_process_with_order(4, 2, 0, std::vector<VertexPair>{{0, 1}}, {}),
      std::invalid_argument);
}

TEST_CASE("trace files round trip") {
  ProcessOptions opts;
  opts.record_trace = true;
  TrialRecord rec = run_process(9, 3, 12345, opts);
  TraceData td;
  td.n = 9;
  td.k = 3;
  td.seed = 12345;
  td.order = random_edge_permutation(9, 12345).order;
  td.accepted = rec.trace;

  std::stringstream buf;
  write_trace(buf, td);
  TraceData back = read_trace(buf, "buf");
  CHECK(back.n == td.n);
  CHECK(back.k == td.k);
  CHECK(back.seed == td.seed);
  CHECK(back.order == td.order);
  CHECK(back.accepted == td.accepted);
}

TEST_CASE("trace parsing rejects malformed input") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_trace(in, "t.txt");
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("t.txt:") != std::string::npos);
      CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
    }
  };
  fails_with("", "missing header");
  fails_with("2 1\n", "header");
  fails_with("1 1 0\n", "vertex count");
  fails_with("2 0 0\n1 0 1 1\n", "k must be");
  fails_with("2 1 0\n", "every pair");
  fails_with("2 1 0\n2 0 1 1\n", "step numbers");
  fails_with("2 1 0\n1 1 0 1\n", "0 <= u < v < n");
  fails_with("2 1 0\n1 0 1 2\n", "0 or 1");
  fails_with("3 1 0\n1 0 1 0\n2 0 1 0\n3 0 2 0\n", "twice");
  fails_with("2 1 0\n1 0 1 1 9\n", "expected");
}
