#include "kmf/matching.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <queue>

#include "kmf/augment_oracle.hpp"

namespace kmf {

Matching::Matching(std::vector<int> mate) : mate_(std::move(mate)) {
  int n = static_cast<int>(mate_.size());
  for (int v = 0; v < n; ++v) {
    int w = mate_[v];
    if (w < 0) continue;
    if (w >= n || w == v || mate_[w] != v)
      throw ContractViolation("mate table is not symmetric");
    if (v < w) ++size_;
  }
}

std::vector<VertexPair> Matching::edges() const {
  std::vector<VertexPair> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (int v = 0; v < vertex_count(); ++v)
    if (mate_[v] > v) out.push_back({v, mate_[v]});
  return out;
}

bool Matching::valid_for(const Graph& g) const {
  if (vertex_count() != g.vertex_count()) return false;
  for (int v = 0; v < vertex_count(); ++v) {
    int w = mate_[v];
    if (w < 0) continue;
    if (w >= vertex_count() || w == v || mate_[w] != v) return false;
    if (!g.has_edge(v, w)) return false;
  }
  return true;
}

namespace {

// Single-root blossom search with path recovery, used for the augmentation
// steps. One completed failed search from a root certifies that root stays
// unmatchable under later augmentations elsewhere, so max_matching makes a
// single pass over the free vertices.
class PathFinder {
 public:
  PathFinder(const Graph& g, std::vector<int>& mate)
      : g_(g), mate_(mate), n_(g.vertex_count()), parent_(n_), base_(n_),
        even_seen_(n_), in_blossom_(n_), lca_seen_(n_) {}

  // Finds an augmenting path from free vertex `root` and flips it.
  bool augment_from(Vertex root) {
    int tail = find_path(root);
    if (tail < 0) return false;
    while (tail != -1) {
      int pv = parent_[tail], next = mate_[pv];
      mate_[tail] = pv;
      mate_[pv] = tail;
      tail = next;
    }
    return true;
  }

 private:
  int lca(int a, int b) {
    std::fill(lca_seen_.begin(), lca_seen_.end(), 0);
    for (;;) {
      a = base_[a];
      lca_seen_[a] = 1;
      if (mate_[a] == -1) break;
      a = parent_[mate_[a]];
    }
    for (;;) {
      b = base_[b];
      if (lca_seen_[b]) return b;
      b = parent_[mate_[b]];
    }
  }

  // Re-threads parent pointers around one side of a new blossom so that the
  // path recovery can walk out of it, and marks the bases it passes.
  void mark_path(int v, int stop_base, int child) {
    while (base_[v] != stop_base) {
      in_blossom_[base_[v]] = 1;
      in_blossom_[base_[mate_[v]]] = 1;
      parent_[v] = child;
      child = mate_[v];
      v = parent_[mate_[v]];
    }
  }

  int find_path(Vertex root) {
    std::fill(even_seen_.begin(), even_seen_.end(), 0);
    std::fill(parent_.begin(), parent_.end(), -1);
    std::iota(base_.begin(), base_.end(), 0);
    even_seen_[root] = 1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int to : g_.neighbors(v)) {
        if (base_[v] == base_[to] || mate_[v] == to) continue;
        bool to_is_even =
            to == root || (mate_[to] != -1 && parent_[mate_[to]] != -1);
        if (to_is_even) {
          int cur = lca(v, to);
          std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
          mark_path(v, cur, to);
          mark_path(to, cur, v);
          for (int i = 0; i < n_; ++i)
            if (in_blossom_[base_[i]]) {
              base_[i] = cur;
              if (!even_seen_[i]) {
                even_seen_[i] = 1;
                q.push(i);
              }
            }
        } else if (parent_[to] == -1) {
          parent_[to] = v;
          if (mate_[to] == -1) return to;  // augmenting path reaches a free vertex
          even_seen_[mate_[to]] = 1;
          q.push(mate_[to]);
        }
      }
    }
    return -1;
  }

  const Graph& g_;
  std::vector<int>& mate_;
  int n_;
  std::vector<int> parent_, base_;
  std::vector<char> even_seen_, in_blossom_, lca_seen_;
};

void greedy_matching(const Graph& g, std::vector<int>& mate) {
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (mate[v] != -1) continue;
    for (Vertex w : g.neighbors(v))
      if (mate[w] == -1) {
        mate[v] = w;
        mate[w] = v;
        break;
      }
  }
}

}  // namespace

Matching max_matching(const Graph& g) {
  std::vector<int> mate(g.vertex_count(), -1);
  greedy_matching(g, mate);
  PathFinder finder(g, mate);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (mate[v] == -1) finder.augment_from(v);
  return Matching(std::move(mate));
}

bool augment_once(const Graph& g, std::vector<int>& mate) {
  PathFinder finder(g, mate);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (mate[v] == -1 && finder.augment_from(v)) return true;
  return false;
}

int nu_brute_force(const Graph& g) {
  int n = g.vertex_count();
  if (n > kMaxBruteForceVertices)
    throw std::invalid_argument("nu_brute_force is exhaustive; refusing n > " +
                                std::to_string(kMaxBruteForceVertices));
  std::vector<unsigned> adj_mask(n, 0);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u)) adj_mask[u] |= 1u << v;
  std::vector<std::int8_t> dp(std::size_t{1} << n, -1);
  dp[0] = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int v = std::countr_zero(mask);
    unsigned rest = mask & (mask - 1);
    std::int8_t best = dp[rest];
    unsigned candidates = adj_mask[v] & rest;
    while (candidates) {
      int w = std::countr_zero(candidates);
      candidates &= candidates - 1;
      best = std::max<std::int8_t>(
          best, static_cast<std::int8_t>(1 + dp[rest & ~(1u << w)]));
    }
    dp[mask] = best;
  }
  return dp[(std::size_t{1} << n) - 1];
}

bool creates_k_matching(const Graph& g, const Matching& m, VertexPair e, int k,
                        bool verify_maximal) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (m.vertex_count() != g.vertex_count())
    throw ContractViolation("matching does not belong to this graph");
  if (e.u == e.v || e.u < 0 || e.v >= g.vertex_count() || e.u > e.v)
    throw ContractViolation("malformed vertex pair");
  if (g.has_edge(e.u, e.v))
    throw ContractViolation("pair is already an edge of the graph");
  if (verify_maximal) {
    AugmentOracle check;
    if (!check.build(g, m.mates()))
      throw ContractViolation("matching is not maximum");
  }
  if (m.size() <= k - 2) return false;
  if (m.size() >= k) return true;
  AugmentOracle oracle;
  if (!oracle.build(g, m.mates()))
    throw ContractViolation("matching is not maximum");
  return oracle.probe(e.u, e.v);
}

bool is_saturated(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  Matching m = max_matching(g);
  if (m.size() >= k)
    throw ContractViolation("graph already contains a k-matching");
  if (g.is_complete()) return true;  // no pair left to add
  if (m.size() < k - 1) return false;
  AugmentOracle oracle;
  if (!oracle.build(g, m.mates()))
    throw ContractViolation("internal: max_matching left an augmenting path");
  int n = g.vertex_count();
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (!g.has_edge(u, v) && !oracle.probe(u, v)) return false;
  return true;
}

}  // namespace kmf
