#include "kmf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "kmf/errors.hpp"
#include "kmf/matching.hpp"

namespace kmf {

namespace {

std::int64_t choose2(std::int64_t m) { return m >= 2 ? m * (m - 1) / 2 : 0; }

}  // namespace

std::int64_t erdos_gallai_bound(int n, int k) {
  if (n < 1) throw std::invalid_argument("erdos_gallai_bound: n must be >= 1");
  if (k < 1) throw std::invalid_argument("erdos_gallai_bound: k must be >= 1");
  std::int64_t clique = choose2(2LL * k - 1);
  std::int64_t star = choose2(k - 1LL) + (k - 1LL) * (n - k + 1LL);
  return std::min(std::max(clique, star), total_pairs(n));
}

Graph construct_g_star(int n, int k) {
  if (k < 1) throw std::invalid_argument("construct_g_star: k must be >= 1");
  if (k - 1 > n)
    throw std::invalid_argument("construct_g_star: needs k - 1 <= n");
  Graph g(n);
  for (Vertex u = 0; u < k - 1; ++u)
    for (Vertex v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

Graph construct_g_clique(int n, int k) {
  if (k < 1) throw std::invalid_argument("construct_g_clique: k must be >= 1");
  if (2 * k - 1 > n)
    throw std::invalid_argument("construct_g_clique: needs 2k - 1 <= n");
  Graph g(n);
  for (Vertex u = 0; u < 2 * k - 1; ++u)
    for (Vertex v = u + 1; v < 2 * k - 1; ++v) g.add_edge(u, v);
  return g;
}

std::string to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::kGStar:
      return "G_star";
    case ClassLabel::kGClique:
      return "G_clique";
    default:
      return "other";
  }
}

Classification classify_extremal(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("classify_extremal: k must be >= 1");
  int n = g.vertex_count();

  std::vector<Vertex> full;
  for (Vertex v = 0; v < n; ++v)
    if (g.degree(v) == n - 1) full.push_back(v);
  if (static_cast<int>(full.size()) == k - 1) {
    // With |S| = k-1 vertices of degree n-1, the edge count equals
    // C(k-1,2) + (k-1)(n-k+1) exactly when no edge avoids S.
    std::int64_t star_edges = choose2(k - 1LL) + (k - 1LL) * (n - k + 1LL);
    if (g.edge_count() == star_edges) return {ClassLabel::kGStar, full};
  }

  if (2 * k - 1 == 1) {
    if (g.edge_count() == 0) return {ClassLabel::kGClique, {}};
  } else {
    std::vector<Vertex> covered;
    for (Vertex v = 0; v < n; ++v)
      if (g.degree(v) > 0) covered.push_back(v);
    if (static_cast<int>(covered.size()) == 2 * k - 1) {
      bool clique = true;
      for (Vertex v : covered)
        if (g.degree(v) != 2 * k - 2) {
          clique = false;
          break;
        }
      if (clique) return {ClassLabel::kGClique, covered};
    }
  }

  return {ClassLabel::kOther, {}};
}

std::int64_t count_cherries(const Graph& g) {
  std::int64_t total = 0;
  for (Vertex y = 0; y < g.vertex_count(); ++y) {
    std::int64_t leaves = 0;
    for (Vertex x : g.neighbors(y))
      if (g.degree(x) == 1) ++leaves;
    total += choose2(leaves);
  }
  return total;
}

std::int64_t count_isolated_triangles(const Graph& g) {
  std::int64_t total = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) != 2) continue;
    Vertex a = g.neighbors(v)[0];
    Vertex b = g.neighbors(v)[1];
    if (v < a && v < b && g.degree(a) == 2 && g.degree(b) == 2 &&
        g.has_edge(a, b))
      ++total;
  }
  return total;
}

std::int64_t count_isolated_two_paths(const Graph& g) {
  std::int64_t total = 0;
  for (Vertex y = 0; y < g.vertex_count(); ++y) {
    if (g.degree(y) != 2) continue;
    Vertex a = g.neighbors(y)[0];
    Vertex b = g.neighbors(y)[1];
    if (g.degree(a) == 1 && g.degree(b) == 1) ++total;
  }
  return total;
}

std::vector<Vertex> dangerous_vertices(const Graph& g) {
  int n = g.vertex_count();
  // trigger[w]: deg(w) == 2 and some u != w with deg(u) <= 2 is within
  // distance 2 of w.
  std::vector<char> trigger(n, 0);
  for (Vertex w = 0; w < n; ++w) {
    if (g.degree(w) != 2) continue;
    for (Vertex x : g.neighbors(w)) {
      if (g.degree(x) <= 2) {
        trigger[w] = 1;
        break;
      }
      for (Vertex u : g.neighbors(x))
        if (u != w && g.degree(u) <= 2) {
          trigger[w] = 1;
          break;
        }
      if (trigger[w]) break;
    }
  }
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n; ++v) {
    bool dangerous = false;
    for (Vertex w : g.neighbors(v)) {
      if (g.degree(w) == 1 || trigger[w]) {
        dangerous = true;
        break;
      }
    }
    if (dangerous) out.push_back(v);
  }
  return out;
}

bool is_matching_resilient(const Graph& g) {
  int n = g.vertex_count();
  if (n % 2 == 0)
    throw std::invalid_argument(
        "is_matching_resilient: needs an odd vertex count");
  std::vector<char> dangerous(n, 0);
  for (Vertex v : dangerous_vertices(g)) dangerous[v] = 1;
  for (Vertex del = 0; del < n; ++del) {
    if (dangerous[del]) continue;
    std::vector<int> label(n, -1);
    int m = 0;
    for (Vertex v = 0; v < n; ++v)
      if (v != del) label[v] = m++;
    Graph h(m);
    for (Vertex u = 0; u < n; ++u) {
      if (u == del) continue;
      for (Vertex v : g.neighbors(u))
        if (v > u && v != del) h.add_edge(label[u], label[v]);
    }
    if (2 * max_matching(h).size() != m) return false;
  }
  return true;
}

std::int64_t count_degree_n_minus_1(const Graph& g) {
  std::int64_t c = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) == g.vertex_count() - 1) ++c;
  return c;
}

std::int64_t count_iso_deg2_pairs(const Graph& g) {
  std::int64_t iso = 0, high = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) == 0) ++iso;
    if (g.degree(v) >= 2) ++high;
  }
  return iso * high;
}

HittingWindow hitting_prediction(int n, int f, double h) {
  if (n < 1) throw std::invalid_argument("hitting_prediction: n must be >= 1");
  if (f < 0) throw std::invalid_argument("hitting_prediction: f must be >= 0");
  if (!(h > 0.0))
    throw std::invalid_argument("hitting_prediction: h must be > 0");
  double centre = std::log(static_cast<double>(n)) - std::log(f + 1.0);
  double half_n = n / 2.0;
  HittingWindow w;
  w.t_minus = static_cast<std::int64_t>(std::floor((centre - h) * half_n));
  w.t_plus = static_cast<std::int64_t>(std::ceil((centre + h) * half_n));
  w.t_minus = std::max<std::int64_t>(w.t_minus, 0);
  w.t_plus = std::min(w.t_plus, total_pairs(n));
  w.t_plus = std::max<std::int64_t>(w.t_plus, 0);
  w.t_minus = std::min(w.t_minus, w.t_plus);
  return w;
}

namespace {

// Maximum independent set search over one connected component.
class MisSolver {
 public:
  MisSolver(const Graph& g, std::uint64_t& budget)
      : g_(g),
        budget_(budget),
        alive_(g.vertex_count(), 1),
        deg_(g.vertex_count()),
        visit_(g.vertex_count(), 0) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      deg_[v] = g.degree(v);
      if (deg_[v] >= 3) ++high_;
    }
    alive_count_ = g.vertex_count();
    best_ = greedy();
  }

  int best() const { return best_; }
  bool exact() const { return exact_; }

  void solve() { branch(0); }

 private:
  int greedy() const {
    std::vector<char> alive(g_.vertex_count(), 1);
    std::vector<int> deg = deg_;
    int picked = 0;
    int remaining = g_.vertex_count();
    while (remaining > 0) {
      Vertex pick = -1;
      for (Vertex v = 0; v < g_.vertex_count(); ++v)
        if (alive[v] && (pick < 0 || deg[v] < deg[pick])) pick = v;
      if (pick < 0) break;  // unreachable; keeps the indexing provably safe
      ++picked;
      alive[pick] = 0;
      --remaining;
      for (Vertex w : g_.neighbors(pick))
        if (alive[w]) {
          alive[w] = 0;
          --remaining;
          for (Vertex x : g_.neighbors(w))
            if (alive[x]) --deg[x];
        }
    }
    return picked;
  }

  void remove(Vertex v, std::vector<Vertex>& undo) {
    alive_[v] = 0;
    --alive_count_;
    if (deg_[v] >= 3) --high_;
    for (Vertex w : g_.neighbors(v))
      if (alive_[w]) {
        if (deg_[w] == 3) --high_;
        --deg_[w];
      }
    undo.push_back(v);
  }

  void restore(std::vector<Vertex>& undo) {
    while (!undo.empty()) {
      Vertex v = undo.back();
      undo.pop_back();
      for (Vertex w : g_.neighbors(v))
        if (alive_[w]) {
          if (deg_[w] == 2) ++high_;
          ++deg_[w];
        }
      alive_[v] = 1;
      ++alive_count_;
      if (deg_[v] >= 3) ++high_;
    }
  }

  // Residual max degree <= 2: disjoint paths and cycles, solved in closed
  // form (path on m vertices: ceil(m/2); cycle: floor(m/2)).
  int paths_and_cycles() {
    ++visit_epoch_;
    int total = 0;
    for (Vertex v = 0; v < g_.vertex_count(); ++v) {
      if (!alive_[v] || visit_[v] == visit_epoch_ || deg_[v] >= 2) continue;
      int len = 0;
      Vertex cur = v, prev = -1;
      while (cur >= 0) {
        visit_[cur] = visit_epoch_;
        ++len;
        Vertex next = -1;
        for (Vertex w : g_.neighbors(cur))
          if (alive_[w] && w != prev && visit_[w] != visit_epoch_) {
            next = w;
            break;
          }
        prev = cur;
        cur = next;
      }
      total += (len + 1) / 2;
    }
    for (Vertex v = 0; v < g_.vertex_count(); ++v) {
      if (!alive_[v] || visit_[v] == visit_epoch_) continue;
      int len = 0;
      Vertex cur = v, prev = -1;
      while (cur >= 0 && visit_[cur] != visit_epoch_) {
        visit_[cur] = visit_epoch_;
        ++len;
        Vertex next = -1;
        for (Vertex w : g_.neighbors(cur))
          if (alive_[w] && w != prev && visit_[w] != visit_epoch_) {
            next = w;
            break;
          }
        prev = cur;
        cur = next;
      }
      total += len / 2;
    }
    return total;
  }

  void branch(int current) {
    if (budget_ == 0) {
      exact_ = false;
      return;
    }
    --budget_;
    if (current + alive_count_ <= best_) return;
    if (high_ == 0) {
      best_ = std::max(best_, current + paths_and_cycles());
      return;
    }
    Vertex pivot = -1;
    for (Vertex v = 0; v < g_.vertex_count(); ++v)
      if (alive_[v] && (pivot < 0 || deg_[v] > deg_[pivot])) pivot = v;
    std::vector<Vertex> undo;
    remove(pivot, undo);
    for (Vertex w : g_.neighbors(pivot))
      if (alive_[w]) remove(w, undo);
    best_ = std::max(best_, current + 1);
    branch(current + 1);
    restore(undo);
    remove(pivot, undo);
    branch(current);
    restore(undo);
  }

  const Graph& g_;
  std::uint64_t& budget_;
  std::vector<char> alive_;
  std::vector<int> deg_;
  std::vector<int> visit_;
  int visit_epoch_ = 0;
  int alive_count_ = 0;
  int high_ = 0;
  int best_ = 0;
  bool exact_ = true;
};

}  // namespace

IndependenceResult independence_number(const Graph& g,
                                       std::uint64_t node_budget) {
  IndependenceResult result;
  std::uint64_t budget = node_budget;
  for (const std::vector<Vertex>& comp : g.connected_components()) {
    if (comp.size() == 1) {
      ++result.value;
      continue;
    }
    std::vector<int> label(g.vertex_count(), -1);
    for (std::size_t i = 0; i < comp.size(); ++i) label[comp[i]] = (int)i;
    Graph h((int)comp.size());
    for (Vertex u : comp)
      for (Vertex v : g.neighbors(u))
        if (v > u) h.add_edge(label[u], label[v]);
    MisSolver solver(h, budget);
    solver.solve();
    result.value += solver.best();
    if (!solver.exact()) result.exact = false;
  }
  return result;
}

}  // namespace kmf
