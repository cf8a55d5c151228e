#include "kmf/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace kmf {

VertexPair make_pair_sorted(Vertex a, Vertex b) {
  if (a == b) throw ContractViolation("self-loop pair");
  return a < b ? VertexPair{a, b} : VertexPair{b, a};
}

std::int64_t pair_index(int n, Vertex u, Vertex v) {
  if (u > v) std::swap(u, v);
  if (u < 0 || v >= n || u == v) throw ContractViolation("pair out of range");
  std::int64_t uu = u;
  return uu * n - uu * (uu + 1) / 2 + (v - u - 1);
}

std::int64_t total_pairs(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

Graph::Graph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  adj_.resize(n_);
  bits_.assign(static_cast<std::size_t>((total_pairs(n_) + 63) / 64), 0);
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  check(u);
  check(v);
  if (u == v) return false;
  std::int64_t i = pair_index(n_, u, v);
  return (bits_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u;
}

void Graph::add_edge(Vertex u, Vertex v) {
  check(u);
  check(v);
  if (u == v) throw ContractViolation("self-loop rejected");
  if (has_edge(u, v)) throw ContractViolation("duplicate edge rejected");
  std::int64_t i = pair_index(n_, u, v);
  bits_[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63);
  adj_[u].push_back(v);
  adj_[v].push_back(u);
  ++m_;
}

std::vector<Vertex> Graph::isolated_vertices() const {
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n_; ++v)
    if (adj_[v].empty()) out.push_back(v);
  return out;
}

int Graph::isolated_count() const {
  int c = 0;
  for (Vertex v = 0; v < n_; ++v)
    if (adj_[v].empty()) ++c;
  return c;
}

std::vector<std::vector<Vertex>> Graph::connected_components() const {
  std::vector<std::vector<Vertex>> comps;
  std::vector<char> seen(n_, 0);
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n_; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    stack.assign(1, s);
    std::vector<Vertex> comp;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (Vertex w : adj_[v])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

Susceptibility susceptibility(const Graph& g) {
  Susceptibility out;
  for (const auto& comp : g.connected_components()) {
    auto sz = static_cast<std::int64_t>(comp.size());
    out.s += sz * sz;
    if (sz > 1) out.s_tilde += sz * sz;
  }
  return out;
}

namespace {

// Unbiased bounded sample; plain modulo rejection keeps the stream stable
// across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t threshold = (~bound + 1) % bound;  // = 2^64 mod bound
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

EdgePermutation random_edge_permutation(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("permutation needs n >= 2");
  if (n > kMaxPermutationVertices)
    throw std::invalid_argument(
        "permutation materializes all n*(n-1)/2 pairs; refusing n > " +
        std::to_string(kMaxPermutationVertices));
  EdgePermutation perm;
  perm.n = n;
  perm.seed = seed;
  perm.order.reserve(static_cast<std::size_t>(total_pairs(n)));
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) perm.order.push_back({u, v});
  std::mt19937_64 rng(seed);
  for (std::size_t i = perm.order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(perm.order[i - 1], perm.order[j]);
  }
  return perm;
}

namespace {

[[noreturn]] void bad_input(const std::string& origin, int line,
                            const std::string& msg) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

Graph read_edge_list(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) bad_input(origin, 1, "missing header line");
  std::istringstream head(line);
  std::int64_t n = 0, m = 0;
  if (!(head >> n >> m) || n < 1 || m < 0)
    bad_input(origin, 1, "header must be \"n m\"");
  std::string junk;
  if (head >> junk) bad_input(origin, 1, "trailing tokens after header");
  if (n > 1000000) bad_input(origin, 1, "vertex count too large");
  Graph g(static_cast<int>(n));
  for (std::int64_t i = 0; i < m; ++i) {
    int lineno = static_cast<int>(i) + 2;
    if (!std::getline(in, line)) bad_input(origin, lineno, "missing edge line");
    std::istringstream row(line);
    std::int64_t u = 0, v = 0;
    if (!(row >> u >> v)) bad_input(origin, lineno, "edge line must be \"u v\"");
    if (row >> junk) bad_input(origin, lineno, "trailing tokens after edge");
    if (u < 0 || v < 0 || u >= n || v >= n)
      bad_input(origin, lineno, "vertex out of range");
    if (u >= v) bad_input(origin, lineno, "edges must satisfy u < v");
    if (g.has_edge(static_cast<Vertex>(u), static_cast<Vertex>(v)))
      bad_input(origin, lineno, "duplicate edge");
    g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return g;
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return read_edge_list(in, path);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    std::vector<Vertex> nbrs = g.neighbors(u);
    std::sort(nbrs.begin(), nbrs.end());
    for (Vertex v : nbrs)
      if (u < v) out << u << ' ' << v << '\n';
  }
}

void write_edge_list_file(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_edge_list(g, out);
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace kmf
