#include "kmf/charge_tracker.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "kmf/errors.hpp"

namespace kmf {

namespace {

constexpr std::int64_t kNeverTime = std::numeric_limits<std::int64_t>::max();

std::int64_t exported_time(std::int64_t t) { return t == kNeverTime ? -1 : t; }

// Sort members of each part, drop empties, order parts by smallest member.
std::vector<std::vector<Vertex>> normalize(
    std::vector<std::vector<Vertex>> parts) {
  std::vector<std::vector<Vertex>> out;
  for (std::vector<Vertex>& part : parts) {
    if (part.empty()) continue;
    std::sort(part.begin(), part.end());
    out.push_back(std::move(part));
  }
  std::sort(out.begin(), out.end(),
            [](const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
              return a.front() < b.front();
            });
  return out;
}

// Every part of fine must lie inside a single part of the coarse labeling.
bool refines(const std::vector<std::vector<Vertex>>& fine,
             const std::vector<int>& coarse_label) {
  for (const std::vector<Vertex>& part : fine)
    for (std::size_t i = 1; i < part.size(); ++i)
      if (coarse_label[part[i]] != coarse_label[part[0]]) return false;
  return true;
}

}  // namespace

bool coupled_step(Graph& gprime, std::vector<char>& seen_b_edge,
                  const std::vector<char>& in_a, VertexPair e) {
  if (static_cast<int>(in_a.size()) != gprime.vertex_count() ||
      seen_b_edge.size() != in_a.size())
    throw ContractViolation("coupled_step: flag vectors must match the graph");
  VertexPair p = make_pair_sorted(e.u, e.v);
  if (in_a[p.u] && in_a[p.v]) {
    if (seen_b_edge[p.u] && seen_b_edge[p.v]) return false;
    if (gprime.has_edge(p.u, p.v)) return false;
    gprime.add_edge(p.u, p.v);
    return true;
  }
  if (in_a[p.u]) seen_b_edge[p.u] = 1;
  if (in_a[p.v]) seen_b_edge[p.v] = 1;
  return false;
}

ChargeTracker::ChargeTracker(const Graph& g_tau, const std::vector<int>& mate,
                             const std::vector<VertexPair>& offer_order,
                             std::int64_t tau)
    : n_(g_tau.vertex_count()),
      tau_(tau),
      pairs_total_(total_pairs(g_tau.vertex_count())),
      last_t_(tau),
      mate_(mate),
      in_a_(g_tau.vertex_count(), 0),
      charge_(g_tau.vertex_count(), 0),
      root_(g_tau.vertex_count(), -1),
      anchor_(g_tau.vertex_count(), -1),
      tau_f_(g_tau.vertex_count(), kNeverTime),
      tau_b_(g_tau.vertex_count(), kNeverTime),
      tau_c_(g_tau.vertex_count(), kNeverTime),
      offer_idx_(static_cast<std::size_t>(total_pairs(g_tau.vertex_count())),
                 -1),
      comp_id_(g_tau.vertex_count(), -1),
      dbar_(g_tau.vertex_count()),
      snapshot_part_(g_tau.vertex_count(), -1),
      gprime_(g_tau.vertex_count()),
      seen_b_edge_(g_tau.vertex_count(), 0) {
  if (static_cast<int>(mate_.size()) != n_)
    throw ContractViolation("ChargeTracker: mate table size mismatch");
  if (tau_ < 0 || tau_ > pairs_total_)
    throw ContractViolation("ChargeTracker: freeze time out of range");
  if (static_cast<std::int64_t>(offer_order.size()) < tau_)
    throw ContractViolation("ChargeTracker: offer order shorter than tau");
  if (g_tau.edge_count() != tau_)
    throw ContractViolation(
        "ChargeTracker: graph does not have one edge per step up to tau");

  for (Vertex v = 0; v < n_; ++v) {
    int m = mate_[v];
    if (m < -1 || m >= n_ || (m >= 0 && (mate_[m] != v || m == v)))
      throw ContractViolation("ChargeTracker: malformed matching");
    if (m >= 0 && !g_tau.has_edge(v, m))
      throw ContractViolation("ChargeTracker: matching edge missing");
    in_a_[v] = m >= 0 ? 1 : 0;
  }

  for (std::int64_t t = 1; t <= tau_; ++t) {
    VertexPair p = make_pair_sorted(offer_order[static_cast<std::size_t>(t - 1)].u,
                                    offer_order[static_cast<std::size_t>(t - 1)].v);
    if (!g_tau.has_edge(p.u, p.v))
      throw ContractViolation("ChargeTracker: offer order disagrees with graph");
    offer_idx_[static_cast<std::size_t>(pair_index(n_, p.u, p.v))] =
        static_cast<std::int32_t>(t);
  }

  // Unmatched vertices are born negative, rooted at themselves, and start
  // the propagation over the frozen graph.
  for (Vertex v = 0; v < n_; ++v) {
    if (in_a_[v]) continue;
    charge_[v] = -1;
    root_[v] = v;
    tau_c_[v] = tau_;
  }
  for (Vertex v = 0; v < n_; ++v)
    if (!in_a_[v]) push_candidates(v, g_tau);
  drain(g_tau, tau_);

  // Components of the uncharged subgraph.
  std::vector<Vertex> stack;
  for (Vertex v = 0; v < n_; ++v) {
    if (charge_[v] != 0 || comp_id_[v] >= 0) continue;
    int c = static_cast<int>(comp_members_.size());
    comp_members_.emplace_back();
    comp_id_[v] = c;
    stack.assign(1, v);
    while (!stack.empty()) {
      Vertex w = stack.back();
      stack.pop_back();
      comp_members_[c].push_back(w);
      for (Vertex x : g_tau.neighbors(w))
        if (charge_[x] == 0 && comp_id_[x] < 0) {
          comp_id_[x] = c;
          stack.push_back(x);
        }
    }
  }
  comps_ready_ = true;

  for (Vertex v = 0; v < n_; ++v) dbar_[v] = v;
  for (const std::vector<Vertex>& members : comp_members_)
    for (Vertex v : members)
      if (dbar_find(v) != dbar_find(members[0]))
        dbar_[dbar_find(v)] = dbar_find(members[0]);

  // Freeze-time generalized parts, and their cliques in the coupled graph.
  std::vector<std::vector<Vertex>> parts;
  {
    std::map<Vertex, std::vector<Vertex>> by_root;
    for (Vertex v = 0; v < n_; ++v)
      if (in_a_[v] && charge_[v] != 0) by_root[root_[v]].push_back(v);
    for (auto& [r, members] : by_root) parts.push_back(std::move(members));
    for (const std::vector<Vertex>& members : comp_members_)
      if (!members.empty()) parts.push_back(members);
  }
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (Vertex v : parts[i]) snapshot_part_[v] = static_cast<int>(i);
  for (const std::vector<Vertex>& part : parts)
    for (std::size_t i = 0; i < part.size(); ++i)
      for (std::size_t j = i + 1; j < part.size(); ++j)
        gprime_.add_edge(part[i], part[j]);
}

int ChargeTracker::dbar_find(int v) const {
  while (dbar_[v] != v) v = dbar_[v];
  return v;
}

void ChargeTracker::push_candidates(Vertex negative, const Graph& g) {
  for (Vertex w : g.neighbors(negative)) {
    if (!in_a_[w] || charge_[w] != 0) continue;
    std::int32_t idx =
        offer_idx_[static_cast<std::size_t>(pair_index(n_, negative, w))];
    if (idx < 1)
      throw ContractViolation("internal: accepted edge has no offer index");
    queue_.push(Candidate{idx, negative, w});
  }
}

void ChargeTracker::charge_pair(Vertex charger, Vertex a, std::int64_t when,
                                const Graph& g) {
  Vertex m = mate_[a];
  if (charge_[charger] != -1 || m < 0 || charge_[a] != 0 || charge_[m] != 0)
    throw ContractViolation("internal: invalid charge event");
  charge_[a] = 1;
  charge_[m] = -1;
  root_[a] = root_[m] = root_[charger];
  anchor_[a] = anchor_[m] = in_a_[charger] ? anchor_[charger] : a;
  tau_c_[a] = tau_c_[m] = when;
  tree_log_.emplace_back(root_[charger], charger, a);
  if (comps_ready_) {
    int c = comp_id_[a];
    if (c < 0 || c != comp_id_[m])
      throw ContractViolation("internal: matched pair outside one component");
    rebuild_component(c, g);
  }
  push_candidates(m, g);
}

void ChargeTracker::drain(const Graph& g, std::int64_t when) {
  while (!queue_.empty()) {
    auto [idx, charger, target] = queue_.top();
    queue_.pop();
    if (charge_[target] != 0) continue;  // already claimed by an earlier offer
    charge_pair(charger, target, when, g);
  }
}

void ChargeTracker::rebuild_component(int comp, const Graph& g) {
  std::vector<Vertex> old = std::move(comp_members_[comp]);
  comp_members_[comp].clear();
  for (Vertex v : old) comp_id_[v] = charge_[v] == 0 ? -2 : -1;
  std::vector<Vertex> stack;
  for (Vertex v : old) {
    if (comp_id_[v] != -2) continue;
    int c = static_cast<int>(comp_members_.size());
    comp_members_.emplace_back();
    comp_id_[v] = c;
    stack.assign(1, v);
    while (!stack.empty()) {
      Vertex w = stack.back();
      stack.pop_back();
      comp_members_[c].push_back(w);
      for (Vertex x : g.neighbors(w))
        if (comp_id_[x] == -2) {
          comp_id_[x] = c;
          stack.push_back(x);
        }
    }
  }
}

void ChargeTracker::merge_components(Vertex u, Vertex v) {
  int cu = comp_id_[u], cv = comp_id_[v];
  if (cu < 0 || cv < 0)
    throw ContractViolation("internal: merge of charged vertices");
  if (cu == cv) return;
  if (comp_members_[cu].size() < comp_members_[cv].size()) std::swap(cu, cv);
  for (Vertex w : comp_members_[cv]) {
    comp_id_[w] = cu;
    comp_members_[cu].push_back(w);
  }
  comp_members_[cv].clear();
}

void ChargeTracker::on_offer(std::int64_t t, VertexPair e, bool accepted,
                             const Graph& g) {
  if (g.vertex_count() != n_)
    throw ContractViolation("on_offer: graph size mismatch");
  if (t <= last_t_ || t > pairs_total_)
    throw ContractViolation("on_offer: steps must arrive in order after tau");
  last_t_ = t;
  VertexPair p = make_pair_sorted(e.u, e.v);
  Vertex u = p.u, v = p.v;

  // Hitting-time triggers, judged on the state before this offer. One
  // exception: when a B-offer lands on an uncharged vertex it is the offer
  // that assigns the vertex its root, so whether it counts as an offer to
  // B minus the root can only be settled after charges propagate.
  Vertex pending_a = -1, pending_other = -1;
  auto consider = [&](Vertex a, Vertex other) {
    if (!in_a_[a]) return;
    bool charged = charge_[a] != 0;
    if (tau_b_[a] == kNeverTime && !in_a_[other]) {
      if (!charged) {
        pending_a = a;
        pending_other = other;
      } else if (root_[a] != other) {
        tau_b_[a] = t;
      }
    }
    if (tau_f_[a] == kNeverTime) {
      bool hit;
      if (charged)
        hit = (in_a_[other] && charge_[other] != 0 &&
               root_[other] == root_[a]) ||
              other == root_[a];
      else
        hit = in_a_[other] && charge_[other] == 0 &&
              comp_id_[other] == comp_id_[a];
      if (hit) tau_f_[a] = t;
    }
  };
  consider(u, v);
  consider(v, u);

  coupled_step(gprime_, seen_b_edge_, in_a_, p);

  auto settle_pending = [&] {
    if (pending_a >= 0 && root_[pending_a] != pending_other)
      tau_b_[pending_a] = t;
  };
  if (!accepted) {
    settle_pending();
    return;
  }

  if (charge_[u] == -1 && charge_[v] == -1 && root_[u] != root_[v])
    ++neg_neg_cross_;
  offer_idx_[static_cast<std::size_t>(pair_index(n_, u, v))] =
      static_cast<std::int32_t>(t);

  bool u_uncharged = in_a_[u] && charge_[u] == 0;
  bool v_uncharged = in_a_[v] && charge_[v] == 0;
  if (u_uncharged && v_uncharged) merge_components(u, v);
  if (charge_[u] == -1 && v_uncharged) queue_.push(Candidate{t, u, v});
  if (charge_[v] == -1 && u_uncharged) queue_.push(Candidate{t, v, u});
  drain(g, t);
  settle_pending();

  // The union partition only joins pairs still uncharged once charges settle.
  if (charge_[u] == 0 && charge_[v] == 0) {
    int ru = dbar_find(u), rv = dbar_find(v);
    if (ru != rv) dbar_[ru] = rv;
  }
}

std::int64_t ChargeTracker::tau_f(Vertex v) const {
  return exported_time(tau_f_[v]);
}
std::int64_t ChargeTracker::tau_b(Vertex v) const {
  return exported_time(tau_b_[v]);
}
std::int64_t ChargeTracker::tau_c(Vertex v) const {
  return exported_time(tau_c_[v]);
}

ComponentView ChargeTracker::component_view() const {
  ComponentView view;
  std::map<Vertex, std::vector<Vertex>> by_root, by_anchor;
  for (Vertex v = 0; v < n_; ++v) {
    if (!in_a_[v] || charge_[v] == 0) continue;
    by_root[root_[v]].push_back(v);
    by_anchor[anchor_[v]].push_back(v);
  }

  std::vector<std::vector<Vertex>> charge_parts, uncharged_parts;
  for (auto& [r, members] : by_root) charge_parts.push_back(members);
  for (const std::vector<Vertex>& members : comp_members_)
    if (!members.empty()) uncharged_parts.push_back(members);

  view.charge_parts = normalize(charge_parts);
  view.uncharged_parts = normalize(uncharged_parts);
  std::vector<std::vector<Vertex>> generalized = charge_parts;
  generalized.insert(generalized.end(), uncharged_parts.begin(),
                     uncharged_parts.end());
  view.generalized_parts = normalize(generalized);

  std::vector<std::vector<Vertex>> chains;
  for (auto& [a, members] : by_anchor) chains.push_back(members);
  for (Vertex v = 0; v < n_; ++v)
    if (in_a_[v] && charge_[v] == 0) chains.push_back({v});
  view.chain_parts = normalize(chains);

  // Coarsen the chains by the freeze-time parts.
  {
    std::vector<int> parent(static_cast<std::size_t>(n_));
    for (Vertex v = 0; v < n_; ++v) parent[v] = v;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    auto unite = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[a] = b;
    };
    for (const std::vector<Vertex>& part : view.chain_parts)
      for (std::size_t i = 1; i < part.size(); ++i) unite(part[0], part[i]);
    std::map<int, Vertex> first_in_part;
    for (Vertex v = 0; v < n_; ++v) {
      if (!in_a_[v]) continue;
      auto [it, inserted] = first_in_part.emplace(snapshot_part_[v], v);
      if (!inserted) unite(it->second, v);
    }
    std::map<int, std::vector<Vertex>> groups;
    for (Vertex v = 0; v < n_; ++v)
      if (in_a_[v]) groups[find(v)].push_back(v);
    std::vector<std::vector<Vertex>> coarse;
    for (auto& [r, members] : groups) coarse.push_back(std::move(members));
    view.chain_parts_coarse = normalize(coarse);
  }

  {
    std::map<int, std::vector<Vertex>> groups;
    for (Vertex v = 0; v < n_; ++v)
      if (in_a_[v]) groups[dbar_find(v)].push_back(v);
    std::vector<std::vector<Vertex>> parts;
    for (auto& [r, members] : groups) parts.push_back(std::move(members));
    view.union_parts = normalize(parts);
  }

  {
    std::vector<std::vector<Vertex>> parts;
    for (std::vector<Vertex>& comp : gprime_.connected_components()) {
      if (comp.size() == 1 && !in_a_[comp[0]]) continue;
      parts.push_back(std::move(comp));
    }
    view.coupled_parts = normalize(parts);
  }

  return view;
}

ChargeSummary ChargeTracker::summary() const {
  ChargeSummary s;
  s.charge = charge_;
  s.root = root_;
  s.tau_f.resize(static_cast<std::size_t>(n_));
  s.tau_b.resize(static_cast<std::size_t>(n_));
  s.tau_c.resize(static_cast<std::size_t>(n_));
  for (Vertex v = 0; v < n_; ++v) {
    s.tau_f[v] = exported_time(tau_f_[v]);
    s.tau_b[v] = exported_time(tau_b_[v]);
    s.tau_c[v] = exported_time(tau_c_[v]);
  }
  s.neg_neg_cross_root_accepts = neg_neg_cross_;

  s.lemma24_hypothesis = true;
  for (Vertex v = 0; v < n_; ++v) {
    if (!in_a_[v]) continue;
    if (!(tau_f_[v] > tau_b_[mate_[v]])) {
      s.lemma24_hypothesis = false;
      break;
    }
  }

  // Chains never cross charge components.
  {
    std::map<Vertex, Vertex> anchor_root;
    for (Vertex v = 0; v < n_; ++v) {
      if (!in_a_[v] || charge_[v] == 0) continue;
      auto [it, inserted] = anchor_root.emplace(anchor_[v], root_[v]);
      if (!inserted && it->second != root_[v]) {
        s.csub_refines_c = false;
        break;
      }
    }
  }

  ComponentView view = component_view();
  std::vector<int> coupled_label(static_cast<std::size_t>(n_), -1);
  {
    int next = 0;
    for (const std::vector<Vertex>& part : view.coupled_parts) {
      for (Vertex v : part) coupled_label[v] = next;
      ++next;
    }
  }
  s.c_prime_refines_f_prime = refines(view.chain_parts_coarse, coupled_label);
  s.d_bar_refines_f_prime = refines(view.union_parts, coupled_label);

  s.tau_c_gt_tau_b = 0;
  for (Vertex v = 0; v < n_; ++v)
    if (in_a_[v] && tau_c_[v] > tau_b_[v]) ++s.tau_c_gt_tau_b;

  return s;
}

void ChargeTracker::write_charge_dump(std::ostream& out) const {
  for (Vertex v = 0; v < n_; ++v)
    out << v << ' ' << charge_[v] << ' ' << root_[v] << '\n';
}

}  // namespace kmf
