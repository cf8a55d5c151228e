#include "kmf/augment_oracle.hpp"

#include <cassert>

namespace kmf {

int AugmentOracle::find(int x) const {
  // No path compression: unions must stay journal-reversible.
  while (dsu_up_[x] != x) x = dsu_up_[x];
  return x;
}

void AugmentOracle::set_field(std::int8_t field, int idx, int value) {
  int* slot = nullptr;
  switch (field) {
    case kFldLabel: {
      journal_.push_back({field, idx, label_[idx]});
      label_[idx] = static_cast<std::int8_t>(value);
      return;
    }
    case kFldRoot: slot = &root_[idx]; break;
    case kFldParent: slot = &parent_[idx]; break;
    case kFldDsuUp: slot = &dsu_up_[idx]; break;
    case kFldDsuSz: slot = &dsu_sz_[idx]; break;
    case kFldBase: slot = &base_of_[idx]; break;
  }
  journal_.push_back({field, idx, *slot});
  *slot = value;
}

void AugmentOracle::rollback(std::size_t mark) {
  while (journal_.size() > mark) {
    const JournalEntry& e = journal_.back();
    switch (e.field) {
      case kFldLabel: label_[e.idx] = static_cast<std::int8_t>(e.old); break;
      case kFldRoot: root_[e.idx] = e.old; break;
      case kFldParent: parent_[e.idx] = e.old; break;
      case kFldDsuUp: dsu_up_[e.idx] = e.old; break;
      case kFldDsuSz: dsu_sz_[e.idx] = e.old; break;
      case kFldBase: base_of_[e.idx] = e.old; break;
    }
    journal_.pop_back();
  }
}

void AugmentOracle::unite(int a, int b) {
  int ra = find(a), rb = find(b);
  if (ra == rb) return;
  if (dsu_sz_[ra] < dsu_sz_[rb]) std::swap(ra, rb);
  set_field(kFldDsuUp, rb, ra);
  set_field(kFldDsuSz, ra, dsu_sz_[ra] + dsu_sz_[rb]);
}

bool AugmentOracle::build(const Graph& g, const std::vector<int>& mate) {
  g_ = &g;
  int n = g.vertex_count();
  if (static_cast<int>(mate.size()) != n)
    throw ContractViolation("mate table size mismatch");
  mate_ = mate;
  label_.assign(n, kUnreached);
  root_.assign(n, -1);
  parent_.assign(n, -1);
  dsu_up_.resize(n);
  dsu_sz_.assign(n, 1);
  base_of_.resize(n);
  mark_.assign(n, 0);
  epoch_ = 0;
  journal_.clear();
  work_.clear();
  ready_ = false;
  for (int v = 0; v < n; ++v) {
    dsu_up_[v] = v;
    base_of_[v] = v;
    if (mate_[v] < 0) {
      label_[v] = kEven;
      root_[v] = v;
      work_.push_back(v);
    }
  }
  bool aug = drain(-1, -1);
  journal_.clear();
  if (aug) return false;
  ready_ = true;
  return true;
}

bool AugmentOracle::drain(Vertex pu, Vertex pv) {
  while (!work_.empty()) {
    Vertex w = work_.back();
    work_.pop_back();
    for (Vertex x : g_->neighbors(w))
      if (handle_edge(w, x)) {
        work_.clear();
        return true;
      }
    // The edge being offered is not in the graph yet; promoted endpoints
    // must still look across it.
    if (w == pu && handle_edge(pu, pv)) {
      work_.clear();
      return true;
    }
    if (w == pv && handle_edge(pv, pu)) {
      work_.clear();
      return true;
    }
  }
  return false;
}

bool AugmentOracle::handle_edge(Vertex x, Vertex y) {
  if (label_[y] == kEven) {
    if (find(x) == find(y)) return false;
    if (root_[x] != root_[y]) return true;
    contract(x, y);
    return false;
  }
  if (label_[y] == kOdd) return false;
  // Grow: y is unreached, hence matched (free vertices start Even).
  int z = mate_[y];
  assert(z >= 0 && label_[z] == kUnreached);
  set_field(kFldLabel, y, kOdd);
  set_field(kFldRoot, y, root_[x]);
  set_field(kFldParent, y, x);
  set_field(kFldLabel, z, kEven);
  set_field(kFldRoot, z, root_[x]);
  work_.push_back(z);
  return false;
}

int AugmentOracle::lowest_common_base(int bx, int by) {
  ++epoch_;
  int a = bx, b = by;
  for (int steps = 0; steps <= 4 * g_->vertex_count() + 8; ++steps) {
    if (a != -1) {
      if (mark_[a] == epoch_) return a;
      mark_[a] = epoch_;
      if (root_[a] == a) {
        a = -1;  // tree root reached
      } else {
        int o = mate_[a];  // odd vertex immediately above this base
        a = base(parent_[o]);
      }
    }
    std::swap(a, b);
  }
  throw ContractViolation("internal: base chain does not terminate");
}

void AugmentOracle::contract(Vertex x, Vertex y) {
  int lca = lowest_common_base(base(x), base(y));
  chain_bases_.clear();
  chain_odds_.clear();
  for (Vertex side : {x, y}) {
    int cur = base(side);
    while (cur != lca) {
      int o = mate_[cur];
      assert(label_[o] == kOdd);
      chain_bases_.push_back(cur);
      chain_odds_.push_back(o);
      cur = base(parent_[o]);
    }
  }
  for (int b : chain_bases_) unite(lca, b);
  for (int o : chain_odds_) {
    unite(lca, o);
    set_field(kFldLabel, o, kEven);
    work_.push_back(o);
  }
  int rep = find(lca);
  if (base_of_[rep] != lca) set_field(kFldBase, rep, lca);
}

bool AugmentOracle::cascade(Vertex u, Vertex v) {
  work_.clear();
  if (handle_edge(u, v)) return true;
  return drain(u, v);
}

bool AugmentOracle::probe(Vertex u, Vertex v) {
  if (!ready_) throw ContractViolation("oracle not built");
  if (u == v) throw ContractViolation("self-loop probe");
  if (g_->has_edge(u, v)) throw ContractViolation("probe expects a non-edge");
  // An insertion can only augment when both endpoints are missed by some
  // maximum matching, i.e. labelled Even.
  if (label_[u] != kEven || label_[v] != kEven) return false;
  if (root_[u] != root_[v]) return true;
  if (find(u) == find(v)) return false;
  std::size_t mark = journal_.size();
  bool aug = cascade(u, v);
  rollback(mark);
  return aug;
}

bool AugmentOracle::offer(Vertex u, Vertex v) {
  if (!ready_) throw ContractViolation("oracle not built");
  if (u == v) throw ContractViolation("self-loop offer");
  if (g_->has_edge(u, v)) throw ContractViolation("offer expects a non-edge");
  bool ue = label_[u] == kEven, ve = label_[v] == kEven;
  if (ue && ve) {
    if (root_[u] != root_[v]) return true;
    if (find(u) == find(v)) return false;
    std::size_t mark = journal_.size();
    if (cascade(u, v)) {
      rollback(mark);
      return true;
    }
    commit();
    return false;
  }
  if ((ue && label_[v] == kUnreached) || (ve && label_[u] == kUnreached)) {
    // Pure growth; cannot augment (one endpoint is covered by every maximum
    // matching), but the forest must absorb the new reachability now.
    if (!ue) std::swap(u, v);
    std::size_t mark = journal_.size();
    if (cascade(u, v)) {
      rollback(mark);
      throw ContractViolation("internal: augmenting path from non-Even endpoint");
    }
    commit();
    return false;
  }
  // Even-Odd, Odd-Odd, Odd-Unreached, Unreached-Unreached: dormant. The edge
  // is examined later if one endpoint ever becomes Even.
  return false;
}

}  // namespace kmf
