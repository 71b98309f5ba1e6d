#include "forge/phases.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace forge {

bool globally_synchronizing(const ProcessSketch& sk, int event) {
  if (event < 0) return false;
  EventKind k = sk.events[(size_t)event].kind;
  return k == EventKind::Broadcast || k == EventKind::Partition || k == EventKind::Consensus;
}

bool PhaseInfo::is_global_event(const LocalSemantics& ls, int ev) const {
  return globally_synchronizing(ls.sk(), ev);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) {
    for (size_t i = 0; i < n; ++i) parent[i] = (int)i;
  }
  int find(int x) {
    while (parent[(size_t)x] != x) x = parent[(size_t)x] = parent[(size_t)parent[(size_t)x]];
    return x;
  }
  void unite(int a, int b) { parent[(size_t)find(a)] = find(b); }
};

// Shortest internal path (enabled internal transitions) from any state in
// `from` to any state in `to`; empty result means connected by a shared
// state, nullopt means unconnected.
std::optional<std::vector<int>> internal_path(const LocalSemantics& ls, const std::vector<int>& from,
                                              const std::vector<int>& to) {
  std::set<int> target(to.begin(), to.end());
  for (int s : from)
    if (target.count(s)) return std::vector<int>{};
  std::deque<int> frontier;
  std::vector<int> via(ls.states.size(), -1);
  std::vector<bool> seen(ls.states.size(), false);
  for (int s : from) {
    seen[(size_t)s] = true;
    frontier.push_back(s);
  }
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    for (int id : ls.enabledBySrc[(size_t)cur]) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.label.kind != ActionLabel::Internal) continue;
      if (seen[(size_t)t.dst]) continue;
      seen[(size_t)t.dst] = true;
      via[(size_t)t.dst] = id;
      if (target.count(t.dst)) {
        std::vector<int> path;
        int s = t.dst;
        while (via[(size_t)s] >= 0) {
          path.push_back(via[(size_t)s]);
          s = ls.enabled[(size_t)via[(size_t)s]].src;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      frontier.push_back(t.dst);
    }
  }
  return std::nullopt;
}

}  // namespace

PhaseInfo compute_phases(const LocalSemantics& ls) {
  const ProcessSketch& sk = ls.sk();
  PhaseInfo info;
  for (size_t ei = 0; ei < sk.events.size(); ++ei) {
    if (!globally_synchronizing(sk, (int)ei)) continue;
    std::set<int> src, dst;
    for (const auto& t : ls.enabled) {
      if (t.label.event != (int)ei) continue;
      src.insert(t.src);
      dst.insert(t.dst);
    }
    if (!src.empty()) {
      Phase p;
      p.id = (int)info.cores.size();
      p.event = (int)ei;
      p.sourceSide = true;
      p.states.assign(src.begin(), src.end());
      info.cores.push_back(std::move(p));
    }
    if (!dst.empty()) {
      Phase p;
      p.id = (int)info.cores.size();
      p.event = (int)ei;
      p.sourceSide = false;
      p.states.assign(dst.begin(), dst.end());
      info.cores.push_back(std::move(p));
    }
  }

  UnionFind uf(info.cores.size());
  for (size_t a = 0; a < info.cores.size(); ++a) {
    for (size_t b = 0; b < info.cores.size(); ++b) {
      if (a == b) continue;
      auto path = internal_path(ls, info.cores[a].states, info.cores[b].states);
      if (path) {
        info.connections[{(int)a, (int)b}] = *path;
        uf.unite((int)a, (int)b);
      }
    }
  }

  info.mergedOf.assign(info.cores.size(), -1);
  std::map<int, int> rootToMerged;
  for (size_t c = 0; c < info.cores.size(); ++c) {
    int root = uf.find((int)c);
    auto it = rootToMerged.find(root);
    int mi;
    if (it == rootToMerged.end()) {
      mi = (int)info.merged.size();
      rootToMerged.emplace(root, mi);
      Phase m;
      m.id = mi;
      m.core = false;
      info.merged.push_back(std::move(m));
    } else {
      mi = it->second;
    }
    info.mergedOf[c] = mi;
    info.merged[(size_t)mi].members.push_back((int)c);
    for (int s : info.cores[c].states) info.merged[(size_t)mi].states.push_back(s);
  }
  for (auto& m : info.merged) {
    std::sort(m.states.begin(), m.states.end());
    m.states.erase(std::unique(m.states.begin(), m.states.end()), m.states.end());
  }
  info.phaseOfState.assign(ls.states.size(), -1);
  for (size_t mi = 0; mi < info.merged.size(); ++mi)
    for (int s : info.merged[mi].states) info.phaseOfState[(size_t)s] = (int)mi;
  return info;
}

int membership_transition(const LocalSemantics& ls, const Phase& core, int state) {
  for (const auto& t : ls.enabled) {
    if (t.label.event != core.event) continue;
    if (core.sourceSide ? t.src == state : t.dst == state) return t.id;
  }
  return -1;
}

std::optional<PhaseWitness> same_phase_witness(const LocalSemantics& ls, const PhaseInfo& info, int sa,
                                               int sb) {
  // case A: some core phase contains both
  for (const auto& core : info.cores) {
    bool hasA = std::binary_search(core.states.begin(), core.states.end(), sa);
    bool hasB = std::binary_search(core.states.begin(), core.states.end(), sb);
    if (hasA && hasB) {
      PhaseWitness w;
      w.caseA = true;
      int ta = membership_transition(ls, core, sa);
      int tb = membership_transition(ls, core, sb);
      w.transitions.push_back(ta);
      if (tb != ta) w.transitions.push_back(tb);
      return w;
    }
  }
  // case B: chain of cores within one merged phase
  int pa = info.phaseOfState[(size_t)sa];
  int pb = info.phaseOfState[(size_t)sb];
  if (pa < 0 || pa != pb) return std::nullopt;
  // BFS over cores: nodes are core ids holding sa / sb at the ends
  std::vector<int> start, goal;
  for (const auto& core : info.cores) {
    if (std::binary_search(core.states.begin(), core.states.end(), sa)) start.push_back(core.id);
    if (std::binary_search(core.states.begin(), core.states.end(), sb)) goal.push_back(core.id);
  }
  std::set<int> goalSet(goal.begin(), goal.end());
  std::deque<int> frontier(start.begin(), start.end());
  std::vector<int> viaCore(info.cores.size(), -2);  // previous core, -2 unseen, -1 root
  for (int c : start) viaCore[(size_t)c] = -1;
  int reached = -1;
  while (!frontier.empty() && reached < 0) {
    int cur = frontier.front();
    frontier.pop_front();
    if (goalSet.count(cur)) {
      reached = cur;
      break;
    }
    for (const auto& [key, path] : info.connections) {
      int nxt = -1;
      if (key.first == cur)
        nxt = key.second;
      else if (key.second == cur)
        nxt = key.first;
      else
        continue;
      if (viaCore[(size_t)nxt] != -2) continue;
      viaCore[(size_t)nxt] = cur;
      frontier.push_back(nxt);
    }
  }
  if (reached < 0) return std::nullopt;
  PhaseWitness w;
  w.caseA = false;
  std::set<int> trans;
  // memberships of the endpoints
  trans.insert(membership_transition(ls, info.cores[(size_t)reached], sb));
  int cur = reached;
  while (viaCore[(size_t)cur] >= 0) {
    int prev = viaCore[(size_t)cur];
    auto it = info.connections.find({prev, cur});
    bool forward = it != info.connections.end();
    if (!forward) it = info.connections.find({cur, prev});
    const auto& path = it->second;
    for (int tid : path) trans.insert(tid);
    // membership of the connection endpoints in their cores
    if (!path.empty()) {
      int from = ls.enabled[(size_t)path.front()].src;
      int to = ls.enabled[(size_t)path.back()].dst;
      int fromCore = forward ? prev : cur;
      int toCore = forward ? cur : prev;
      trans.insert(membership_transition(ls, info.cores[(size_t)fromCore], from));
      trans.insert(membership_transition(ls, info.cores[(size_t)toCore], to));
    } else {
      // shared state: its membership in both cores
      for (int s : info.cores[(size_t)prev].states) {
        if (std::binary_search(info.cores[(size_t)cur].states.begin(),
                               info.cores[(size_t)cur].states.end(), s)) {
          trans.insert(membership_transition(ls, info.cores[(size_t)prev], s));
          trans.insert(membership_transition(ls, info.cores[(size_t)cur], s));
          break;
        }
      }
    }
    cur = prev;
  }
  trans.insert(membership_transition(ls, info.cores[(size_t)cur], sa));
  w.transitions.assign(trans.begin(), trans.end());
  return w;
}

}  // namespace forge
