#include "forge/teacher.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "forge/decidability.hpp"

namespace forge {

int count_satisfying(const GlobalSemantics& gs, const ExprPtr& pred, int state) {
  int n = 0;
  for (int local : gs.states[(size_t)state].locals)
    if (eval_state_pred(*gs.ls, pred, local)) ++n;
  return n;
}

bool violates_line(const GlobalSemantics& gs, const SafetyLine& line, int state) {
  for (const auto& atom : line.atoms)
    if (count_satisfying(gs, atom.predicate, state) < atom.threshold) return false;
  return true;
}

std::optional<ErrorTrace> check_safety(const GlobalSemantics& gs, const SpecSuite& spec) {
  for (size_t qi = 0; qi < gs.states.size(); ++qi) {
    for (const auto& line : spec.safety) {
      if (!violates_line(gs, line, (int)qi)) continue;
      ErrorTrace t;
      t.lineName = line.name;
      t.errorState = (int)qi;
      t.transitions = gs.trace_to((int)qi);
      return t;
    }
  }
  return std::nullopt;
}

std::optional<DeadlockCex> check_deadlock(const GlobalSemantics& gs) {
  for (size_t qi = 0; qi < gs.states.size(); ++qi) {
    if (!gs.outgoing[qi].empty()) continue;
    DeadlockCex d;
    d.deadState = (int)qi;
    d.transitions = gs.trace_to((int)qi);
    d.disabled = gs.disabledAt[qi];
    return d;
  }
  return std::nullopt;
}

namespace {

int event_index(const ProcessSketch& sk, const std::string& name) {
  for (size_t i = 0; i < sk.events.size(); ++i)
    if (sk.events[i].name == name) return (int)i;
  return -1;
}

// Count atoms read the destination state; fired atoms read the transition's
// fired-event set (never satisfied when no transition was taken).
bool eval_prop(const GlobalSemantics& gs, const PropPtr& p, int state,
               const std::vector<FiredEvent>* fired) {
  if (!p) return true;
  switch (p->kind) {
    case PropKind::True: return true;
    case PropKind::Count:
      return count_satisfying(gs, p->atom.predicate, state) >= p->atom.threshold;
    case PropKind::Fired: {
      if (!fired) return false;
      int ev = event_index(gs.ls->sk(), p->event);
      for (const auto& f : *fired)
        if (f.event == ev) return true;
      return false;
    }
    case PropKind::And: return eval_prop(gs, p->lhs, state, fired) && eval_prop(gs, p->rhs, state, fired);
    case PropKind::Or: return eval_prop(gs, p->lhs, state, fired) || eval_prop(gs, p->rhs, state, fired);
    case PropKind::Not: return !eval_prop(gs, p->sub, state, fired);
  }
  return false;
}

PropPtr prop_not(PropPtr p) {
  auto n = std::make_shared<Prop>();
  n->kind = PropKind::Not;
  n->sub = std::move(p);
  return n;
}

PropPtr prop_and(PropPtr a, PropPtr b) {
  auto n = std::make_shared<Prop>();
  n->kind = PropKind::And;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

}  // namespace

BuchiAutomaton ltl_to_buchi(const LivenessLine& line) {
  BuchiAutomaton b;
  b.states = 2;
  b.initial = 0;
  b.accepting = {false, true};
  if (line.tmpl == LivenessTemplate::Eventually) {
    // negation of F p: p never holds
    PropPtr notP = prop_not(line.p);
    b.transitions.push_back({0, 1, notP});
    b.transitions.push_back({1, 1, notP});
    b.satisfiedAtInit = line.p;
    b.initPred = notP;
    b.preTriggeredState = 1;
  } else {
    // negation of G (p => F q): p holds at some point, q never after
    PropPtr notQ = prop_not(line.q);
    PropPtr trigger = prop_and(line.p, notQ);
    b.transitions.push_back({0, 0, nullptr});
    b.transitions.push_back({0, 1, trigger});
    b.transitions.push_back({1, 1, notQ});
    b.initPred = trigger;
    b.preTriggeredState = 1;
  }
  return b;
}

namespace {

struct Product {
  const GlobalSemantics& gs;
  const BuchiAutomaton& b;
  std::map<std::pair<int, int>, int> index;  // (q, b) -> product id
  std::vector<std::pair<int, int>> states;
  struct Edge {
    int src, dst, global;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> out;  // product state -> edge ids
  std::vector<int> seeds;

  Product(const GlobalSemantics& g, const BuchiAutomaton& a) : gs(g), b(a) {
    std::deque<int> frontier;
    auto intern = [&](int q, int bs) {
      auto it = index.find({q, bs});
      if (it != index.end()) return it->second;
      int id = (int)states.size();
      index.emplace(std::make_pair(q, bs), id);
      states.emplace_back(q, bs);
      out.emplace_back();
      frontier.push_back(id);
      return id;
    };
    seeds.push_back(intern(0, b.initial));
    if (b.preTriggeredState >= 0 && eval_prop(gs, b.initPred, 0, nullptr))
      seeds.push_back(intern(0, b.preTriggeredState));
    while (!frontier.empty()) {
      int pid = frontier.front();
      frontier.pop_front();
      auto [q, bs] = states[(size_t)pid];
      for (int gid : gs.outgoing[(size_t)q]) {
        const auto& gt = gs.transitions[(size_t)gid];
        for (const auto& bt : b.transitions) {
          if (bt.src != bs) continue;
          if (!eval_prop(gs, bt.pred, gt.dst, &gt.fired)) continue;
          int dst = intern(gt.dst, bt.dst);
          int eid = (int)edges.size();
          edges.push_back({pid, dst, gid});
          out[(size_t)pid].push_back(eid);
        }
      }
    }
  }
};

// Tarjan's SCC, iterative.
std::vector<std::vector<int>> sccs_of(size_t n, const std::vector<std::vector<int>>& out,
                                      const std::vector<Product::Edge>& edges,
                                      const std::set<int>* restrict) {
  std::vector<int> idx(n, -1), low(n, 0), onstk(n, 0);
  std::vector<int> stk;
  std::vector<std::vector<int>> result;
  int counter = 0;
  struct Frame {
    int v;
    size_t ei;
  };
  for (size_t root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    if (restrict && !restrict->count((int)root)) continue;
    std::vector<Frame> call{{(int)root, 0}};
    idx[root] = low[root] = counter++;
    stk.push_back((int)root);
    onstk[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.ei < out[(size_t)f.v].size()) {
        int eid = out[(size_t)f.v][f.ei++];
        int w = edges[(size_t)eid].dst;
        if (restrict && !restrict->count(w)) continue;
        if (idx[(size_t)w] == -1) {
          idx[(size_t)w] = low[(size_t)w] = counter++;
          stk.push_back(w);
          onstk[(size_t)w] = 1;
          call.push_back({w, 0});
        } else if (onstk[(size_t)w]) {
          low[(size_t)f.v] = std::min(low[(size_t)f.v], idx[(size_t)w]);
        }
      } else {
        int v = f.v;
        call.pop_back();
        if (!call.empty())
          low[(size_t)call.back().v] = std::min(low[(size_t)call.back().v], low[(size_t)v]);
        if (low[(size_t)v] == idx[(size_t)v]) {
          std::vector<int> comp;
          for (;;) {
            int w = stk.back();
            stk.pop_back();
            onstk[(size_t)w] = 0;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          result.push_back(std::move(comp));
        }
      }
    }
  }
  std::sort(result.begin(), result.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
  return result;
}

// Shortest edge path within `allowed` from `from` to a state satisfying
// `goal`; returns edge ids.
std::optional<std::vector<int>> bfs_within(const Product& pr, const std::set<int>& allowed, int from,
                                           const std::function<bool(int)>& goal, bool allowEmpty) {
  if (allowEmpty && goal(from)) return std::vector<int>{};
  std::map<int, int> via;
  std::deque<int> frontier{from};
  std::set<int> seen{from};
  auto path_to = [&](int s) {
    std::vector<int> path;
    while (s != from) {
      path.push_back(via[s]);
      s = pr.edges[(size_t)via[s]].src;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    for (int eid : pr.out[(size_t)cur]) {
      int dst = pr.edges[(size_t)eid].dst;
      if (!allowed.count(dst)) continue;
      if (goal(dst)) {
        auto path = path_to(cur);
        path.push_back(eid);
        return path;
      }
      if (seen.count(dst)) continue;
      seen.insert(dst);
      via[dst] = eid;
      frontier.push_back(dst);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Lasso> find_fair_accepting_lasso(const GlobalSemantics& gs, const BuchiAutomaton& b,
                                               const std::string& lineName) {
  Product pr(gs, b);

  std::deque<std::set<int>> work;
  for (auto& comp : sccs_of(pr.states.size(), pr.out, pr.edges, nullptr))
    work.emplace_back(comp.begin(), comp.end());

  while (!work.empty()) {
    std::set<int> S = std::move(work.front());
    work.pop_front();
    // nontrivial and accepting?
    bool accepting = false;
    for (int pid : S)
      if (b.accepting[(size_t)pr.states[(size_t)pid].second]) {
        accepting = true;
        break;
      }
    bool hasEdge = false;
    for (int pid : S) {
      for (int eid : pr.out[(size_t)pid])
        if (S.count(pr.edges[(size_t)eid].dst)) {
          hasEdge = true;
          break;
        }
      if (hasEdge) break;
    }
    if (!accepting || !hasEdge) continue;

    // fairness refinement: every event ready at an SCC state must be
    // takeable inside the SCC
    std::set<long long> ready, taken;
    for (int pid : S) {
      int q = pr.states[(size_t)pid].first;
      for (int gid : gs.outgoing[(size_t)q]) ready.insert(gs.transitions[(size_t)gid].fairness_key());
      for (int eid : pr.out[(size_t)pid])
        if (S.count(pr.edges[(size_t)eid].dst))
          taken.insert(gs.transitions[(size_t)pr.edges[(size_t)eid].global].fairness_key());
    }
    std::set<long long> bad;
    for (long long k : ready)
      if (!taken.count(k)) bad.insert(k);

    if (!bad.empty()) {
      std::set<int> keep;
      for (int pid : S) {
        int q = pr.states[(size_t)pid].first;
        bool drop = false;
        for (int gid : gs.outgoing[(size_t)q])
          if (bad.count(gs.transitions[(size_t)gid].fairness_key())) {
            drop = true;
            break;
          }
        if (!drop) keep.insert(pid);
      }
      if (keep.empty()) continue;
      for (auto& comp : sccs_of(pr.states.size(), pr.out, pr.edges, &keep))
        work.emplace_back(comp.begin(), comp.end());
      continue;
    }

    // construct a fair accepting cycle: cover every ready event, start and
    // end at an accepting state
    int head = -1;
    for (int pid : S)
      if (b.accepting[(size_t)pr.states[(size_t)pid].second]) {
        head = pid;
        break;
      }
    std::vector<int> cycleEdges;
    int cur = head;
    bool feasible = true;
    for (long long k : ready) {
      // reach the source of an in-S edge labeled k, then take it
      auto leg = bfs_within(pr, S, cur, [&](int pid) {
        for (int eid : pr.out[(size_t)pid])
          if (S.count(pr.edges[(size_t)eid].dst) &&
              gs.transitions[(size_t)pr.edges[(size_t)eid].global].fairness_key() == k)
            return true;
        return false;
      }, true);
      if (!leg) {
        feasible = false;
        break;
      }
      for (int eid : *leg) cycleEdges.push_back(eid);
      cur = leg->empty() ? cur : pr.edges[(size_t)leg->back()].dst;
      for (int eid : pr.out[(size_t)cur]) {
        if (S.count(pr.edges[(size_t)eid].dst) &&
            gs.transitions[(size_t)pr.edges[(size_t)eid].global].fairness_key() == k) {
          cycleEdges.push_back(eid);
          cur = pr.edges[(size_t)eid].dst;
          break;
        }
      }
    }
    if (!feasible) continue;
    // close the cycle back to head (ready is nonempty whenever the SCC has
    // an edge, so the cycle has at least one transition already)
    auto back = bfs_within(pr, S, cur, [&](int pid) { return pid == head; }, !cycleEdges.empty());
    if (!back) continue;
    for (int eid : *back) cycleEdges.push_back(eid);
    if (cycleEdges.empty()) continue;

    // stem: shortest product path from a seed to head
    std::set<int> all;
    for (size_t i = 0; i < pr.states.size(); ++i) all.insert((int)i);
    std::optional<std::vector<int>> stem;
    for (int seed : pr.seeds) {
      auto s = bfs_within(pr, all, seed, [&](int pid) { return pid == head; }, true);
      if (s && (!stem || s->size() < stem->size())) stem = s;
    }
    if (!stem) continue;

    Lasso lasso;
    lasso.lineName = lineName;
    for (int eid : *stem) lasso.stem.push_back(pr.edges[(size_t)eid].global);
    std::set<int> cycleStates;
    for (int eid : cycleEdges) {
      lasso.cycle.push_back(pr.edges[(size_t)eid].global);
      cycleStates.insert(pr.states[(size_t)pr.edges[(size_t)eid].src].first);
    }
    std::set<int> seen;
    for (int q : cycleStates) {
      if (!seen.insert(q).second) continue;
      for (const auto& d : gs.disabledAt[(size_t)q]) lasso.cycleDisabled.push_back(d);
    }
    return lasso;
  }
  return std::nullopt;
}

std::optional<Lasso> check_liveness(const GlobalSemantics& gs, const LivenessLine& line) {
  BuchiAutomaton b = ltl_to_buchi(line);
  if (b.satisfiedAtInit && eval_prop(gs, b.satisfiedAtInit, 0, nullptr)) return std::nullopt;
  return find_fair_accepting_lasso(gs, b, line.name);
}

}  // namespace forge
