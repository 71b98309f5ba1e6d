#include "forge/decidability.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <future>
#include <set>
#include <sstream>

namespace forge {

bool independent(const LocalSemantics& ls, const LocalTransition& t, bool strict) {
  if (t.label.kind == ActionLabel::Internal) return true;
  if (strict) return false;
  const EventInfo& ev = ls.sk().events[(size_t)t.label.event];
  return ev.env && t.label.kind == ActionLabel::React;
}

bool eval_state_pred(const LocalSemantics& ls, const ExprPtr& pred, int state) {
  const ProcessSketch& sk = ls.sk();
  const LocalState& s = ls.states[(size_t)state];
  std::function<long long(const ExprPtr&)> ev = [&](const ExprPtr& e) -> long long {
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::BoolLit:
        return e->intValue;
      case ExprKind::LocLit:
        return sk.location_index(e->name);
      case ExprKind::Var: {
        if (e->name == "loc") return s.loc;
        int vi = sk.var_index(e->name);
        if (vi < 0) throw SemanticsError("unknown variable in predicate: " + e->name);
        return s.vals[(size_t)vi];
      }
      case ExprKind::Unary:
        return e->uop == UnOp::Not ? !ev(e->sub) : -ev(e->sub);
      case ExprKind::Binary: {
        if (e->bop == BinOp::And) return ev(e->lhs) && ev(e->rhs);
        if (e->bop == BinOp::Or) return ev(e->lhs) || ev(e->rhs);
        long long a = ev(e->lhs), b = ev(e->rhs);
        switch (e->bop) {
          case BinOp::Eq: return a == b;
          case BinOp::Ne: return a != b;
          case BinOp::Lt: return a < b;
          case BinOp::Le: return a <= b;
          case BinOp::Gt: return a > b;
          case BinOp::Ge: return a >= b;
          case BinOp::Add: return a + b;
          case BinOp::Sub: return a - b;
          default: return 0;
        }
      }
      default:
        throw SemanticsError("unsupported predicate expression");
    }
  };
  return ev(pred) != 0;
}

std::vector<int> satisfying_states(const LocalSemantics& ls, const ExprPtr& pred) {
  std::vector<int> out;
  for (size_t i = 0; i < ls.states.size(); ++i)
    if (eval_state_pred(ls, pred, (int)i)) out.push_back((int)i);
  return out;
}

// Internal-transition closure of a state (including itself).
std::vector<int> internal_closure(const LocalSemantics& ls, int from) {
  std::vector<int> out;
  std::vector<bool> seen(ls.states.size(), false);
  std::deque<int> frontier{from};
  seen[(size_t)from] = true;
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    out.push_back(cur);
    for (int id : ls.enabledBySrc[(size_t)cur]) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.label.kind != ActionLabel::Internal || seen[(size_t)t.dst]) continue;
      seen[(size_t)t.dst] = true;
      frontier.push_back(t.dst);
    }
  }
  return out;
}

namespace {

// exists t ~~>R(f)*: an internal path (possibly empty) from `state` to a
// state with an enabled reacting transition of f.
bool has_reacting_path(const LocalSemantics& ls, int state, int f) {
  for (int u : internal_closure(ls, state))
    if (ls.has_enabled(u, ActionLabel::React, f)) return true;
  return false;
}

}  // namespace

std::vector<PcCube> pc_violations(const LocalSemantics& ls, const PhaseInfo& phases, int condition,
                                  size_t limit) {
  const ProcessSketch& sk = ls.sk();
  std::vector<PcCube> out;
  std::vector<int> globalEvents;
  for (size_t ei = 0; ei < sk.events.size(); ++ei)
    if (globally_synchronizing(sk, (int)ei)) globalEvents.push_back((int)ei);

  if (condition == 1) {
    for (int e : globalEvents) {
      for (const auto& t : ls.enabled) {
        if (t.label.event != e || t.label.kind != ActionLabel::Act) continue;
        if (ls.has_enabled(t.src, ActionLabel::React, e)) continue;
        PcCube cube;
        cube.condition = 1;
        cube.e = e;
        cube.actingTrans = t.id;
        cube.missingAt = t.src;
        out.push_back(cube);
        if (out.size() >= limit) return out;
      }
    }
    return out;
  }

  if (condition == 21 || condition == 22) {
    for (int e : globalEvents) {
      for (int f : globalEvents) {
        // firability witness: z -A/R(e)-> z' with z' -A(f)-> *
        int firableTrans = -1, firableState = -1;
        for (const auto& t : ls.enabled) {
          if (t.label.event != e) continue;
          if (ls.has_enabled(t.dst, ActionLabel::Act, f)) {
            firableTrans = t.id;
            firableState = t.dst;
            break;
          }
        }
        if (firableTrans < 0) continue;
        int anchorId = -1;
        for (const auto& anchor : ls.enabled) {
          if (anchor.label.event != e || anchor.label.kind != ActionLabel::Act) continue;
          if (!ls.has_enabled(anchor.dst, ActionLabel::React, f)) continue;
          anchorId = anchor.id;
          break;
        }
        if (anchorId < 0) continue;
        const auto& anchor = ls.enabled[(size_t)anchorId];
        for (const auto& t : ls.enabled) {
          if (t.label.event != e) continue;
          if (condition == 21) {
            if (t.label.kind != ActionLabel::Act) continue;
            if (ls.has_enabled(t.dst, ActionLabel::React, f)) continue;
          } else {
            if (t.label.kind != ActionLabel::React) continue;
            if (has_reacting_path(ls, t.dst, f)) continue;
          }
          PcCube cube;
          cube.condition = condition;
          cube.e = e;
          cube.f = f;
          cube.actingTrans = anchor.id;
          cube.reactState = anchor.dst;
          cube.firableTrans = firableTrans;
          cube.firableState = firableState;
          cube.tTrans = t.id;
          cube.missingAt = t.dst;
          out.push_back(cube);
          if (out.size() >= limit) return out;
        }
      }
    }
    return out;
  }

  // condition 3
  for (int f : globalEvents) {
    for (const auto& internal : ls.enabled) {
      if (internal.label.kind != ActionLabel::Internal) continue;
      if (!ls.has_enabled(internal.dst, ActionLabel::React, f)) continue;
      int s = internal.src;
      int phase = phases.phaseOfState[(size_t)s];
      if (phase < 0) continue;
      const Phase& X = phases.merged[(size_t)phase];
      int z = -1;
      for (int cand : X.states) {
        if (ls.has_enabled(cand, ActionLabel::Act, f)) {
          z = cand;
          break;
        }
      }
      if (z < 0) continue;  // f not firable in the phase
      for (int t : X.states) {
        if (has_reacting_path(ls, t, f)) continue;
        PcCube cube;
        cube.condition = 3;
        cube.f = f;
        cube.internalTrans = internal.id;
        cube.reactState = internal.dst;
        cube.phase = phase;
        cube.sState = s;
        cube.tState = t;
        cube.zState = z;
        cube.missingAt = t;
        out.push_back(cube);
        if (out.size() >= limit) return out;
      }
    }
  }
  return out;
}

std::string describe_pc_cube(const LocalSemantics& ls, const PcCube& cube) {
  const ProcessSketch& sk = ls.sk();
  std::ostringstream os;
  switch (cube.condition) {
    case 1:
      os << "condition 1: state " << ls.state_name(ls.enabled[(size_t)cube.actingTrans].src) << " acts "
         << sk.events[(size_t)cube.e].name << " but cannot react to it";
      break;
    case 21:
      os << "condition 2(i): acting " << sk.events[(size_t)cube.e].name << " reaches "
         << ls.state_name(cube.missingAt) << " which cannot react to " << sk.events[(size_t)cube.f].name;
      break;
    case 22:
      os << "condition 2(ii): reacting " << sk.events[(size_t)cube.e].name << " reaches "
         << ls.state_name(cube.missingAt) << " with no internal path to a reaction to "
         << sk.events[(size_t)cube.f].name;
      break;
    default:
      os << "condition 3: state " << ls.state_name(cube.tState) << " shares a phase with "
         << ls.state_name(cube.sState) << " but has no internal path to a reaction to "
         << sk.events[(size_t)cube.f].name;
  }
  return os.str();
}

ConditionReport check_phase_compatibility(const LocalSemantics& ls, const PhaseInfo& phases,
                                          const DecidabilityOptions& opts) {
  ConditionReport rep;
  rep.property = PropertyKind::PhaseCompatibility;
  rep.ok = true;
  const int conditions[] = {1, 21, 22, 3};
  std::vector<std::vector<PcCube>> results(4);
  if (opts.jobs > 1) {
    // check the condition cubes in parallel; the merge below stays in
    // condition order, so the reported cube is identical either way
    std::vector<std::future<std::vector<PcCube>>> tasks;
    for (int i = 0; i < 4; ++i)
      tasks.push_back(std::async(std::launch::async, [&, i] {
        return pc_violations(ls, phases, conditions[i], 1);
      }));
    for (int i = 0; i < 4; ++i) results[(size_t)i] = tasks[(size_t)i].get();
  } else {
    for (int i = 0; i < 4; ++i) {
      results[(size_t)i] = pc_violations(ls, phases, conditions[i], 1);
      if (!results[(size_t)i].empty()) break;
    }
  }
  for (const auto& v : results) {
    if (v.empty()) continue;
    rep.ok = false;
    rep.pcCube = v.front();
    rep.description = describe_pc_cube(ls, v.front());
    return rep;
  }
  return rep;
}

namespace {

// Clause (b) of the amenability condition: explores forward from sd.
// Returns true when some path out of sd fails to lead back to ss via
// independent transitions, with evidence: kind 0 = dead end (plus its
// disabled handlers), kind 1 = cycle avoiding ss, kind 2 = non-independent
// edge. escapePath is the shortest transition path from sd to the evidence.
bool find_escape(const LocalSemantics& ls, int sd, int ss, const DecidabilityOptions& opts, int& kind,
                 std::vector<int>& escapePath, std::vector<int>& escapeCycle, int& escapeBad,
                 std::vector<int>& deadDis) {
  std::vector<int> via(ls.states.size(), -1);
  std::vector<bool> seen(ls.states.size(), false);
  std::deque<int> frontier{sd};
  seen[(size_t)sd] = true;
  std::vector<int> region;
  auto path_to = [&](int state) {
    std::vector<int> path;
    int cur = state;
    while (cur != sd) {
      path.push_back(via[(size_t)cur]);
      cur = ls.enabled[(size_t)via[(size_t)cur]].src;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    region.push_back(cur);
    for (int id : ls.enabledBySrc[(size_t)cur]) {
      const auto& t = ls.enabled[(size_t)id];
      if (!independent(ls, t, opts.strictIndependence)) {
        kind = 2;
        escapePath = path_to(cur);
        escapeBad = id;
        return true;
      }
      if (t.dst == ss || seen[(size_t)t.dst]) continue;
      seen[(size_t)t.dst] = true;
      via[(size_t)t.dst] = id;
      frontier.push_back(t.dst);
    }
  }
  for (int u : region) {
    if (ls.enabledBySrc[(size_t)u].empty()) {
      kind = 0;
      escapePath = path_to(u);
      deadDis = ls.disabledBySrc[(size_t)u];
      return true;
    }
  }
  // cycle within the region (edges into ss excluded)
  std::set<int> inRegion(region.begin(), region.end());
  std::vector<int> color(ls.states.size(), 0);  // 0 white, 1 on stack, 2 done
  std::vector<int> stackVia(ls.states.size(), -1);
  std::function<bool(int)> dfs = [&](int u) -> bool {
    color[(size_t)u] = 1;
    for (int id : ls.enabledBySrc[(size_t)u]) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.dst == ss || !inRegion.count(t.dst)) continue;
      if (color[(size_t)t.dst] == 1) {
        // back edge: reconstruct the cycle
        escapeCycle.clear();
        escapeCycle.push_back(id);
        int cur = u;
        while (cur != t.dst) {
          escapeCycle.push_back(stackVia[(size_t)cur]);
          cur = ls.enabled[(size_t)stackVia[(size_t)cur]].src;
        }
        std::reverse(escapeCycle.begin(), escapeCycle.end());
        kind = 1;
        escapePath = path_to(t.dst);
        return true;
      }
      if (color[(size_t)t.dst] == 0) {
        stackVia[(size_t)t.dst] = id;
        if (dfs(t.dst)) return true;
      }
    }
    color[(size_t)u] = 2;
    return false;
  };
  if (dfs(sd)) return true;
  return false;
}

// Enumerates the independent simple paths from s0 to the targets.
struct PathEnum {
  const LocalSemantics& ls;
  const std::set<int>& targets;
  size_t bound;
  bool strict;
  size_t expansions = 0;
  std::vector<std::vector<int>> paths;  // transition id sequences
  std::vector<int> cur;
  std::vector<bool> onPath;

  PathEnum(const LocalSemantics& l, const std::set<int>& t, size_t b, bool strictIndep)
      : ls(l), targets(t), bound(b), strict(strictIndep), onPath(l.states.size(), false) {}

  void dfs(int state) {
    if (++expansions > bound)
      throw ResourceError("simple-path enumeration exceeds bound (" + std::to_string(bound) + ")");
    if (targets.count(state)) paths.push_back(cur);
    onPath[(size_t)state] = true;
    for (int id : ls.enabledBySrc[(size_t)state]) {
      const auto& t = ls.enabled[(size_t)id];
      if (onPath[(size_t)t.dst]) continue;
      if (!independent(ls, t, strict)) continue;
      cur.push_back(id);
      dfs(t.dst);
      cur.pop_back();
    }
    onPath[(size_t)state] = false;
  }
};

}  // namespace

namespace {

// Shortest enabled-transition path between state sets (BFS); from/to may
// overlap, in which case the path is empty.
std::vector<int> shortest_between(const LocalSemantics& ls, int from, const std::set<int>& to) {
  if (to.count(from)) return {};
  std::deque<int> frontier{from};
  std::vector<int> via(ls.states.size(), -1);
  std::vector<bool> seen(ls.states.size(), false);
  seen[(size_t)from] = true;
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    for (int id : ls.enabledBySrc[(size_t)cur]) {
      const auto& t = ls.enabled[(size_t)id];
      if (seen[(size_t)t.dst]) continue;
      seen[(size_t)t.dst] = true;
      via[(size_t)t.dst] = id;
      if (to.count(t.dst)) {
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
  return {};
}

}  // namespace

ConditionReport check_amenability(const LocalSemantics& ls, const SpecSuite& spec,
                                  const DecidabilityOptions& opts) {
  ConditionReport rep;
  rep.property = PropertyKind::Amenability;
  rep.ok = true;

  // forward reachability once; per-atom co-reachability below
  std::vector<bool> reach(ls.states.size(), false);
  {
    std::deque<int> frontier{ls.s0};
    reach[(size_t)ls.s0] = true;
    while (!frontier.empty()) {
      int cur = frontier.front();
      frontier.pop_front();
      for (int id : ls.enabledBySrc[(size_t)cur]) {
        int d = ls.enabled[(size_t)id].dst;
        if (!reach[(size_t)d]) {
          reach[(size_t)d] = true;
          frontier.push_back(d);
        }
      }
    }
  }
  std::vector<std::vector<int>> incoming(ls.states.size());
  for (const auto& t : ls.enabled) incoming[(size_t)t.dst].push_back(t.id);

  for (const auto& line : spec.safety) {
    for (size_t ai = 0; ai < line.atoms.size(); ++ai) {
      const auto& atom = line.atoms[ai];
      auto st = satisfying_states(ls, atom.predicate);
      std::set<int> targets(st.begin(), st.end());
      if (targets.empty()) continue;

      std::vector<bool> coreach(ls.states.size(), false);
      {
        std::deque<int> frontier;
        for (int s : st) {
          coreach[(size_t)s] = true;
          frontier.push_back(s);
        }
        while (!frontier.empty()) {
          int cur = frontier.front();
          frontier.pop_front();
          for (int id : incoming[(size_t)cur]) {
            int s = ls.enabled[(size_t)id].src;
            if (!coreach[(size_t)s]) {
              coreach[(size_t)s] = true;
              frontier.push_back(s);
            }
          }
        }
      }

      // clause (1): no non-independent transition lies on a path from s0
      // to st(f)
      int badTrans = -1;
      for (const auto& t : ls.enabled) {
        if (independent(ls, t, opts.strictIndependence)) continue;
        if (reach[(size_t)t.src] && coreach[(size_t)t.dst]) {
          badTrans = t.id;
          break;
        }
      }
      if (badTrans < 0) continue;
      std::vector<int> badPath = shortest_between(ls, ls.s0, {ls.enabled[(size_t)badTrans].src});
      badPath.push_back(badTrans);
      for (int id : shortest_between(ls, ls.enabled[(size_t)badTrans].dst, targets))
        badPath.push_back(id);

      // F: the independent simple paths from s0 to st(f)
      PathEnum en(ls, targets, opts.pathExpansionBound, opts.strictIndependence);
      try {
        en.dfs(ls.s0);
      } catch (ResourceError& e) {
        throw ResourceError(std::string(e.what()) + " while checking safety atom of line '" +
                            line.name + "'");
      }
      std::vector<const std::vector<int>*> F;
      for (const auto& p : en.paths) F.push_back(&p);

      // clause (2): branches off independent paths stay confined or return
      for (const auto* pp : F) {
        const auto& p = *pp;
        std::vector<int> pathStates{ls.s0};
        for (int id : p) pathStates.push_back(ls.enabled[(size_t)id].dst);
        std::set<int> onP(pathStates.begin(), pathStates.end());
        for (int ss : pathStates) {
          for (int id : ls.enabledBySrc[(size_t)ss]) {
            const auto& t = ls.enabled[(size_t)id];
            if (t.dst == ss) continue;
            if (onP.count(t.dst)) {
              // (a) transition between path states must be independent
              if (independent(ls, t, opts.strictIndependence)) continue;
              rep.ok = false;
              AmenCube cube;
              cube.lineName = line.name;
              cube.atomIndex = (int)ai;
              cube.predicate = atom.predicate;
              cube.xPath = badPath;
              cube.xBad = badTrans;
              cube.clause = 2;
              cube.yPath = p;
              cube.yTrans = t.id;
              rep.amenCube = cube;
              rep.description = "amenability 2(a): non-independent transition between states of an "
                                "independent error path (line '" + line.name + "')";
              return rep;
            }
            // (b) everything out of t.dst must lead back to ss independently
            int kind = -1;
            std::vector<int> escapePath, escapeCycle, deadDis;
            int escapeBad = -1;
            if (!find_escape(ls, t.dst, ss, opts, kind, escapePath, escapeCycle, escapeBad, deadDis))
              continue;
            rep.ok = false;
            AmenCube cube;
            cube.lineName = line.name;
            cube.atomIndex = (int)ai;
            cube.predicate = atom.predicate;
            cube.xPath = badPath;
            cube.xBad = badTrans;
            cube.clause = 3;
            cube.yPath = p;
            cube.yTrans = t.id;
            cube.escapeKind = kind;
            cube.escapePath = escapePath;
            cube.escapeCycle = escapeCycle;
            cube.escapeBad = escapeBad;
            cube.deadEndDisabled = deadDis;
            rep.amenCube = cube;
            rep.description = "amenability 2(b): a branch off an independent error path escapes "
                              "(line '" + line.name + "')";
            return rep;
          }
        }
      }
    }
  }
  return rep;
}

int compute_cutoff(const ConcreteProcess& p, const SpecSuite& spec) {
  // K winners can be held inside any agreement round while the error
  // pattern accumulates among the remaining processes, so the thresholds
  // ride on top of the largest cardinality.
  int c = 1;
  int maxCard = 0;
  const ProcessSketch& sk = *p.sketch;
  for (const auto& ev : sk.events) {
    if (ev.kind == EventKind::Partition || ev.kind == EventKind::Consensus)
      maxCard = std::max(maxCard, p.cardinality(ev));
    if (ev.kind == EventKind::Rendezvous && !ev.env) c = std::max(c, 2);
  }
  for (const auto& line : spec.safety) {
    int sum = 0;
    for (const auto& atom : line.atoms) sum += atom.threshold;
    c = std::max(c, sum + maxCard);
  }
  if (maxCard > 0) c = std::max(c, maxCard + 1);
  return c;
}

}  // namespace forge
