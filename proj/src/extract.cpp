#include "forge/extract.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

namespace forge {

namespace {

void add_unique(std::vector<int>& v, int x) {
  if (x < 0) return;
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

// First enabled transition with the given source, kind, and event.
int first_partial_witness(const LocalSemantics& ls, int state, ActionLabel::Kind k, int event) {
  auto ids = ls.enabled_with_action(state, k, event);
  return ids.empty() ? -1 : ids.front();
}

void finish(LocalCex& cex) {
  std::sort(cex.enabledSubset.begin(), cex.enabledSubset.end());
  std::sort(cex.disabledSubset.begin(), cex.disabledSubset.end());
  cex.enabledSubset.erase(std::unique(cex.enabledSubset.begin(), cex.enabledSubset.end()),
                          cex.enabledSubset.end());
  cex.disabledSubset.erase(std::unique(cex.disabledSubset.begin(), cex.disabledSubset.end()),
                           cex.disabledSubset.end());
}

}  // namespace

std::vector<int> witness_no_reacting_path(const LocalSemantics& ls, int state, int f,
                                          std::vector<int>& disabledOut) {
  std::vector<int> enabledOut;
  auto closure = internal_closure(ls, state);
  for (int u : closure) {
    for (int id : ls.enabledBySrc[(size_t)u]) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.label.kind == ActionLabel::Internal) add_unique(enabledOut, id);
    }
    for (int id : ls.disabledBySrc[(size_t)u]) {
      const auto& d = ls.disabled[(size_t)id];
      if (d.label.kind == ActionLabel::Internal ||
          (d.label.kind == ActionLabel::React && d.label.event == f))
        add_unique(disabledOut, id);
    }
  }
  return enabledOut;
}

namespace {

// Builds the cube witness of one phase-compatibility violation: the union
// of the per-literal witnesses.
LocalCex witness_pc_cube(const LocalSemantics& ls, const PhaseInfo& phases, const PcCube& cube) {
  LocalCex cex;
  cex.property = PropertyKind::PhaseCompatibility;
  cex.pcCube = cube;
  switch (cube.condition) {
    case 1: {
      add_unique(cex.enabledSubset, cube.actingTrans);
      for (int id : ls.disabled_with_action(cube.missingAt, ActionLabel::React, cube.e))
        add_unique(cex.disabledSubset, id);
      break;
    }
    case 21:
    case 22: {
      add_unique(cex.enabledSubset, cube.actingTrans);
      add_unique(cex.enabledSubset, first_partial_witness(ls, cube.reactState, ActionLabel::React, cube.f));
      add_unique(cex.enabledSubset, cube.firableTrans);
      add_unique(cex.enabledSubset, first_partial_witness(ls, cube.firableState, ActionLabel::Act, cube.f));
      add_unique(cex.enabledSubset, cube.tTrans);
      if (cube.condition == 21) {
        for (int id : ls.disabled_with_action(cube.missingAt, ActionLabel::React, cube.f))
          add_unique(cex.disabledSubset, id);
      } else {
        for (int id : witness_no_reacting_path(ls, cube.missingAt, cube.f, cex.disabledSubset))
          add_unique(cex.enabledSubset, id);
      }
      break;
    }
    default: {  // condition 3
      add_unique(cex.enabledSubset, cube.internalTrans);
      add_unique(cex.enabledSubset, first_partial_witness(ls, cube.reactState, ActionLabel::React, cube.f));
      add_unique(cex.enabledSubset, first_partial_witness(ls, cube.zState, ActionLabel::Act, cube.f));
      auto wt = same_phase_witness(ls, phases, cube.sState, cube.tState);
      auto wz = same_phase_witness(ls, phases, cube.sState, cube.zState);
      assert(wt && wz && "checker/extractor phase mismatch");
      for (int id : wt->transitions) add_unique(cex.enabledSubset, id);
      for (int id : wz->transitions) add_unique(cex.enabledSubset, id);
      for (int id : witness_no_reacting_path(ls, cube.tState, cube.f, cex.disabledSubset))
        add_unique(cex.enabledSubset, id);
      break;
    }
  }
  finish(cex);
  return cex;
}

std::vector<std::pair<char, int>> sorted_keys(const LocalCex& cex) {
  std::vector<std::pair<char, int>> keys;
  for (int id : cex.enabledSubset) keys.emplace_back('E', id);
  for (int id : cex.disabledSubset) keys.emplace_back('D', id);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

LocalCex extract_local_cex(const LocalSemantics& ls, const PhaseInfo& phases, const PcCube& failedCube,
                           const DecidabilityOptions& opts) {
  (void)opts;
  auto cubes = pc_violations(ls, phases, failedCube.condition, SIZE_MAX);
  assert(!cubes.empty() && "extraction called on a satisfied condition");
  std::optional<LocalCex> best;
  for (const auto& cube : cubes) {
    LocalCex w = witness_pc_cube(ls, phases, cube);
    if (!best || w.size() < best->size() ||
        (w.size() == best->size() && sorted_keys(w) < sorted_keys(*best)))
      best = std::move(w);
  }
  best->description = describe_pc_cube(ls, *best->pcCube);
  return *best;
}

LocalCex extract_amenability_cex(const LocalSemantics& ls, const AmenCube& cube,
                                 const DecidabilityOptions& opts) {
  (void)ls;
  (void)opts;
  LocalCex cex;
  cex.property = PropertyKind::Amenability;
  cex.amenCube = cube;
  for (int id : cube.xPath) add_unique(cex.enabledSubset, id);
  for (int id : cube.yPath) add_unique(cex.enabledSubset, id);
  add_unique(cex.enabledSubset, cube.yTrans);
  if (cube.clause == 3) {
    for (int id : cube.escapePath) add_unique(cex.enabledSubset, id);
    for (int id : cube.escapeCycle) add_unique(cex.enabledSubset, id);
    add_unique(cex.enabledSubset, cube.escapeBad);
    for (int id : cube.deadEndDisabled) add_unique(cex.disabledSubset, id);
  }
  finish(cex);
  cex.description = "amenability violation (line '" + cube.lineName + "', clause " +
                    (cube.clause == 2 ? std::string("2a") : std::string("2b")) + ")";
  return cex;
}

GlobalCex package_global_cex(const ErrorTrace& trace) {
  GlobalCex cex;
  cex.shape = GlobalCexShape::Trace;
  cex.enabledGlobal = trace.transitions;
  cex.lineName = trace.lineName;
  return cex;
}

GlobalCex package_global_cex(const DeadlockCex& deadlock) {
  GlobalCex cex;
  cex.shape = GlobalCexShape::Deadlock;
  cex.enabledGlobal = deadlock.transitions;
  cex.disabledFacts = deadlock.disabled;
  cex.lineName = "deadlock";
  return cex;
}

GlobalCex package_global_cex(const Lasso& lasso) {
  GlobalCex cex;
  cex.shape = GlobalCexShape::Lasso;
  cex.enabledGlobal = lasso.stem;
  for (int id : lasso.cycle) cex.enabledGlobal.push_back(id);
  cex.disabledFacts = lasso.cycleDisabled;
  cex.lineName = lasso.lineName;
  return cex;
}

namespace {

// Subset-semantics helpers for cube re-evaluation.
struct SubsetView {
  const LocalSemantics& ls;
  std::set<int> enabled, disabled;

  SubsetView(const LocalSemantics& l, const LocalCex& cex)
      : ls(l),
        enabled(cex.enabledSubset.begin(), cex.enabledSubset.end()),
        disabled(cex.disabledSubset.begin(), cex.disabledSubset.end()) {}

  bool has_partial(int state, ActionLabel::Kind k, int event) const {
    for (int id : enabled) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.src == state && t.label.kind == k && t.label.event == event) return true;
    }
    return false;
  }

  // handler classified (enabled or disabled) in the subset at a state
  bool handler_covered(int state, int handler, ActionLabel::Kind k, int event) const {
    for (int id : enabled) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.src == state && t.handler == handler && t.label.kind == k && t.label.event == event)
        return true;
    }
    for (int id : disabled) {
      const auto& d = ls.disabled[(size_t)id];
      if (d.src == state && d.handler == handler && d.label.kind == k && d.label.event == event)
        return true;
    }
    return false;
  }

  // The absence literal "no R(event) at state" holds on the subset when no
  // enabled reaction is present and every reacting handler at the location
  // is witnessed as disabled.
  bool no_react(int state, int event) const {
    if (has_partial(state, ActionLabel::React, event)) return false;
    const auto& loc = ls.sk().locations[(size_t)ls.states[(size_t)state].loc];
    for (size_t h = 0; h < loc.handlers.size(); ++h) {
      if (!handler_would_react(loc.handlers[h], event)) continue;
      bool covered = false;
      for (int id : disabled) {
        const auto& d = ls.disabled[(size_t)id];
        if (d.src == state && d.handler == (int)h && d.label.kind == ActionLabel::React &&
            d.label.event == event)
          covered = true;
      }
      if (!covered) return false;
    }
    return true;
  }

  bool handler_would_react(const Handler& h, int event) const {
    const auto& evs = ls.sk().events;
    if (h.eventName.empty()) return false;
    for (size_t e = 0; e < evs.size(); ++e) {
      if ((int)e != event) continue;
      return h.eventName == evs[e].name &&
             (h.kind == HandlerKind::Receive || h.kind == HandlerKind::Partition ||
              h.kind == HandlerKind::Consensus);
    }
    return false;
  }

  // "not exists state ~~> R(f)*" with witness completeness: every internal
  // handler along the subset closure is classified, and every reacting
  // handler for f there is witnessed disabled.
  bool no_reacting_path(int state, int f) const {
    for (int u : closure(state)) {
      if (has_partial(u, ActionLabel::React, f)) return false;
      const auto& loc = ls.sk().locations[(size_t)ls.states[(size_t)u].loc];
      for (size_t h = 0; h < loc.handlers.size(); ++h) {
        if (loc.handlers[h].kind == HandlerKind::Internal) {
          if (!handler_covered(u, (int)h, ActionLabel::Internal, -1)) return false;
        } else if (handler_would_react(loc.handlers[h], f)) {
          bool covered = false;
          for (int id : disabled) {
            const auto& d = ls.disabled[(size_t)id];
            if (d.src == u && d.handler == (int)h && d.label.event == f &&
                d.label.kind == ActionLabel::React)
              covered = true;
          }
          if (!covered) return false;
        }
      }
    }
    return true;
  }

  // internal closure within the subset
  std::vector<int> closure(int from) const {
    std::vector<int> out{from};
    std::set<int> seen{from};
    for (size_t i = 0; i < out.size(); ++i) {
      for (int id : enabled) {
        const auto& t = ls.enabled[(size_t)id];
        if (t.src != out[i] || t.label.kind != ActionLabel::Internal) continue;
        if (seen.insert(t.dst).second) out.push_back(t.dst);
      }
    }
    return out;
  }

  bool reacting_path(int state, int f) const {
    for (int u : closure(state))
      if (has_partial(u, ActionLabel::React, f)) return true;
    return false;
  }

  // same-phase over the subset: core phases from subset transitions, merged
  // along subset internal paths
  bool same_phase(int sa, int sb) const {
    std::vector<std::set<int>> cores;
    const ProcessSketch& sk = ls.sk();
    for (size_t ei = 0; ei < sk.events.size(); ++ei) {
      if (!globally_synchronizing(sk, (int)ei)) continue;
      std::set<int> src, dst;
      for (int id : enabled) {
        const auto& t = ls.enabled[(size_t)id];
        if (t.label.event != (int)ei) continue;
        src.insert(t.src);
        dst.insert(t.dst);
      }
      if (!src.empty()) cores.push_back(src);
      if (!dst.empty()) cores.push_back(dst);
    }
    // merge along subset internal connectivity (either direction) or shared states
    std::vector<int> parent(cores.size());
    for (size_t i = 0; i < cores.size(); ++i) parent[i] = (int)i;
    std::function<int(int)> find = [&](int x) {
      while (parent[(size_t)x] != x) x = parent[(size_t)x] = parent[(size_t)parent[(size_t)x]];
      return x;
    };
    auto connected = [&](const std::set<int>& a, const std::set<int>& b) {
      for (int s : a)
        if (b.count(s)) return true;
      for (int s : a) {
        for (int u : closure(s))
          if (b.count(u)) return true;
      }
      return false;
    };
    for (size_t i = 0; i < cores.size(); ++i)
      for (size_t j = 0; j < cores.size(); ++j)
        if (i != j && connected(cores[i], cores[j])) parent[(size_t)find((int)i)] = find((int)j);
    for (size_t i = 0; i < cores.size(); ++i) {
      if (!cores[i].count(sa)) continue;
      for (size_t j = 0; j < cores.size(); ++j)
        if (cores[j].count(sb) && find((int)i) == find((int)j)) return true;
    }
    return false;
  }

  bool contains_disabled(int id) const { return disabled.count(id) != 0; }
};

bool path_in_subset(const SubsetView& v, const std::vector<int>& path) {
  for (int id : path)
    if (!v.enabled.count(id)) return false;
  return true;
}

}  // namespace

bool cex_satisfies_cube(const LocalSemantics& ls, const LocalCex& cex, const DecidabilityOptions& opts) {
  SubsetView v(ls, cex);
  if (cex.pcCube) {
    const PcCube& c = *cex.pcCube;
    switch (c.condition) {
      case 1:
        return v.enabled.count(c.actingTrans) && v.no_react(c.missingAt, c.e);
      case 21:
        return v.enabled.count(c.actingTrans) &&
               v.has_partial(c.reactState, ActionLabel::React, c.f) &&
               v.enabled.count(c.firableTrans) &&
               v.has_partial(c.firableState, ActionLabel::Act, c.f) && v.enabled.count(c.tTrans) &&
               v.no_react(c.missingAt, c.f);
      case 22:
        return v.enabled.count(c.actingTrans) &&
               v.has_partial(c.reactState, ActionLabel::React, c.f) &&
               v.enabled.count(c.firableTrans) &&
               v.has_partial(c.firableState, ActionLabel::Act, c.f) && v.enabled.count(c.tTrans) &&
               v.no_reacting_path(c.missingAt, c.f);
      default:
        return v.enabled.count(c.internalTrans) &&
               v.has_partial(c.reactState, ActionLabel::React, c.f) &&
               v.has_partial(c.zState, ActionLabel::Act, c.f) && v.same_phase(c.sState, c.tState) &&
               v.same_phase(c.sState, c.zState) && v.no_reacting_path(c.tState, c.f);
    }
  }
  if (cex.amenCube) {
    const AmenCube& c = *cex.amenCube;
    // x: the recorded path is present and contains a non-independent step
    if (!path_in_subset(v, c.xPath)) return false;
    if (c.xBad < 0 || independent(ls, ls.enabled[(size_t)c.xBad], opts.strictIndependence)) return false;
    // y: branch off a present independent path
    if (!path_in_subset(v, c.yPath)) return false;
    if (c.yTrans < 0 || !v.enabled.count(c.yTrans)) return false;
    if (c.clause == 2) {
      return !independent(ls, ls.enabled[(size_t)c.yTrans], opts.strictIndependence);
    }
    switch (c.escapeKind) {
      case 0: {
        if (!path_in_subset(v, c.escapePath)) return false;
        for (int id : c.deadEndDisabled)
          if (!v.contains_disabled(id)) return false;
        return true;
      }
      case 1:
        return path_in_subset(v, c.escapePath) && path_in_subset(v, c.escapeCycle);
      default:
        return path_in_subset(v, c.escapePath) && c.escapeBad >= 0 && v.enabled.count(c.escapeBad) &&
               !independent(ls, ls.enabled[(size_t)c.escapeBad], opts.strictIndependence);
    }
  }
  return false;
}

bool global_cex_replays(const GlobalSemantics& gs, const GlobalCex& cex) {
  // Every transition must be one of global_successors at its source; the
  // trace portion must chain from q0 for traces and deadlocks.
  for (int id : cex.enabledGlobal) {
    if (id < 0 || (size_t)id >= gs.transitions.size()) return false;
    const auto& t = gs.transitions[(size_t)id];
    auto [enabled, disabled] = global_successors(gs, t.src);
    (void)disabled;
    if (std::find(enabled.begin(), enabled.end(), id) == enabled.end()) return false;
  }
  if (cex.shape != GlobalCexShape::Lasso) {
    int cur = 0;
    for (int id : cex.enabledGlobal) {
      if (gs.transitions[(size_t)id].src != cur) return false;
      cur = gs.transitions[(size_t)id].dst;
    }
  }
  for (const auto& d : cex.disabledFacts) {
    for (int f : d.facts) {
      if (f < 0 || (size_t)f >= gs.ls->disabled.size()) return false;
      const auto& fact = gs.ls->disabled[(size_t)f];
      if (fact.src != gs.states[(size_t)d.state].locals[(size_t)d.proc]) return false;
    }
  }
  return true;
}

}  // namespace forge
