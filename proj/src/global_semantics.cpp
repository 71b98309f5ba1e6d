#include "forge/global_semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace forge {

namespace {

// Enumerates size-m subsets of 0..n-1 in lexicographic order.
void for_each_combination(size_t n, size_t m, const std::function<void(const std::vector<size_t>&)>& fn) {
  if (m == 0 || m > n) return;
  std::vector<size_t> idx(m);
  for (size_t i = 0; i < m; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    size_t pos = m;
    while (pos-- > 0) {
      if (idx[pos] != n - m + pos) break;
      if (pos == 0) return;
    }
    if (idx[pos] == n - m + pos) return;
    ++idx[pos];
    for (size_t i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
}

class GBuilder {
 public:
  GBuilder(const ConcreteProcess& p, int n, const GlobalBuildOptions& opts, const LocalSemantics* ls)
      : p_(p), n_(n), opts_(opts) {
    gs_.n = n;
    if (ls) {
      gs_.ls = ls;
    } else {
      gs_.ownedLocal = std::make_shared<LocalSemantics>(build_local_semantics(p));
      gs_.ls = gs_.ownedLocal.get();
    }
  }

  GlobalSemantics run() {
    const LocalSemantics& ls = *gs_.ls;
    GlobalState q0;
    q0.locals.assign((size_t)n_, ls.s0);
    intern(q0, -1);
    for (size_t qi = 0; qi < gs_.states.size(); ++qi) generate((int)qi);
    return std::move(gs_);
  }

 private:
  int intern(const GlobalState& q, int viaEdge) {
    auto it = gs_.index_.find(q.locals);
    if (it != gs_.index_.end()) return it->second;
    if (gs_.states.size() >= opts_.stateBound)
      throw ResourceError("global state space exceeds bound (" + std::to_string(opts_.stateBound) + ")");
    int id = (int)gs_.states.size();
    gs_.index_.emplace(q.locals, id);
    gs_.states.push_back(q);
    gs_.outgoing.emplace_back();
    gs_.disabledAt.emplace_back();
    gs_.parentEdge.push_back(viaEdge);
    return id;
  }

  void emit(int src, GlobalTransition t) {
    const LocalSemantics& ls = *gs_.ls;
    GlobalState dst = gs_.states[(size_t)src];
    for (const auto& step : t.steps) {
      const auto& lt = ls.enabled[(size_t)step.transition];
      dst.locals[(size_t)step.proc] = lt.dst;
      for (const auto& f : lt.fired) t.fired.push_back(f);
    }
    if (t.event >= 0) t.fired.push_back(FiredEvent{t.event, t.payload});
    t.id = (int)gs_.transitions.size();
    t.src = src;
    t.dst = intern(dst, t.id);
    gs_.outgoing[(size_t)src].push_back(t.id);
    gs_.transitions.push_back(std::move(t));
  }

  // Cartesian product over per-process option lists.
  void combos(int src, GlobalTransition base, const std::vector<std::pair<int, std::vector<int>>>& options,
              size_t at = 0) {
    if (at == options.size()) {
      std::sort(base.steps.begin(), base.steps.end(),
                [](const GlobalStep& a, const GlobalStep& b) { return a.proc < b.proc; });
      emit(src, std::move(base));
      return;
    }
    for (int tid : options[at].second) {
      GlobalTransition next = base;
      next.steps.push_back(GlobalStep{options[at].first, tid});
      combos(src, std::move(next), options, at + 1);
    }
  }

  std::vector<int> enabled_matching(int localState, ActionLabel::Kind k, int ev,
                                    const std::optional<int>* payload = nullptr,
                                    const std::vector<int>* decided = nullptr) const {
    const LocalSemantics& ls = *gs_.ls;
    std::vector<int> out;
    for (int id : ls.enabledBySrc[(size_t)localState]) {
      const auto& t = ls.enabled[(size_t)id];
      if (t.label.kind != k || t.label.event != ev) continue;
      if (payload && t.inst.payload != *payload) continue;
      if (decided && t.inst.decided != *decided) continue;
      out.push_back(id);
    }
    return out;
  }

  void generate(int qi) {
    const LocalSemantics& ls = *gs_.ls;
    const ProcessSketch& sk = ls.sk();
    const GlobalState q = gs_.states[(size_t)qi];

    for (size_t ei = 0; ei < sk.events.size(); ++ei) {
      const EventInfo& ev = sk.events[ei];
      size_t emittedBefore = gs_.transitions.size();
      switch (ev.kind) {
        case EventKind::Broadcast: gen_broadcast(qi, q, (int)ei, ev); break;
        case EventKind::Rendezvous: gen_rendezvous(qi, q, (int)ei, ev); break;
        case EventKind::Partition: gen_partition(qi, q, (int)ei, ev); break;
        case EventKind::Consensus: gen_consensus(qi, q, (int)ei, ev); break;
        default: break;
      }
      bool fired = gs_.transitions.size() > emittedBefore;
      if (!fired) {
        // the event cannot fire here: record, per process, the disabled
        // handlers that keep it from participating
        for (int j = 0; j < n_; ++j) {
          std::vector<int> facts;
          for (int id : ls.disabledBySrc[(size_t)q.locals[(size_t)j]])
            if (ls.disabled[(size_t)id].label.event == (int)ei) facts.push_back(id);
          if (facts.empty()) continue;
          DisabledGlobal d;
          d.state = qi;
          d.event = (int)ei;
          d.proc = j;
          d.facts = std::move(facts);
          gs_.disabledAt[(size_t)qi].push_back(std::move(d));
        }
      }
    }

    // internal steps: per process, per enabled internal transition
    for (int j = 0; j < n_; ++j) {
      for (int id : ls.enabledBySrc[(size_t)q.locals[(size_t)j]]) {
        const auto& t = ls.enabled[(size_t)id];
        if (t.label.kind != ActionLabel::Internal) continue;
        GlobalTransition g;
        g.event = -1;
        g.internalLoc = t.loc;
        g.internalHandler = t.handler;
        g.sender = j;
        g.steps.push_back(GlobalStep{j, id});
        emit(qi, std::move(g));
      }
      for (int id : ls.disabledBySrc[(size_t)q.locals[(size_t)j]]) {
        const auto& d = ls.disabled[(size_t)id];
        if (d.label.kind != ActionLabel::Internal) continue;
        DisabledGlobal dg;
        dg.state = qi;
        dg.event = -1;
        dg.proc = j;
        dg.facts = {id};
        gs_.disabledAt[(size_t)qi].push_back(std::move(dg));
      }
    }
  }

  std::vector<std::optional<int>> payload_instances(const EventInfo& ev) const {
    std::vector<std::optional<int>> out;
    if (ev.hasPayload)
      for (int v = ev.payloadLo; v <= ev.payloadHi; ++v) out.emplace_back(v);
    else
      out.emplace_back(std::nullopt);
    return out;
  }

  void gen_broadcast(int qi, const GlobalState& q, int ei, const EventInfo& ev) {
    if (ev.env) {
      // environment initiates; every process reacts
      for (const auto& p : payload_instances(ev)) {
        std::vector<std::pair<int, std::vector<int>>> options;
        bool ok = true;
        for (int j = 0; j < n_ && ok; ++j) {
          auto opts = enabled_matching(q.locals[(size_t)j], ActionLabel::React, ei, &p);
          if (opts.empty()) ok = false;
          options.emplace_back(j, std::move(opts));
        }
        if (!ok) continue;
        GlobalTransition base;
        base.event = ei;
        base.payload = p;
        base.sender = -1;
        combos(qi, std::move(base), options);
      }
      return;
    }
    for (int i = 0; i < n_; ++i) {
      for (int ts : enabled_matching(q.locals[(size_t)i], ActionLabel::Act, ei)) {
        const auto& sendT = gs_.ls->enabled[(size_t)ts];
        std::optional<int> p = sendT.inst.payload;
        std::vector<std::pair<int, std::vector<int>>> options;
        bool ok = true;
        for (int j = 0; j < n_ && ok; ++j) {
          if (j == i) continue;
          auto opts = enabled_matching(q.locals[(size_t)j], ActionLabel::React, ei, &p);
          if (opts.empty()) ok = false;
          options.emplace_back(j, std::move(opts));
        }
        if (!ok) continue;
        GlobalTransition base;
        base.event = ei;
        base.payload = p;
        base.sender = i;
        base.steps.push_back(GlobalStep{i, ts});
        combos(qi, std::move(base), options);
      }
    }
  }

  void gen_rendezvous(int qi, const GlobalState& q, int ei, const EventInfo& ev) {
    if (ev.env) {
      // the environment offers every payload; one process receives
      for (const auto& p : payload_instances(ev)) {
        for (int j = 0; j < n_; ++j) {
          for (int tr : enabled_matching(q.locals[(size_t)j], ActionLabel::React, ei, &p)) {
            GlobalTransition g;
            g.event = ei;
            g.payload = p;
            g.sender = -1;
            g.steps.push_back(GlobalStep{j, tr});
            emit(qi, std::move(g));
          }
        }
      }
      return;
    }
    for (int i = 0; i < n_; ++i) {
      for (int ts : enabled_matching(q.locals[(size_t)i], ActionLabel::Act, ei)) {
        std::optional<int> p = gs_.ls->enabled[(size_t)ts].inst.payload;
        for (int j = 0; j < n_; ++j) {
          if (j == i) continue;
          for (int tr : enabled_matching(q.locals[(size_t)j], ActionLabel::React, ei, &p)) {
            GlobalTransition g;
            g.event = ei;
            g.payload = p;
            g.sender = i;
            g.steps.push_back(GlobalStep{i, ts});
            g.steps.push_back(GlobalStep{j, tr});
            emit(qi, std::move(g));
          }
        }
      }
    }
  }

  void gen_partition(int qi, const GlobalState& q, int ei, const EventInfo& ev) {
    std::vector<int> parts;
    for (int j = 0; j < n_; ++j)
      if (gs_.ls->has_enabled(q.locals[(size_t)j], ActionLabel::Act, ei)) parts.push_back(j);
    if (parts.empty()) return;
    int k = gs_.ls->proc.cardinality(ev);
    size_t m = std::min((size_t)std::max(1, k), parts.size());
    for_each_combination(parts.size(), m, [&](const std::vector<size_t>& sel) {
      std::vector<bool> isWinner(parts.size(), false);
      for (size_t s : sel) isWinner[s] = true;
      std::vector<std::pair<int, std::vector<int>>> options;
      GlobalTransition base;
      base.event = ei;
      for (size_t pi = 0; pi < parts.size(); ++pi) {
        int proc = parts[pi];
        auto opts = enabled_matching(q.locals[(size_t)proc],
                                     isWinner[pi] ? ActionLabel::Act : ActionLabel::React, ei);
        if (isWinner[pi]) base.winners.push_back(proc);
        options.emplace_back(proc, std::move(opts));
      }
      combos(qi, std::move(base), options);
    });
  }

  void gen_consensus(int qi, const GlobalState& q, int ei, const EventInfo& ev) {
    const LocalSemantics& ls = *gs_.ls;
    const ProcessSketch& sk = ls.sk();
    std::vector<int> parts;
    std::vector<int> proposals;
    for (int j = 0; j < n_; ++j) {
      for (int id : ls.enabledBySrc[(size_t)q.locals[(size_t)j]]) {
        if (ls.enabled[(size_t)id].label.event == ei) {
          parts.push_back(j);
          break;
        }
      }
    }
    if (parts.empty()) return;
    // participants that propose contribute their proposal variable's value
    for (int j : parts) {
      for (size_t hi = 0; hi < sk.locations[(size_t)ls.states[(size_t)q.locals[(size_t)j]].loc].handlers.size();
           ++hi) {
        const Handler& h = sk.locations[(size_t)ls.states[(size_t)q.locals[(size_t)j]].loc].handlers[hi];
        if (h.kind != HandlerKind::Consensus || h.eventName != ev.name || h.proposalVar.empty()) continue;
        bool handlerEnabled = false;
        for (int id : ls.enabledBySrc[(size_t)q.locals[(size_t)j]]) {
          const auto& t = ls.enabled[(size_t)id];
          if (t.label.event == ei && t.handler == (int)hi) {
            handlerEnabled = true;
            break;
          }
        }
        if (handlerEnabled)
          proposals.push_back(
              ls.states[(size_t)q.locals[(size_t)j]].vals[(size_t)sk.var_index(h.proposalVar)]);
      }
    }
    std::sort(proposals.begin(), proposals.end());
    proposals.erase(std::unique(proposals.begin(), proposals.end()), proposals.end());
    if (proposals.empty()) return;  // nothing to decide on
    int k = gs_.ls->proc.cardinality(ev);
    size_t m = std::min((size_t)std::max(1, k), proposals.size());
    for_each_combination(proposals.size(), m, [&](const std::vector<size_t>& sel) {
      std::vector<int> D;
      for (size_t s : sel) D.push_back(proposals[s]);
      std::vector<std::pair<int, std::vector<int>>> options;
      bool ok = true;
      for (int proc : parts) {
        std::vector<int> opts;
        for (int id : ls.enabledBySrc[(size_t)q.locals[(size_t)proc]]) {
          const auto& t = ls.enabled[(size_t)id];
          if (t.label.event == ei && t.inst.decided == D) opts.push_back(id);
        }
        if (opts.empty()) {
          ok = false;
          break;
        }
        options.emplace_back(proc, std::move(opts));
      }
      if (!ok) return;
      GlobalTransition base;
      base.event = ei;
      base.decided = D;
      base.supportSize = (int)proposals.size();
      combos(qi, std::move(base), options);
    });
  }

  const ConcreteProcess& p_;
  int n_;
  GlobalBuildOptions opts_;
  GlobalSemantics gs_;
};

}  // namespace

int GlobalSemantics::find_state(const GlobalState& q) const {
  auto it = index_.find(q.locals);
  return it == index_.end() ? -1 : it->second;
}

std::string GlobalSemantics::state_name(int id) const {
  std::ostringstream os;
  os << "<";
  const auto& q = states[(size_t)id];
  for (size_t i = 0; i < q.locals.size(); ++i) os << (i ? " | " : "") << ls->state_name(q.locals[i]);
  os << ">";
  return os.str();
}

std::vector<int> GlobalSemantics::trace_to(int id) const {
  std::vector<int> out;
  int cur = id;
  while (parentEdge[(size_t)cur] >= 0) {
    int e = parentEdge[(size_t)cur];
    out.push_back(e);
    cur = transitions[(size_t)e].src;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

GlobalSemantics build_global_semantics(const ConcreteProcess& p, int n, const GlobalBuildOptions& opts,
                                       const LocalSemantics* prebuilt) {
  if (n < 1) throw SemanticsError("system size must be >= 1");
  return GBuilder(p, n, opts, prebuilt).run();
}

std::pair<std::vector<int>, std::vector<DisabledGlobal>> global_successors(const GlobalSemantics& gs,
                                                                           int state) {
  return {gs.outgoing[(size_t)state], gs.disabledAt[(size_t)state]};
}

std::string to_dot(const GlobalSemantics& gs) {
  std::ostringstream os;
  os << "digraph global {\n  rankdir=LR;\n";
  for (size_t i = 0; i < gs.states.size(); ++i)
    os << "  q" << i << " [label=\"" << gs.state_name((int)i) << "\"];\n";
  const ProcessSketch& sk = gs.ls->sk();
  for (const auto& t : gs.transitions) {
    std::string label = t.event >= 0 ? sk.events[(size_t)t.event].name : "tau";
    if (t.payload) label += "[" + std::to_string(*t.payload) + "]";
    os << "  q" << t.src << " -> q" << t.dst << " [label=\"" << label << "\"];\n";
  }
  for (size_t i = 0; i < gs.states.size(); ++i) {
    for (const auto& d : gs.disabledAt[i]) {
      std::string label = d.event >= 0 ? sk.events[(size_t)d.event].name : "tau";
      os << "  x" << i << "_" << d.proc << "_" << d.event << " [shape=point];\n";
      os << "  q" << i << " -> x" << i << "_" << d.proc << "_" << d.event << " [style=dashed, label=\""
         << label << "@" << d.proc << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace forge
