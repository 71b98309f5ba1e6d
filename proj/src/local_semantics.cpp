#include "forge/local_semantics.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace forge {

const HoleSignature& ConcreteProcess::sig(int holeId) const {
  const HoleSignature* s = sketch->hole(holeId);
  if (!s) throw SemanticsError("unknown hole ??" + std::to_string(holeId));
  return *s;
}

int ConcreteProcess::cardinality(const EventInfo& ev) const {
  if (!ev.cardinality) throw SemanticsError("event '" + ev.name + "' has no cardinality");
  if (ev.cardinality->kind == ExprKind::IntLit) return (int)ev.cardinality->intValue;
  return interp.value(ev.cardinality->holeId, 0);
}

ConcreteProcess complete(const ProcessSketch& sketch, Interpretation interp) {
  for (const auto& sig : sketch.holes) {
    auto it = interp.funcs.find(sig.id);
    if (it == interp.funcs.end())
      throw SemanticsError("interpretation missing hole ??" + std::to_string(sig.id));
    if (it->second.size() != sig.grid_size())
      throw SemanticsError("interpretation for ??" + std::to_string(sig.id) + " has wrong grid size");
    for (int v : it->second)
      if (std::find(sig.returnDomain.begin(), sig.returnDomain.end(), v) == sig.returnDomain.end())
        throw SemanticsError("interpretation for ??" + std::to_string(sig.id) + " maps to out-of-range value " +
                             std::to_string(v));
  }
  ConcreteProcess p;
  p.sketch = &sketch;
  p.interp = std::move(interp);
  return p;
}

long long eval_expr(const ConcreteProcess& p, const ExprPtr& e, const EvalCtx& ctx) {
  const ProcessSketch& sk = *p.sketch;
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      return e->intValue;
    case ExprKind::LocLit: {
      int li = sk.location_index(e->name);
      if (li < 0) throw SemanticsError("unknown location '" + e->name + "'");
      return li;
    }
    case ExprKind::Var: {
      int vi = sk.var_index(e->name);
      if (vi < 0) throw SemanticsError("unknown variable '" + e->name + "'");
      return (*ctx.vals)[(size_t)vi];
    }
    case ExprKind::Payload:
      if (!ctx.payload) throw SemanticsError("payload of '" + e->name + "' not available here");
      return *ctx.payload;
    case ExprKind::DecVar: {
      if (!ctx.decided) throw SemanticsError("decVar of '" + e->name + "' not available here");
      size_t idx = (size_t)e->intValue;
      if (idx < 1 || idx > ctx.decided->size())
        throw SemanticsError("decVar index " + std::to_string(idx) + " out of range (|decided| = " +
                             std::to_string(ctx.decided->size()) + ")");
      return (*ctx.decided)[idx - 1];
    }
    case ExprKind::DefaultOf: {
      int vi = sk.var_index(e->name);
      if (vi < 0) throw SemanticsError("unknown variable '" + e->name + "'");
      return sk.variables[(size_t)vi].lo;
    }
    case ExprKind::Hole: {
      const HoleSignature& sig = p.sig(e->holeId);
      std::vector<int> args;
      args.reserve(sig.params.size());
      for (const auto& param : sig.params) {
        int vi = sk.var_index(param);
        if (vi < 0) throw SemanticsError("unknown hole parameter '" + param + "'");
        args.push_back((*ctx.vals)[(size_t)vi]);
      }
      return eval_term(sig, args, p.interp);
    }
    case ExprKind::Unary: {
      long long v = eval_expr(p, e->sub, ctx);
      return e->uop == UnOp::Not ? !v : -v;
    }
    case ExprKind::Binary: {
      if (e->bop == BinOp::And) return eval_expr(p, e->lhs, ctx) && eval_expr(p, e->rhs, ctx);
      if (e->bop == BinOp::Or) return eval_expr(p, e->lhs, ctx) || eval_expr(p, e->rhs, ctx);
      long long a = eval_expr(p, e->lhs, ctx), b = eval_expr(p, e->rhs, ctx);
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
  }
  return 0;
}

bool expr_has_arith(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Binary && (e->bop == BinOp::Add || e->bop == BinOp::Sub)) return true;
  if (e->kind == ExprKind::Unary && e->uop == UnOp::Neg) return true;
  return expr_has_arith(e->lhs) || expr_has_arith(e->rhs) || expr_has_arith(e->sub);
}

namespace {

bool expr_reads_payload(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Payload) return true;
  return expr_reads_payload(e->lhs) || expr_reads_payload(e->rhs) || expr_reads_payload(e->sub);
}

class Builder {
 public:
  Builder(const ConcreteProcess& p, const BuildOptions& opts) : p_(p), sk_(*p.sketch), opts_(opts) {}

  LocalSemantics run() {
    LocalSemantics ls;
    ls.proc = p_;
    build_grid(ls);
    explore(ls);
    mark_concrete(ls);
    return ls;
  }

 private:
  void build_grid(LocalSemantics& ls) {
    size_t grid = sk_.locations.size();
    for (const auto& v : sk_.variables) grid *= (size_t)(v.hi - v.lo + 1);
    if (grid > opts_.stateGridBound)
      throw ResourceError("local state grid (" + std::to_string(grid) + ") exceeds bound");
    size_t perLoc = grid / std::max<size_t>(1, sk_.locations.size());
    ls.states.reserve(grid);
    for (size_t li = 0; li < sk_.locations.size(); ++li) {
      for (size_t g = 0; g < perLoc; ++g) {
        LocalState s;
        s.loc = (int)li;
        s.vals.resize(sk_.variables.size());
        size_t rem = g;
        for (size_t v = sk_.variables.size(); v-- > 0;) {
          size_t domSize = (size_t)(sk_.variables[v].hi - sk_.variables[v].lo + 1);
          s.vals[v] = sk_.variables[v].lo + (int)(rem % domSize);
          rem /= domSize;
        }
        ls.states.push_back(std::move(s));
      }
    }
    ls.reachable.assign(ls.states.size(), false);
    ls.concrete.assign(ls.states.size(), false);
    ls.enabledBySrc.assign(ls.states.size(), {});
    ls.disabledBySrc.assign(ls.states.size(), {});
    LocalState init;
    init.loc = sk_.initialLocation;
    for (const auto& v : sk_.variables) init.vals.push_back(v.lo);
    ls.s0 = ls.state_index(init);
  }

  // Executes a handler body; returns the post state.
  LocalState exec_body(const std::vector<Stmt>& body, LocalState s, std::optional<int> payload,
                       const std::vector<int>* decided, std::vector<FiredEvent>& fired) {
    for (const auto& stmt : body) exec_stmt(stmt, s, payload, decided, fired);
    return s;
  }

  void exec_stmt(const Stmt& stmt, LocalState& s, std::optional<int> payload,
                 const std::vector<int>* decided, std::vector<FiredEvent>& fired) {
    EvalCtx ctx{&s.vals, s.loc, payload, decided};
    switch (stmt.kind) {
      case StmtKind::Assign: {
        int vi = sk_.var_index(stmt.lhs);
        long long v = eval_expr(p_, stmt.expr, ctx);
        const VarDecl& vd = sk_.variables[(size_t)vi];
        if (v < vd.lo || v > vd.hi) {
          if (expr_has_arith(stmt.expr)) {
            v = std::clamp(v, (long long)vd.lo, (long long)vd.hi);
          } else {
            throw SemanticsError("assignment drives '" + stmt.lhs + "' out of its domain (value " +
                                 std::to_string(v) + ") in location " +
                                 sk_.locations[(size_t)s.loc].name);
          }
        }
        s.vals[(size_t)vi] = (int)v;
        break;
      }
      case StmtKind::Goto:
        s.loc = (int)eval_expr(p_, stmt.expr, ctx);
        break;
      case StmtKind::If: {
        bool cond = eval_expr(p_, stmt.expr, ctx) != 0;
        const auto& body = cond ? stmt.thenBody : stmt.elseBody;
        for (const auto& inner : body) exec_stmt(inner, s, payload, decided, fired);
        break;
      }
      case StmtKind::Send: {
        int ev = event_index(stmt.sendEvent);
        FiredEvent f{ev, std::nullopt};
        if (stmt.sendPayload) f.payload = (int)eval_expr(p_, stmt.sendPayload, ctx);
        fired.push_back(f);
        break;
      }
    }
  }

  int event_index(const std::string& name) const {
    for (size_t i = 0; i < sk_.events.size(); ++i)
      if (sk_.events[i].name == name) return (int)i;
    throw SemanticsError("unknown event '" + name + "'");
  }

  std::vector<std::optional<int>> payload_instances(const EventInfo& ev) const {
    std::vector<std::optional<int>> out;
    if (ev.hasPayload)
      for (int v = ev.payloadLo; v <= ev.payloadHi; ++v) out.emplace_back(v);
    else
      out.emplace_back(std::nullopt);
    return out;
  }

  // All decided sets a consensus handler can observe: nonempty subsets of
  // the round domain up to the cardinality, ascending within a set,
  // ordered by size then lexicographically.
  std::vector<std::vector<int>> decided_sets(const EventInfo& ev) const {
    int k = p_.cardinality(ev);
    std::vector<std::vector<int>> out;
    const auto& dom = ev.roundDomain;
    size_t maxSize = std::min((size_t)std::max(1, k), dom.size());
    std::vector<int> idx;
    for (size_t sz = 1; sz <= maxSize; ++sz) {
      idx.assign(sz, 0);
      for (size_t i = 0; i < sz; ++i) idx[i] = (int)i;
      for (;;) {
        std::vector<int> set;
        for (int i : idx) set.push_back(dom[(size_t)i]);
        out.push_back(std::move(set));
        int pos = (int)sz - 1;
        while (pos >= 0 && idx[(size_t)pos] == (int)(dom.size() - sz + (size_t)pos)) --pos;
        if (pos < 0) break;
        ++idx[(size_t)pos];
        for (size_t i = (size_t)pos + 1; i < sz; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
    return out;
  }

  void explore(LocalSemantics& ls) {
    std::deque<int> frontier;
    ls.reachable[(size_t)ls.s0] = true;
    frontier.push_back(ls.s0);
    while (!frontier.empty()) {
      int si = frontier.front();
      frontier.pop_front();
      const LocalState s = ls.states[(size_t)si];
      const LocationDecl& loc = sk_.locations[(size_t)s.loc];
      for (size_t hi = 0; hi < loc.handlers.size(); ++hi) {
        const Handler& h = loc.handlers[hi];
        bool holeFree = !expr_contains_hole(h.guard) && !expr_contains_hole(h.sendPayload) &&
                        !expr_contains_hole(h.cardinality) && !stmts_contain_hole(h.body) &&
                        !stmts_contain_hole(h.winBody) && !stmts_contain_hole(h.loseBody);
        switch (h.kind) {
          case HandlerKind::Internal: {
            if (!guard_true(h, s, std::nullopt)) {
              add_disabled(ls, si, {ActionLabel::Internal, -1}, (int)hi, std::nullopt);
              break;
            }
            emit(ls, si, {ActionLabel::Internal, -1}, (int)hi, Instance{}, h.body, std::nullopt, nullptr,
                 holeFree, frontier);
            break;
          }
          case HandlerKind::Receive: {
            int ev = event_index(h.eventName);
            bool payloadGuard = expr_reads_payload(h.guard);
            for (const auto& pl : payload_instances(sk_.events[(size_t)ev])) {
              if (!guard_true(h, s, pl)) {
                add_disabled(ls, si, {ActionLabel::React, ev}, (int)hi,
                             payloadGuard ? pl : std::nullopt);
                if (!payloadGuard) break;  // one entry covers all payloads
                continue;
              }
              Instance inst;
              inst.payload = pl;
              emit(ls, si, {ActionLabel::React, ev}, (int)hi, inst, h.body, pl, nullptr, holeFree,
                   frontier);
            }
            break;
          }
          case HandlerKind::SendBroadcast:
          case HandlerKind::SendRendezvous: {
            int ev = event_index(h.eventName);
            if (!guard_true(h, s, std::nullopt)) {
              add_disabled(ls, si, {ActionLabel::Act, ev}, (int)hi, std::nullopt);
              break;
            }
            Instance inst;
            if (h.sendPayload) {
              EvalCtx ctx{&s.vals, s.loc, std::nullopt, nullptr};
              inst.payload = (int)eval_expr(p_, h.sendPayload, ctx);
            }
            emit(ls, si, {ActionLabel::Act, ev}, (int)hi, inst, h.body, inst.payload, nullptr, holeFree,
                 frontier);
            break;
          }
          case HandlerKind::Partition: {
            int ev = event_index(h.eventName);
            if (!guard_true(h, s, std::nullopt)) {
              add_disabled(ls, si, {ActionLabel::Act, ev}, (int)hi, std::nullopt);
              add_disabled(ls, si, {ActionLabel::React, ev}, (int)hi, std::nullopt);
              break;
            }
            emit(ls, si, {ActionLabel::Act, ev}, (int)hi, Instance{}, h.winBody, std::nullopt, nullptr,
                 holeFree, frontier);
            emit(ls, si, {ActionLabel::React, ev}, (int)hi, Instance{}, h.loseBody, std::nullopt, nullptr,
                 holeFree, frontier);
            break;
          }
          case HandlerKind::Consensus: {
            int ev = event_index(h.eventName);
            if (!guard_true(h, s, std::nullopt)) {
              if (!h.proposalVar.empty())
                add_disabled(ls, si, {ActionLabel::Act, ev}, (int)hi, std::nullopt);
              add_disabled(ls, si, {ActionLabel::React, ev}, (int)hi, std::nullopt);
              break;
            }
            bool proposer = !h.proposalVar.empty();
            int own = proposer ? s.vals[(size_t)sk_.var_index(h.proposalVar)] : 0;
            for (const auto& D : decided_sets(sk_.events[(size_t)ev])) {
              bool wins = proposer && std::find(D.begin(), D.end(), own) != D.end();
              Instance inst;
              inst.decided = D;
              emit(ls, si, {wins ? ActionLabel::Act : ActionLabel::React, ev}, (int)hi, inst, h.body,
                   std::nullopt, &D, holeFree, frontier);
            }
            break;
          }
        }
      }
    }
  }

  bool guard_true(const Handler& h, const LocalState& s, std::optional<int> payload) {
    if (!h.guard) return true;
    EvalCtx ctx{&s.vals, s.loc, payload, nullptr};
    return eval_expr(p_, h.guard, ctx) != 0;
  }

  void add_disabled(LocalSemantics& ls, int src, ActionLabel label, int handler,
                    std::optional<int> payload) {
    DisabledTransition d;
    d.id = (int)ls.disabled.size();
    d.src = src;
    d.label = label;
    d.loc = ls.states[(size_t)src].loc;
    d.handler = handler;
    d.payload = payload;
    ls.disabledBySrc[(size_t)src].push_back(d.id);
    ls.disabled.push_back(std::move(d));
  }

  void emit(LocalSemantics& ls, int src, ActionLabel label, int handler, Instance inst,
            const std::vector<Stmt>& body, std::optional<int> payload, const std::vector<int>* decided,
            bool holeFree, std::deque<int>& frontier) {
    std::vector<FiredEvent> fired;
    LocalState dst = exec_body(body, ls.states[(size_t)src], payload, decided, fired);
    int di = ls.state_index(dst);
    LocalTransition t;
    t.id = (int)ls.enabled.size();
    t.src = src;
    t.label = label;
    t.loc = ls.states[(size_t)src].loc;
    t.handler = handler;
    t.inst = std::move(inst);
    t.dst = di;
    t.sketch = holeFree;
    t.fired = std::move(fired);
    ls.enabledBySrc[(size_t)src].push_back(t.id);
    ls.enabled.push_back(std::move(t));
    if (!ls.reachable[(size_t)di]) {
      ls.reachable[(size_t)di] = true;
      frontier.push_back(di);
    }
  }

  void mark_concrete(LocalSemantics& ls) {
    ls.concrete[(size_t)ls.s0] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& t : ls.enabled) {
        if (t.sketch && ls.concrete[(size_t)t.src] && !ls.concrete[(size_t)t.dst]) {
          ls.concrete[(size_t)t.dst] = true;
          changed = true;
        }
      }
    }
  }

  const ConcreteProcess& p_;
  const ProcessSketch& sk_;
  BuildOptions opts_;
};

}  // namespace

int LocalSemantics::state_index(const LocalState& s) const {
  const ProcessSketch& sketch = sk();
  size_t idx = (size_t)s.loc;
  for (size_t v = 0; v < sketch.variables.size(); ++v) {
    size_t domSize = (size_t)(sketch.variables[v].hi - sketch.variables[v].lo + 1);
    idx = idx * domSize + (size_t)(s.vals[v] - sketch.variables[v].lo);
  }
  return (int)idx;
}

std::string LocalSemantics::state_name(int id) const {
  const LocalState& s = states[(size_t)id];
  std::ostringstream os;
  os << sk().locations[(size_t)s.loc].name;
  if (!s.vals.empty()) {
    os << "(";
    for (size_t i = 0; i < s.vals.size(); ++i)
      os << (i ? "," : "") << sk().variables[i].name << "=" << s.vals[i];
    os << ")";
  }
  return os.str();
}

bool LocalSemantics::has_enabled(int src, ActionLabel::Kind k, int event) const {
  for (int id : enabledBySrc[(size_t)src]) {
    const auto& t = enabled[(size_t)id];
    if (t.label.kind == k && t.label.event == event) return true;
  }
  return false;
}

std::vector<int> LocalSemantics::enabled_with_action(int src, ActionLabel::Kind k, int event) const {
  std::vector<int> out;
  for (int id : enabledBySrc[(size_t)src]) {
    const auto& t = enabled[(size_t)id];
    if (t.label.kind == k && t.label.event == event) out.push_back(id);
  }
  return out;
}

std::vector<int> LocalSemantics::disabled_with_action(int src, ActionLabel::Kind k, int event) const {
  std::vector<int> out;
  for (int id : disabledBySrc[(size_t)src]) {
    const auto& d = disabled[(size_t)id];
    if (d.label.kind == k && d.label.event == event) out.push_back(id);
  }
  return out;
}

LocalSemantics build_local_semantics(const ConcreteProcess& p, const BuildOptions& opts) {
  return Builder(p, opts).run();
}

std::string to_dot(const LocalSemantics& ls) {
  std::ostringstream os;
  os << "digraph local {\n  rankdir=LR;\n";
  for (size_t i = 0; i < ls.states.size(); ++i) {
    if (!ls.reachable[i]) continue;
    os << "  s" << i << " [label=\"" << ls.state_name((int)i) << "\""
       << (ls.concrete[i] ? ", penwidth=2" : "") << "];\n";
  }
  auto label = [&](ActionLabel a, const Instance& inst) {
    std::ostringstream l;
    if (a.kind == ActionLabel::Internal)
      l << "tau";
    else
      l << (a.kind == ActionLabel::Act ? "A(" : "R(") << ls.sk().events[(size_t)a.event].name << ")";
    if (inst.payload) l << " p=" << *inst.payload;
    if (!inst.decided.empty()) {
      l << " D={";
      for (size_t i = 0; i < inst.decided.size(); ++i) l << (i ? "," : "") << inst.decided[i];
      l << "}";
    }
    return l.str();
  };
  for (const auto& t : ls.enabled)
    os << "  s" << t.src << " -> s" << t.dst << " [label=\"" << label(t.label, t.inst) << "\"];\n";
  for (const auto& d : ls.disabled) {
    os << "  d" << d.id << " [label=\"\", shape=point];\n";
    Instance inst;
    inst.payload = d.payload;
    os << "  s" << d.src << " -> d" << d.id << " [style=dashed, label=\"" << label(d.label, inst)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace forge
