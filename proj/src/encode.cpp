#include "forge/encode.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <set>

namespace forge {

namespace {

struct SymInt {
  bool isConst = true;
  long long c = 0;
  Term app;
  Term term() const { return isConst ? Term::constant(c) : app; }
};

struct SymCtx {
  const ConcreteProcess* p;
  const std::vector<int>* vals;
  std::optional<int> payload;
  const std::vector<int>* decided;
};

SymInt sym_int(const SymCtx& ctx, const ExprPtr& e);

CPtr sym_bool(const SymCtx& ctx, const ExprPtr& e) {
  const ProcessSketch& sk = *ctx.p->sketch;
  switch (e->kind) {
    case ExprKind::BoolLit:
      return c_bool(e->intValue != 0);
    case ExprKind::Var: {
      int vi = sk.var_index(e->name);
      if (vi < 0) throw SemanticsError("unknown variable '" + e->name + "'");
      return c_bool((*ctx.vals)[(size_t)vi] != 0);
    }
    case ExprKind::Hole: {
      SymInt v = sym_int(ctx, e);
      if (v.isConst) return c_bool(v.c != 0);
      return c_cmp(CmpOp::Eq, v.app, Term::constant(1));
    }
    case ExprKind::Unary:
      if (e->uop == UnOp::Not) return c_not(sym_bool(ctx, e->sub));
      throw SemanticsError("numeric expression in boolean position");
    case ExprKind::Binary: {
      switch (e->bop) {
        case BinOp::And: return c_and({sym_bool(ctx, e->lhs), sym_bool(ctx, e->rhs)});
        case BinOp::Or: return c_or({sym_bool(ctx, e->lhs), sym_bool(ctx, e->rhs)});
        case BinOp::Add:
        case BinOp::Sub:
          throw SemanticsError("numeric expression in boolean position");
        default: {
          SymInt a = sym_int(ctx, e->lhs);
          SymInt b = sym_int(ctx, e->rhs);
          CmpOp op;
          switch (e->bop) {
            case BinOp::Eq: op = CmpOp::Eq; break;
            case BinOp::Ne: op = CmpOp::Ne; break;
            case BinOp::Lt: op = CmpOp::Lt; break;
            case BinOp::Le: op = CmpOp::Le; break;
            case BinOp::Gt: op = CmpOp::Gt; break;
            default: op = CmpOp::Ge; break;
          }
          return c_cmp(op, a.term(), b.term());
        }
      }
    }
    default:
      throw SemanticsError("unsupported expression in boolean position");
  }
}

SymInt sym_int(const SymCtx& ctx, const ExprPtr& e) {
  const ProcessSketch& sk = *ctx.p->sketch;
  SymInt out;
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
      out.c = e->intValue;
      return out;
    case ExprKind::LocLit:
      out.c = sk.location_index(e->name);
      return out;
    case ExprKind::Var: {
      int vi = sk.var_index(e->name);
      if (vi < 0) throw SemanticsError("unknown variable '" + e->name + "'");
      out.c = (*ctx.vals)[(size_t)vi];
      return out;
    }
    case ExprKind::Payload:
      if (!ctx.payload) throw SemanticsError("payload unavailable in encoding context");
      out.c = *ctx.payload;
      return out;
    case ExprKind::DecVar: {
      if (!ctx.decided) throw SemanticsError("decided set unavailable in encoding context");
      size_t idx = (size_t)e->intValue;
      out.c = ctx.decided->at(idx - 1);
      return out;
    }
    case ExprKind::DefaultOf:
      out.c = sk.variables[(size_t)sk.var_index(e->name)].lo;
      return out;
    case ExprKind::Hole: {
      const HoleSignature& sig = ctx.p->sig(e->holeId);
      std::vector<int> args;
      for (const auto& param : sig.params)
        args.push_back((*ctx.vals)[(size_t)sk.var_index(param)]);
      out.isConst = false;
      out.app = Term::apply(sig.id, std::move(args));
      return out;
    }
    case ExprKind::Unary: {
      SymInt v = sym_int(ctx, e->sub);
      if (e->uop == UnOp::Neg && v.isConst) {
        v.c = -v.c;
        return v;
      }
      throw SemanticsError("arithmetic over hole applications is not supported");
    }
    case ExprKind::Binary: {
      SymInt a = sym_int(ctx, e->lhs);
      SymInt b = sym_int(ctx, e->rhs);
      if (!a.isConst || !b.isConst)
        throw SemanticsError("arithmetic over hole applications is not supported");
      switch (e->bop) {
        case BinOp::Add: out.c = a.c + b.c; return out;
        case BinOp::Sub: out.c = a.c - b.c; return out;
        default: throw SemanticsError("comparison in numeric position");
      }
    }
  }
  throw SemanticsError("unsupported expression in numeric position");
}

}  // namespace

Encoder::Encoder(const LocalSemantics& ls, EncodeOptions opts) : ls_(ls), opts_(opts) {}

CPtr Encoder::guard_constraint(int state, int loc, int handler, std::optional<int> payload,
                               bool wantTrue) {
  long long key = ((long long)state << 24) ^ ((long long)loc << 16) ^ ((long long)handler << 8) ^
                  (payload ? (long long)(*payload + 1) << 1 : 0) ^ (wantTrue ? 1 : 0);
  auto it = actionMemo_.find(key);
  if (it != actionMemo_.end()) return it->second;
  const Handler& h = ls_.sk().locations[(size_t)loc].handlers[(size_t)handler];
  CPtr c;
  if (!h.guard) {
    c = c_true();
  } else {
    SymCtx ctx{&ls_.proc, &ls_.states[(size_t)state].vals, payload, nullptr};
    c = simplify(sym_bool(ctx, h.guard));
  }
  if (!wantTrue) c = negate(c);
  c = simplify(c);
  actionMemo_.emplace(key, c);
  return c;
}

CPtr Encoder::has_action(int state, int loc, int handler, std::optional<int> payload) {
  return guard_constraint(state, loc, handler, payload, true);
}

CPtr Encoder::has_no_action(int state, int loc, int handler, std::optional<int> payload) {
  return guard_constraint(state, loc, handler, payload, false);
}

CPtr Encoder::goes_to(const LocalTransition& t) {
  auto it = goesToMemo_.find(t.id);
  if (it != goesToMemo_.end()) return it->second;
  const ProcessSketch& sk = ls_.sk();
  const ConcreteProcess& p = ls_.proc;
  const Handler& h = sk.locations[(size_t)t.loc].handlers[(size_t)t.handler];

  const std::vector<Stmt>* body = &h.body;
  if (h.kind == HandlerKind::Partition)
    body = t.label.kind == ActionLabel::Act ? &h.winBody : &h.loseBody;

  std::vector<CPtr> conj;
  std::vector<int> vals = ls_.states[(size_t)t.src].vals;
  int loc = ls_.states[(size_t)t.src].loc;

  std::function<void(const std::vector<Stmt>&)> exec = [&](const std::vector<Stmt>& stmts) {
    for (const auto& stmt : stmts) {
      SymCtx ctx{&p, &vals, t.inst.payload,
                 t.inst.decided.empty() ? nullptr : &t.inst.decided};
      switch (stmt.kind) {
        case StmtKind::Assign: {
          int vi = sk.var_index(stmt.lhs);
          const VarDecl& vd = sk.variables[(size_t)vi];
          if (stmt.expr->kind == ExprKind::Hole) {
            SymInt v = sym_int(ctx, stmt.expr);
            EvalCtx ec{&vals, loc, t.inst.payload,
                       t.inst.decided.empty() ? nullptr : &t.inst.decided};
            long long actual = eval_expr(p, stmt.expr, ec);
            conj.push_back(c_cmp(CmpOp::Eq, v.app, Term::constant(actual)));
            vals[(size_t)vi] = (int)actual;
          } else {
            EvalCtx ec{&vals, loc, t.inst.payload,
                       t.inst.decided.empty() ? nullptr : &t.inst.decided};
            long long v = eval_expr(p, stmt.expr, ec);
            if (v < vd.lo || v > vd.hi) v = std::clamp(v, (long long)vd.lo, (long long)vd.hi);
            vals[(size_t)vi] = (int)v;
          }
          break;
        }
        case StmtKind::Goto: {
          if (stmt.expr->kind == ExprKind::Hole) {
            SymInt v = sym_int(ctx, stmt.expr);
            EvalCtx ec{&vals, loc, t.inst.payload,
                       t.inst.decided.empty() ? nullptr : &t.inst.decided};
            long long actual = eval_expr(p, stmt.expr, ec);
            conj.push_back(c_cmp(CmpOp::Eq, v.app, Term::constant(actual)));
            loc = (int)actual;
          } else {
            loc = sk.location_index(stmt.expr->name);
          }
          break;
        }
        case StmtKind::If: {
          bool taken;
          if (stmt.expr->kind == ExprKind::Hole) {
            SymInt v = sym_int(ctx, stmt.expr);
            EvalCtx ec{&vals, loc, t.inst.payload,
                       t.inst.decided.empty() ? nullptr : &t.inst.decided};
            taken = eval_expr(p, stmt.expr, ec) != 0;
            conj.push_back(c_cmp(CmpOp::Eq, v.app, Term::constant(taken ? 1 : 0)));
          } else {
            EvalCtx ec{&vals, loc, t.inst.payload,
                       t.inst.decided.empty() ? nullptr : &t.inst.decided};
            taken = eval_expr(p, stmt.expr, ec) != 0;
          }
          exec(taken ? stmt.thenBody : stmt.elseBody);
          break;
        }
        case StmtKind::Send:
          break;
      }
    }
  };
  exec(*body);

  assert(loc == ls_.states[(size_t)t.dst].loc && vals == ls_.states[(size_t)t.dst].vals &&
         "encoding replay diverged from the built transition");

  // local existence of a consensus transition for decided set D needs the
  // cardinality to admit |D|
  if (!t.inst.decided.empty()) {
    const EventInfo& ev = sk.events[(size_t)t.label.event];
    if (ev.cardinality && ev.cardinality->kind == ExprKind::Hole) {
      Term card = Term::apply(ev.cardinality->holeId, {});
      conj.push_back(c_cmp(CmpOp::Ge, card, Term::constant((long long)t.inst.decided.size())));
    }
  }

  CPtr c = simplify(c_and(std::move(conj)));
  goesToMemo_.emplace(t.id, c);
  return c;
}

CPtr Encoder::reaches(int state) {
  auto it = reachesMemo_.find(state);
  if (it != reachesMemo_.end()) return it->second;
  CPtr result;
  if (ls_.concrete[(size_t)state]) {
    result = c_true();
  } else if (!ls_.reachable[(size_t)state]) {
    result = c_false();
  } else {
    // simple paths s0 -> state over enabled transitions
    std::vector<std::vector<int>> paths;
    std::vector<int> cur;
    std::vector<bool> onPath(ls_.states.size(), false);
    bool capped = false;
    std::function<void(int)> dfs = [&](int s) {
      if (capped) return;
      if (s == state) paths.push_back(cur);
      if (paths.size() > opts_.maxPaths) {
        capped = true;
        return;
      }
      onPath[(size_t)s] = true;
      for (int id : ls_.enabledBySrc[(size_t)s]) {
        const auto& t = ls_.enabled[(size_t)id];
        if (onPath[(size_t)t.dst]) continue;
        cur.push_back(id);
        dfs(t.dst);
        cur.pop_back();
        if (capped) break;
      }
      onPath[(size_t)s] = false;
    };
    dfs(ls_.s0);
    if (capped) {
      // fall back to the shortest path: a stronger (sound) encoding
      ++fallbacks_;
      std::deque<int> frontier{ls_.s0};
      std::vector<int> via(ls_.states.size(), -1);
      std::vector<bool> seen(ls_.states.size(), false);
      seen[(size_t)ls_.s0] = true;
      while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop_front();
        if (s == state) break;
        for (int id : ls_.enabledBySrc[(size_t)s]) {
          const auto& t = ls_.enabled[(size_t)id];
          if (seen[(size_t)t.dst]) continue;
          seen[(size_t)t.dst] = true;
          via[(size_t)t.dst] = id;
          frontier.push_back(t.dst);
        }
      }
      std::vector<int> path;
      int s = state;
      while (via[(size_t)s] >= 0) {
        path.push_back(via[(size_t)s]);
        s = ls_.enabled[(size_t)via[(size_t)s]].src;
      }
      std::reverse(path.begin(), path.end());
      paths.assign(1, path);
    }
    std::vector<CPtr> disj;
    for (const auto& path : paths) {
      std::vector<CPtr> conj;
      for (int id : path) {
        const auto& t = ls_.enabled[(size_t)id];
        conj.push_back(has_action(t.src, t.loc, t.handler, t.inst.payload));
        conj.push_back(goes_to(t));
      }
      disj.push_back(c_and(std::move(conj)));
    }
    result = simplify(c_or(std::move(disj)));
  }
  reachesMemo_.emplace(state, result);
  return result;
}

CPtr Encoder::encode_enabled(int transitionId) {
  const auto& t = ls_.enabled[(size_t)transitionId];
  return simplify(c_and({reaches(t.src), has_action(t.src, t.loc, t.handler, t.inst.payload),
                         goes_to(t)}));
}

CPtr Encoder::encode_disabled(int disabledId) {
  const auto& d = ls_.disabled[(size_t)disabledId];
  return simplify(c_and({reaches(d.src), has_no_action(d.src, d.loc, d.handler, d.payload)}));
}

CPtr Encoder::encode_partial(int state, ActionLabel::Kind kind, int event) {
  // any handler for the action may provide it
  const LocationDecl& loc = ls_.sk().locations[(size_t)ls_.states[(size_t)state].loc];
  std::vector<CPtr> disj;
  for (int id : ls_.enabled_with_action(state, kind, event)) {
    const auto& t = ls_.enabled[(size_t)id];
    disj.push_back(has_action(t.src, t.loc, t.handler, t.inst.payload));
  }
  (void)loc;
  return simplify(c_and({reaches(state), c_or(std::move(disj))}));
}

CPtr Encoder::encode_local_cex(const LocalCex& cex) {
  std::vector<CPtr> conj;
  for (int id : cex.enabledSubset) conj.push_back(encode_enabled(id));
  for (int id : cex.disabledSubset) conj.push_back(encode_disabled(id));
  return simplify(c_and(std::move(conj)));
}

CPtr Encoder::encode_global_transition(const GlobalSemantics& gs, int transitionId) {
  const auto& r = gs.transitions[(size_t)transitionId];
  const ProcessSketch& sk = ls_.sk();
  std::vector<CPtr> conj;
  for (const auto& step : r.steps) conj.push_back(encode_enabled(step.transition));
  if (r.event >= 0) {
    const EventInfo& ev = sk.events[(size_t)r.event];
    if (ev.kind == EventKind::Partition || ev.kind == EventKind::Consensus) {
      std::set<int> participants;
      for (const auto& step : r.steps) participants.insert(step.proc);
      for (int j = 0; j < gs.n; ++j) {
        if (participants.count(j)) continue;
        int lsState = gs.states[(size_t)r.src].locals[(size_t)j];
        for (int id : ls_.disabledBySrc[(size_t)lsState])
          if (ls_.disabled[(size_t)id].label.event == r.event)
            conj.push_back(encode_disabled(id));
      }
      if (ev.cardinality && ev.cardinality->kind == ExprKind::Hole) {
        Term card = Term::apply(ev.cardinality->holeId, {});
        if (ev.kind == EventKind::Partition) {
          long long w = (long long)r.winners.size();
          long long np = (long long)r.steps.size();
          conj.push_back(w < np ? c_cmp(CmpOp::Eq, card, Term::constant(w))
                                : c_cmp(CmpOp::Ge, card, Term::constant(np)));
        } else {
          long long d = (long long)r.decided.size();
          long long v = (long long)r.supportSize;
          conj.push_back(d < v ? c_cmp(CmpOp::Eq, card, Term::constant(d))
                               : c_cmp(CmpOp::Ge, card, Term::constant(v)));
        }
      }
    }
  }
  return simplify(c_and(std::move(conj)));
}

CPtr Encoder::encode_global_cex(const GlobalSemantics& gs, const GlobalCex& cex) {
  std::vector<CPtr> conj;
  for (int id : cex.enabledGlobal) conj.push_back(encode_global_transition(gs, id));
  for (const auto& d : cex.disabledFacts)
    for (int f : d.facts) conj.push_back(encode_disabled(f));
  return simplify(c_and(std::move(conj)));
}

}  // namespace forge
