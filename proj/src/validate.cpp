#include <algorithm>
#include <functional>
#include <set>
#include <string>

#include "forge/parser.hpp"

namespace forge {

namespace {

enum class Ty { Bool, Int, Loc, Bad };

class Validator {
 public:
  explicit Validator(const ProcessSketch& sk) : sk_(sk) {}

  std::vector<Diagnostic> run() {
    if (sk_.locations.empty()) {
      diags_.push_back(error_at({}, "process has no locations"));
      return diags_;
    }
    int initials = 0;
    for (const auto& l : sk_.locations)
      if (l.initial) ++initials;
    if (initials != 1 && sk_.initialLocation >= 0)
      diags_.push_back(error_at({}, "exactly one location must be initial"));
    std::set<std::string> names;
    for (const auto& l : sk_.locations)
      if (!names.insert(l.name).second)
        diags_.push_back(error_at(l.span, "duplicate location '" + l.name + "'"));
    names.clear();
    for (const auto& v : sk_.variables)
      if (!names.insert(v.name).second)
        diags_.push_back(error_at(v.span, "duplicate variable '" + v.name + "'"));

    for (const auto& loc : sk_.locations)
      for (const auto& h : loc.handlers) check_handler(h);
    check_round_consistency();
    return diags_;
  }

  void err(SourceSpan sp, std::string m) { diags_.push_back(error_at(sp, std::move(m))); }

  const EventInfo* event(const std::string& n) { return sk_.event(n); }

  void check_handler(const Handler& h) {
    cur_ = &h;
    switch (h.kind) {
      case HandlerKind::Internal:
        break;
      case HandlerKind::Receive: {
        const EventInfo* e = event(h.eventName);
        if (!e)
          err(h.span, "recv of undeclared event '" + h.eventName + "'");
        else if (e->kind != EventKind::Broadcast && e->kind != EventKind::Rendezvous)
          err(h.span, "recv requires a broadcast or rendezvous event");
        break;
      }
      case HandlerKind::SendBroadcast:
      case HandlerKind::SendRendezvous: {
        const EventInfo* e = event(h.eventName);
        bool wantBr = h.kind == HandlerKind::SendBroadcast;
        if (!e) {
          err(h.span, "send of undeclared event '" + h.eventName + "'");
        } else {
          if (e->kind != (wantBr ? EventKind::Broadcast : EventKind::Rendezvous))
            err(h.span, std::string("'") + h.eventName + "' is not a " + (wantBr ? "broadcast" : "rendezvous") +
                            " event");
          if (e->env) err(h.span, "processes cannot act environment event '" + h.eventName + "'");
          if (e->hasPayload && !h.sendPayload)
            err(h.span, "event '" + h.eventName + "' requires a payload");
          if (!e->hasPayload && h.sendPayload)
            err(h.span, "event '" + h.eventName + "' carries no payload");
        }
        if (h.sendPayload) check_expr(h.sendPayload, Ty::Int);
        break;
      }
      case HandlerKind::Partition:
      case HandlerKind::Consensus: {
        check_cardinality(h);
        if (h.kind == HandlerKind::Consensus && !h.proposalVar.empty() &&
            sk_.var_index(h.proposalVar) < 0)
          err(h.span, "proposal variable '" + h.proposalVar + "' is not declared");
        break;
      }
    }
    if (h.guard) check_expr(h.guard, Ty::Bool);
    check_stmts(h.body);
    check_stmts(h.winBody);
    check_stmts(h.loseBody);
    cur_ = nullptr;
  }

  void check_cardinality(const Handler& h) {
    if (!h.cardinality) return;
    if (h.cardinality->kind == ExprKind::IntLit) {
      if (h.cardinality->intValue < 1) err(h.cardinality->span, "cardinality must be >= 1");
    } else if (h.cardinality->kind != ExprKind::Hole) {
      err(h.cardinality->span, "cardinality must be an integer literal or a hole");
    }
  }

  void check_stmts(const std::vector<Stmt>& body) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Assign: {
          int vi = sk_.var_index(s.lhs);
          if (vi < 0) {
            err(s.span, "assignment to undeclared variable '" + s.lhs + "'");
            break;
          }
          check_expr(s.expr, sk_.variables[vi].isBool ? Ty::Bool : Ty::Int);
          break;
        }
        case StmtKind::Goto:
          if (s.expr->kind == ExprKind::LocLit) {
            if (sk_.location_index(s.expr->name) < 0)
              err(s.expr->span, "goto to undeclared location '" + s.expr->name + "'");
          }
          break;
        case StmtKind::If:
          check_expr(s.expr, Ty::Bool);
          check_stmts(s.thenBody);
          check_stmts(s.elseBody);
          break;
        case StmtKind::Send: {
          const EventInfo* e = event(s.sendEvent);
          if (!e)
            err(s.span, "rend of undeclared event '" + s.sendEvent + "'");
          else {
            if (!(e->env && e->kind == EventKind::Rendezvous))
              err(s.span, "rend statements reply to environment rendezvous events only");
            if (e->hasPayload && !s.sendPayload) err(s.span, "event '" + s.sendEvent + "' requires a payload");
            if (!e->hasPayload && s.sendPayload) err(s.span, "event '" + s.sendEvent + "' carries no payload");
          }
          const EventInfo* r = event(s.sendReplyTo);
          if (!r || !r->env)
            err(s.span, "'" + s.sendReplyTo + ".sID' does not name an environment event");
          if (s.sendPayload) check_expr(s.sendPayload, Ty::Int);
          break;
        }
      }
    }
  }

  Ty check_expr(const ExprPtr& e, Ty want) {
    Ty got = type_of(e);
    if (got == Ty::Bad) return got;
    if (want == Ty::Int && got == Ty::Bool && e->kind == ExprKind::Var) {
      // bool variables used in int contexts read as 0/1
      return Ty::Int;
    }
    if (got != want) {
      err(e->span, std::string("expected a ") + (want == Ty::Bool ? "boolean" : "numeric") + " expression");
      return Ty::Bad;
    }
    return got;
  }

  Ty type_of(const ExprPtr& e) {
    switch (e->kind) {
      case ExprKind::IntLit: return Ty::Int;
      case ExprKind::BoolLit: return Ty::Bool;
      case ExprKind::LocLit: return Ty::Loc;
      case ExprKind::Var: {
        int vi = sk_.var_index(e->name);
        if (vi < 0) {
          err(e->span, "reference to undeclared variable '" + e->name + "'");
          return Ty::Bad;
        }
        return sk_.variables[vi].isBool ? Ty::Bool : Ty::Int;
      }
      case ExprKind::Payload: {
        const EventInfo* ev = event(e->name);
        if (!ev || !ev->hasPayload) {
          err(e->span, "'" + e->name + ".payld' does not name a payload-carrying event");
          return Ty::Bad;
        }
        if (!cur_ || cur_->kind != HandlerKind::Receive || cur_->eventName != e->name)
          err(e->span, "'" + e->name + ".payld' is only readable inside recv(" + e->name + ") handlers");
        return Ty::Int;
      }
      case ExprKind::DecVar: {
        const EventInfo* ev = event(e->name);
        if (!ev || ev->kind != EventKind::Consensus) {
          err(e->span, "'" + e->name + ".decVar' does not name a consensus round");
          return Ty::Bad;
        }
        if (!cur_ || cur_->kind != HandlerKind::Consensus || cur_->eventName != e->name)
          err(e->span, "'" + e->name + ".decVar' is only readable inside its consensus handler");
        if (e->intValue < 1) err(e->span, "decVar index is 1-based");
        return Ty::Int;
      }
      case ExprKind::DefaultOf:
        if (sk_.var_index(e->name) < 0) {
          err(e->span, "default() of undeclared variable '" + e->name + "'");
          return Ty::Bad;
        }
        return Ty::Int;
      case ExprKind::Hole: {
        const HoleSignature* sig = sk_.hole(e->holeId);
        if (!sig) return Ty::Bad;  // inference already reported
        switch (sig->retKind) {
          case HoleRet::Bool: return Ty::Bool;
          case HoleRet::Loc: return Ty::Loc;
          default: return Ty::Int;
        }
      }
      case ExprKind::Unary:
        if (e->uop == UnOp::Not) {
          check_expr(e->sub, Ty::Bool);
          return Ty::Bool;
        }
        check_expr(e->sub, Ty::Int);
        return Ty::Int;
      case ExprKind::Binary: {
        switch (e->bop) {
          case BinOp::And:
          case BinOp::Or:
            check_expr(e->lhs, Ty::Bool);
            check_expr(e->rhs, Ty::Bool);
            return Ty::Bool;
          case BinOp::Eq:
          case BinOp::Ne: {
            Ty a = type_of(e->lhs);
            Ty b = type_of(e->rhs);
            if (a != Ty::Bad && b != Ty::Bad && a != b &&
                !(a != Ty::Loc && b != Ty::Loc))  // int/bool mixing tolerated
              err(e->span, "type mismatch in comparison");
            return Ty::Bool;
          }
          case BinOp::Lt:
          case BinOp::Le:
          case BinOp::Gt:
          case BinOp::Ge:
            check_expr(e->lhs, Ty::Int);
            check_expr(e->rhs, Ty::Int);
            return Ty::Bool;
          case BinOp::Add:
          case BinOp::Sub:
            check_expr(e->lhs, Ty::Int);
            check_expr(e->rhs, Ty::Int);
            return Ty::Int;
        }
        return Ty::Bad;
      }
    }
    return Ty::Bad;
  }

  // All handlers of one round id must agree on cardinality and kind.
  void check_round_consistency() {
    for (const auto& ev : sk_.events) {
      if (ev.kind != EventKind::Partition && ev.kind != EventKind::Consensus) continue;
      const Handler* first = nullptr;
      for (const auto& loc : sk_.locations) {
        for (const auto& h : loc.handlers) {
          if ((h.kind != HandlerKind::Partition && h.kind != HandlerKind::Consensus) ||
              h.eventName != ev.name)
            continue;
          if (!first) {
            first = &h;
            continue;
          }
          bool same;
          if (first->cardinality->kind == ExprKind::IntLit && h.cardinality->kind == ExprKind::IntLit)
            same = first->cardinality->intValue == h.cardinality->intValue;
          else if (first->cardinality->kind == ExprKind::Hole && h.cardinality->kind == ExprKind::Hole)
            same = first->cardinality->holeId == h.cardinality->holeId;
          else
            same = false;
          if (!same) err(h.span, "round '" + ev.name + "' declared with conflicting cardinalities");
        }
      }
    }
  }

  const ProcessSketch& sk_;
  const Handler* cur_ = nullptr;
  std::vector<Diagnostic> diags_;
};

// Normalizes and checks a spec predicate against the sketch:
// `loc` compares against location names; variables must be declared.
ExprPtr normalize_pred(const ProcessSketch& sk, const ExprPtr& e, std::vector<Diagnostic>& diags) {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::Binary: {
      if ((e->bop == BinOp::Eq || e->bop == BinOp::Ne)) {
        bool lhsLoc = e->lhs->kind == ExprKind::Var && e->lhs->name == "loc";
        bool rhsLoc = e->rhs->kind == ExprKind::Var && e->rhs->name == "loc";
        if (lhsLoc || rhsLoc) {
          ExprPtr other = lhsLoc ? e->rhs : e->lhs;
          if (other->kind == ExprKind::LocLit) {  // already normalized
            if (sk.location_index(other->name) < 0)
              diags.push_back(error_at(other->span, "unknown location '" + other->name + "'"));
            return e;
          }
          if (other->kind != ExprKind::Var || sk.location_index(other->name) < 0) {
            diags.push_back(error_at(other->span, "'loc' must be compared against a declared location"));
            return e;
          }
          auto locLit = std::make_shared<Expr>();
          locLit->kind = ExprKind::LocLit;
          locLit->span = other->span;
          locLit->name = other->name;
          auto locVar = make_var("loc", (lhsLoc ? e->lhs : e->rhs)->span);
          return make_binary(e->bop, locVar, locLit, e->span);
        }
      }
      return make_binary(e->bop, normalize_pred(sk, e->lhs, diags), normalize_pred(sk, e->rhs, diags),
                         e->span);
    }
    case ExprKind::Unary:
      return make_unary(e->uop, normalize_pred(sk, e->sub, diags), e->span);
    case ExprKind::Var:
      if (e->name != "loc" && sk.var_index(e->name) < 0)
        diags.push_back(error_at(e->span, "spec references undeclared variable '" + e->name + "'"));
      return e;
    case ExprKind::Hole:
      diags.push_back(error_at(e->span, "holes are not allowed in specifications"));
      return e;
    default:
      return e;
  }
}

void check_fired(const ProcessSketch& sk, const std::string& ev, SourceSpan sp,
                 std::vector<Diagnostic>& diags) {
  if (!sk.event(ev)) diags.push_back(error_at(sp, "fired() of undeclared event '" + ev + "'"));
}

PropPtr normalize_prop(const ProcessSketch& sk, const PropPtr& p, std::vector<Diagnostic>& diags) {
  if (!p) return p;
  auto out = std::make_shared<Prop>(*p);
  switch (p->kind) {
    case PropKind::Count:
      out->atom.predicate = normalize_pred(sk, p->atom.predicate, diags);
      break;
    case PropKind::Fired:
      check_fired(sk, p->event, p->span, diags);
      break;
    case PropKind::And:
    case PropKind::Or:
      out->lhs = normalize_prop(sk, p->lhs, diags);
      out->rhs = normalize_prop(sk, p->rhs, diags);
      break;
    case PropKind::Not:
      out->sub = normalize_prop(sk, p->sub, diags);
      break;
    case PropKind::True:
      break;
  }
  return out;
}

}  // namespace

std::vector<Diagnostic> validate_sketch(const ProcessSketch& sketch) {
  return Validator(sketch).run();
}

std::vector<Diagnostic> validate(const ProcessSketch& sketch, SpecSuite& spec) {
  std::vector<Diagnostic> diags = Validator(sketch).run();
  for (auto& line : spec.safety) {
    for (auto& atom : line.atoms) {
      atom.predicate = normalize_pred(sketch, atom.predicate, diags);
      if (atom.threshold < 1)
        diags.push_back(error_at(atom.span, "count threshold must be >= 1"));
    }
  }
  for (auto& line : spec.liveness) {
    line.p = normalize_prop(sketch, line.p, diags);
    line.q = normalize_prop(sketch, line.q, diags);
  }
  return diags;
}

}  // namespace forge
