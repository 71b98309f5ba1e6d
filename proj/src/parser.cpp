#include "forge/parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace forge {

std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream os;
  os << (d.severity == Severity::Error ? "error" : "warning") << " at " << d.span.begin.line << ":"
     << d.span.begin.col << ": " << d.message;
  return os.str();
}

namespace {

struct ParseBail {};

class SketchParser {
 public:
  SketchParser(const std::string& text, int maxCard) : lx_(text), maxCard_(maxCard) {}

  SketchParseResult run() {
    SketchParseResult r;
    try {
      parse_process(r.sketch);
    } catch (ParseBail&) {
      // diagnostics already recorded
    }
    r.diagnostics = std::move(diags_);
    if (!has_errors(r.diagnostics)) infer_holes(r.sketch, r.diagnostics);
    if (!has_errors(r.diagnostics)) resolve_events(r.sketch, r.diagnostics);
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    diags_.push_back(error_at(lx_.peek().span, msg));
    throw ParseBail{};
  }

  Token expect(Tok k, const char* what) {
    if (!lx_.at(k)) fail(std::string("expected ") + what);
    return lx_.take();
  }

  void expect_word(const char* w) {
    if (!lx_.at_word(w)) fail(std::string("expected '") + w + "'");
    lx_.take();
  }

  bool eat_word(const char* w) {
    if (lx_.at_word(w)) {
      lx_.take();
      return true;
    }
    return false;
  }

  std::string ident(const char* what) {
    if (!lx_.at(Tok::Ident)) fail(std::string("expected ") + what);
    return lx_.take().text;
  }

  void parse_process(ProcessSketch& sk) {
    expect_word("process");
    sk.name = ident("process name");
    while (!lx_.at(Tok::End)) {
      if (lx_.at_word("variables")) {
        lx_.take();
        parse_variables(sk);
      } else if (lx_.at_word("events")) {
        lx_.take();
        parse_events(sk);
      } else if (lx_.at_word("initial") || lx_.at_word("location")) {
        parse_location(sk);
      } else {
        fail("expected 'variables', 'events', or a location");
      }
    }
    if (sk.initialLocation < 0 && !sk.locations.empty())
      diags_.push_back(error_at({}, "no location is marked initial"));
  }

  void parse_variables(ProcessSketch& sk) {
    while (lx_.at_word("int") || lx_.at_word("bool")) {
      VarDecl v;
      v.span = lx_.peek().span;
      if (eat_word("bool")) {
        v.isBool = true;
        v.lo = 0;
        v.hi = 1;
      } else {
        lx_.take();
        expect(Tok::LBracket, "'['");
        v.lo = (int)expect(Tok::Int, "integer").value;
        expect(Tok::Comma, "','");
        v.hi = (int)expect(Tok::Int, "integer").value;
        expect(Tok::RBracket, "']'");
        if (v.lo > v.hi) fail("empty variable range");
      }
      v.name = ident("variable name");
      sk.variables.push_back(std::move(v));
    }
  }

  void parse_events(ProcessSketch& sk) {
    for (;;) {
      bool env = lx_.at_word("env");
      if (env) {
        lx_.take();
        if (!lx_.at_word("rz") && !lx_.at_word("br")) fail("expected 'rz' or 'br' after 'env'");
      }
      if (!lx_.at_word("rz") && !lx_.at_word("br")) break;
      EventDecl e;
      e.span = lx_.peek().span;
      e.kind = lx_.at_word("rz") ? EventKind::Rendezvous : EventKind::Broadcast;
      lx_.take();
      e.env = env;
      e.name = ident("event name");
      if (lx_.at(Tok::Colon)) {
        lx_.take();
        expect_word("int");
        expect(Tok::LBracket, "'['");
        e.payloadLo = (int)expect(Tok::Int, "integer").value;
        expect(Tok::Comma, "','");
        e.payloadHi = (int)expect(Tok::Int, "integer").value;
        expect(Tok::RBracket, "']'");
        e.hasPayload = true;
        if (e.payloadLo > e.payloadHi) fail("empty payload range");
      }
      sk.eventDecls.push_back(std::move(e));
    }
  }

  void parse_location(ProcessSketch& sk) {
    LocationDecl loc;
    loc.span = lx_.peek().span;
    if (eat_word("initial")) loc.initial = true;
    expect_word("location");
    loc.name = ident("location name");
    while (lx_.at_word("on")) {
      lx_.take();
      loc.handlers.push_back(parse_handler());
    }
    if (loc.initial) {
      if (sk.initialLocation >= 0)
        diags_.push_back(error_at(loc.span, "more than one initial location"));
      sk.initialLocation = (int)sk.locations.size();
    }
    sk.locations.push_back(std::move(loc));
  }

  Handler parse_handler() {
    Handler h;
    h.span = lx_.peek().span;
    if (lx_.at(Tok::Underscore)) {
      lx_.take();
      h.kind = HandlerKind::Internal;
    } else if (eat_word("recv")) {
      h.kind = HandlerKind::Receive;
      expect(Tok::LParen, "'('");
      h.eventName = ident("event name");
      expect(Tok::RParen, "')'");
    } else if (lx_.at_word("bcast") || lx_.at_word("rend")) {
      h.kind = lx_.peek().text == "rend" ? HandlerKind::SendRendezvous : HandlerKind::SendBroadcast;
      lx_.take();
      expect(Tok::LParen, "'('");
      h.eventName = ident("event name");
      if (lx_.at(Tok::LBracket)) {
        lx_.take();
        h.sendPayload = parse_expr();
        expect(Tok::RBracket, "']'");
      }
      expect(Tok::RParen, "')'");
    } else if (lx_.at_word("partition") || lx_.at_word("consensus")) {
      bool cons = lx_.peek().text == "consensus";
      lx_.take();
      h.kind = cons ? HandlerKind::Consensus : HandlerKind::Partition;
      expect(Tok::Lt, "'<'");
      h.eventName = ident("round id");
      expect(Tok::Gt, "'>'");
      expect(Tok::LParen, "'('");
      expect_word("All");
      expect(Tok::Comma, "','");
      h.cardinality = parse_expr();
      if (cons) {
        expect(Tok::Comma, "','");
        if (lx_.at(Tok::Underscore)) {
          lx_.take();
          h.proposalVar = "";
        } else {
          h.proposalVar = ident("proposal variable");
        }
      }
      expect(Tok::RParen, "')'");
    } else {
      fail("expected handler head (_ / recv / bcast / rend / partition / consensus)");
    }

    if (eat_word("when")) h.guard = parse_expr();

    if (h.kind == HandlerKind::Partition) {
      expect_word("win");
      expect(Tok::Colon, "':'");
      h.winBody = parse_stmts();
      expect_word("lose");
      expect(Tok::Colon, "':'");
      h.loseBody = parse_stmts();
    } else if (eat_word("do")) {
      h.body = parse_stmts();
    }
    return h;
  }

  bool at_stmt_start() {
    if (lx_.at_word("goto") || lx_.at_word("if") || lx_.at_word("rend")) return true;
    if (lx_.at(Tok::Ident)) {
      const std::string& w = lx_.peek().text;
      // keywords that terminate a statement list
      static const std::set<std::string> stop = {"on", "location", "initial", "lose", "win",
                                                 "process", "variables", "events", "else"};
      return stop.find(w) == stop.end();
    }
    return false;
  }

  std::vector<Stmt> parse_stmts() {
    std::vector<Stmt> out;
    while (at_stmt_start()) out.push_back(parse_stmt());
    return out;
  }

  std::vector<Stmt> parse_block() {
    if (lx_.at(Tok::LBrace)) {
      lx_.take();
      std::vector<Stmt> out;
      while (!lx_.at(Tok::RBrace)) {
        if (lx_.at(Tok::End)) fail("unterminated '{' block");
        out.push_back(parse_stmt());
      }
      lx_.take();
      return out;
    }
    std::vector<Stmt> out;
    out.push_back(parse_stmt());
    return out;
  }

  Stmt parse_stmt() {
    Stmt s;
    s.span = lx_.peek().span;
    if (eat_word("goto")) {
      s.kind = StmtKind::Goto;
      if (lx_.at(Tok::HoleMark)) {
        s.expr = parse_hole();
      } else {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::LocLit;
        e->span = lx_.peek().span;
        e->name = ident("location name");
        s.expr = e;
      }
    } else if (eat_word("if")) {
      s.kind = StmtKind::If;
      expect(Tok::LParen, "'('");
      s.expr = parse_expr();
      expect(Tok::RParen, "')'");
      s.thenBody = parse_block();
      if (eat_word("else")) {
        if (lx_.at_word("if")) {
          s.elseBody.push_back(parse_stmt());
        } else {
          s.elseBody = parse_block();
        }
      }
    } else if (eat_word("rend")) {
      s.kind = StmtKind::Send;
      expect(Tok::LParen, "'('");
      s.sendEvent = ident("event name");
      if (lx_.at(Tok::LBracket)) {
        lx_.take();
        s.sendPayload = parse_expr();
        expect(Tok::RBracket, "']'");
      }
      expect(Tok::Comma, "','");
      s.sendReplyTo = ident("reply event name");
      expect(Tok::Dot, "'.'");
      expect_word("sID");
      expect(Tok::RParen, "')'");
    } else {
      s.kind = StmtKind::Assign;
      s.lhs = ident("statement");
      expect(Tok::Assign, "':='");
      s.expr = parse_expr();
    }
    return s;
  }

  ExprPtr parse_hole() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Hole;
    e->span = lx_.peek().span;
    e->holeId = (int)expect(Tok::HoleMark, "hole").value;
    if (lx_.at(Tok::LParen)) {
      lx_.take();
      e->explicitParams = true;
      if (!lx_.at(Tok::RParen)) {
        e->params.push_back(ident("parameter name"));
        while (lx_.at(Tok::Comma)) {
          lx_.take();
          e->params.push_back(ident("parameter name"));
        }
      }
      expect(Tok::RParen, "')'");
    }
    if (lx_.at_word("in")) {
      lx_.take();
      expect(Tok::LBracket, "'['");
      int lo = (int)expect(Tok::Int, "integer").value;
      expect(Tok::Comma, "','");
      int hi = (int)expect(Tok::Int, "integer").value;
      expect(Tok::RBracket, "']'");
      // stored temporarily on the expr; consumed by hole inference
      auto m = std::make_shared<Expr>(*e);
      m->intValue = ((long long)lo << 32) | (unsigned)hi;
      m->name = "__range";
      return m;
    }
    return e;
  }

  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    auto l = parse_and();
    while (lx_.at_word("or")) {
      auto sp = lx_.take().span;
      l = make_binary(BinOp::Or, l, parse_and(), sp);
    }
    return l;
  }

  ExprPtr parse_and() {
    auto l = parse_not();
    while (lx_.at_word("and")) {
      auto sp = lx_.take().span;
      l = make_binary(BinOp::And, l, parse_not(), sp);
    }
    return l;
  }

  ExprPtr parse_not() {
    if (lx_.at_word("not")) {
      auto sp = lx_.take().span;
      return make_unary(UnOp::Not, parse_not(), sp);
    }
    return parse_cmp();
  }

  ExprPtr parse_cmp() {
    auto l = parse_add();
    BinOp op;
    switch (lx_.peek().kind) {
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return l;
    }
    auto sp = lx_.take().span;
    return make_binary(op, l, parse_add(), sp);
  }

  ExprPtr parse_add() {
    auto l = parse_primary();
    for (;;) {
      if (lx_.at(Tok::Plus)) {
        auto sp = lx_.take().span;
        l = make_binary(BinOp::Add, l, parse_primary(), sp);
      } else if (lx_.at(Tok::Minus)) {
        auto sp = lx_.take().span;
        l = make_binary(BinOp::Sub, l, parse_primary(), sp);
      } else {
        return l;
      }
    }
  }

  ExprPtr parse_primary() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::Int: {
        auto tk = lx_.take();
        return make_int(tk.value, tk.span);
      }
      case Tok::Minus: {
        auto sp = lx_.take().span;
        return make_unary(UnOp::Neg, parse_primary(), sp);
      }
      case Tok::HoleMark:
        return parse_hole();
      case Tok::LParen: {
        lx_.take();
        auto e = parse_expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") {
          auto tk = lx_.take();
          return make_bool(tk.text == "true", tk.span);
        }
        if (t.text == "default") {
          auto sp = lx_.take().span;
          expect(Tok::LParen, "'('");
          auto e = std::make_shared<Expr>();
          e->kind = ExprKind::DefaultOf;
          e->span = sp;
          e->name = ident("variable name");
          expect(Tok::RParen, "')'");
          return e;
        }
        auto tk = lx_.take();
        if (lx_.at(Tok::Dot)) {
          lx_.take();
          auto e = std::make_shared<Expr>();
          e->span = tk.span;
          e->name = tk.text;
          if (eat_word("payld")) {
            e->kind = ExprKind::Payload;
          } else if (eat_word("decVar")) {
            e->kind = ExprKind::DecVar;
            expect(Tok::LBracket, "'['");
            e->intValue = expect(Tok::Int, "index").value;
            expect(Tok::RBracket, "']'");
          } else {
            fail("expected 'payld' or 'decVar' after '.'");
          }
          return e;
        }
        return make_var(tk.text, tk.span);
      }
      case Tok::Error:
        fail(t.text);
      default:
        fail("expected expression");
    }
  }

  // --- hole signature inference -------------------------------------------

  struct HoleSite {
    int id;
    HolePos pos;
    const Expr* expr;
    std::string assignedVar;  // AssignRhs
    SourceSpan span;
  };

  void collect_expr_holes(const ExprPtr& e, std::vector<const Expr*>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Hole) out.push_back(e.get());
    collect_expr_holes(e->lhs, out);
    collect_expr_holes(e->rhs, out);
    collect_expr_holes(e->sub, out);
  }

  void scan_stmts(const std::vector<Stmt>& body, std::vector<HoleSite>& sites,
                  std::vector<const Expr*>& nested) {
    for (const auto& s : body) {
      switch (s.kind) {
        case StmtKind::Assign:
          if (s.expr->kind == ExprKind::Hole) {
            sites.push_back({s.expr->holeId, HolePos::AssignRhs, s.expr.get(), s.lhs, s.expr->span});
          } else {
            collect_expr_holes(s.expr, nested);
          }
          break;
        case StmtKind::Goto:
          if (s.expr->kind == ExprKind::Hole) {
            sites.push_back({s.expr->holeId, HolePos::GotoTarget, s.expr.get(), "", s.expr->span});
          }
          break;
        case StmtKind::If:
          if (s.expr->kind == ExprKind::Hole) {
            sites.push_back({s.expr->holeId, HolePos::IfCondition, s.expr.get(), "", s.expr->span});
          } else {
            collect_expr_holes(s.expr, nested);
          }
          scan_stmts(s.thenBody, sites, nested);
          scan_stmts(s.elseBody, sites, nested);
          break;
        case StmtKind::Send:
          collect_expr_holes(s.sendPayload, nested);
          break;
      }
    }
  }

  void infer_holes(ProcessSketch& sk, std::vector<Diagnostic>& diags) {
    std::vector<HoleSite> sites;
    std::vector<const Expr*> nested;
    for (const auto& loc : sk.locations) {
      for (const auto& h : loc.handlers) {
        if (h.guard) {
          if (h.guard->kind == ExprKind::Hole)
            sites.push_back({h.guard->holeId, HolePos::GuardCondition, h.guard.get(), "", h.guard->span});
          else
            collect_expr_holes(h.guard, nested);
        }
        if (h.cardinality) {
          if (h.cardinality->kind == ExprKind::Hole)
            sites.push_back(
                {h.cardinality->holeId, HolePos::Cardinality, h.cardinality.get(), "", h.cardinality->span});
          else
            collect_expr_holes(h.cardinality, nested);
        }
        collect_expr_holes(h.sendPayload, nested);
        scan_stmts(h.body, sites, nested);
        scan_stmts(h.winBody, sites, nested);
        scan_stmts(h.loseBody, sites, nested);
      }
    }
    for (const Expr* e : nested)
      diags.push_back(error_at(e->span, "hole ??" + std::to_string(e->holeId) +
                                            " in an unsupported position (holes must stand alone as a "
                                            "guard, condition, goto target, assignment rhs, or cardinality)"));

    std::set<int> seen;
    for (const auto& site : sites) {
      if (!seen.insert(site.id).second) {
        diags.push_back(error_at(site.span,
                                 "duplicate hole id ??" + std::to_string(site.id) +
                                     " (each hole must occur at exactly one position)"));
        continue;
      }
      HoleSignature sig;
      sig.id = site.id;
      sig.pos = site.pos;
      sig.span = site.span;
      if (site.expr->explicitParams) {
        sig.params = site.expr->params;
        if (site.pos == HolePos::Cardinality && !sig.params.empty())
          diags.push_back(error_at(site.span, "cardinality holes take no parameters"));
      } else if (site.pos != HolePos::Cardinality) {
        for (const auto& v : sk.variables) sig.params.push_back(v.name);
      }
      for (const auto& p : sig.params) {
        int vi = sk.var_index(p);
        if (vi < 0) {
          diags.push_back(error_at(site.span, "hole parameter '" + p + "' is not a declared variable"));
          continue;
        }
        std::vector<int> dom;
        for (int v = sk.variables[vi].lo; v <= sk.variables[vi].hi; ++v) dom.push_back(v);
        sig.paramDomains.push_back(std::move(dom));
      }
      switch (site.pos) {
        case HolePos::GuardCondition:
        case HolePos::IfCondition:
          sig.retKind = HoleRet::Bool;
          sig.returnDomain = {0, 1};
          break;
        case HolePos::GotoTarget:
          sig.retKind = HoleRet::Loc;
          for (size_t i = 0; i < sk.locations.size(); ++i) sig.returnDomain.push_back((int)i);
          break;
        case HolePos::AssignRhs: {
          int vi = sk.var_index(site.assignedVar);
          if (vi < 0) {
            diags.push_back(error_at(site.span, "assignment to undeclared variable '" + site.assignedVar + "'"));
            sig.retKind = HoleRet::Int;
          } else {
            sig.retKind = sk.variables[vi].isBool ? HoleRet::Bool : HoleRet::Int;
            for (int v = sk.variables[vi].lo; v <= sk.variables[vi].hi; ++v) sig.returnDomain.push_back(v);
          }
          break;
        }
        case HolePos::Cardinality: {
          sig.retKind = HoleRet::Card;
          int lo = 1, hi = maxCard_;
          if (site.expr->name == "__range") {
            lo = (int)(site.expr->intValue >> 32);
            hi = (int)(site.expr->intValue & 0xffffffff);
          }
          for (int v = lo; v <= hi; ++v) sig.returnDomain.push_back(v);
          break;
        }
      }
      if (sig.returnDomain.empty())
        diags.push_back(error_at(site.span, "hole ??" + std::to_string(sig.id) + " has an empty return domain"));
      sk.holes.push_back(std::move(sig));
    }
    std::sort(sk.holes.begin(), sk.holes.end(),
              [](const HoleSignature& a, const HoleSignature& b) { return a.id < b.id; });
  }

  // Builds the resolved event table: declared comm events + agreement rounds.
  void resolve_events(ProcessSketch& sk, std::vector<Diagnostic>& diags) {
    std::map<std::string, EventInfo> evs;
    for (const auto& d : sk.eventDecls) {
      EventInfo e;
      e.name = d.name;
      e.kind = d.kind;
      e.env = d.env;
      e.hasPayload = d.hasPayload;
      e.payloadLo = d.payloadLo;
      e.payloadHi = d.payloadHi;
      if (!evs.emplace(d.name, e).second)
        diags.push_back(error_at(d.span, "duplicate event declaration '" + d.name + "'"));
    }
    for (const auto& loc : sk.locations) {
      for (const auto& h : loc.handlers) {
        if (h.kind != HandlerKind::Partition && h.kind != HandlerKind::Consensus) continue;
        EventKind k = h.kind == HandlerKind::Partition ? EventKind::Partition : EventKind::Consensus;
        auto it = evs.find(h.eventName);
        if (it == evs.end()) {
          EventInfo e;
          e.name = h.eventName;
          e.kind = k;
          e.cardinality = h.cardinality;
          evs.emplace(h.eventName, e);
        } else if (it->second.kind != k) {
          diags.push_back(error_at(h.span, "round id '" + h.eventName + "' used with conflicting kinds"));
        }
        if (k == EventKind::Consensus && !h.proposalVar.empty()) {
          int vi = sk.var_index(h.proposalVar);
          if (vi >= 0) {
            auto& dom = evs[h.eventName].roundDomain;
            for (int v = sk.variables[vi].lo; v <= sk.variables[vi].hi; ++v)
              if (std::find(dom.begin(), dom.end(), v) == dom.end()) dom.push_back(v);
          }
        }
      }
    }
    for (auto& [name, e] : evs) {
      std::sort(e.roundDomain.begin(), e.roundDomain.end());
      sk.events.push_back(e);
    }
    std::sort(sk.events.begin(), sk.events.end(),
              [](const EventInfo& a, const EventInfo& b) { return a.name < b.name; });
  }

  Lexer lx_;
  int maxCard_;
  std::vector<Diagnostic> diags_;
};

// --- spec parser -----------------------------------------------------------

class SpecParser {
 public:
  explicit SpecParser(const std::string& text) : lx_(text) {}

  SpecParseResult run() {
    SpecParseResult r;
    try {
      while (!lx_.at(Tok::End)) {
        if (lx_.at_word("safety")) {
          lx_.take();
          r.suite.safety.push_back(parse_safety());
        } else if (lx_.at_word("liveness")) {
          lx_.take();
          r.suite.liveness.push_back(parse_liveness());
        } else {
          fail("expected 'safety' or 'liveness'");
        }
      }
    } catch (ParseBail&) {
    }
    r.diagnostics = std::move(diags_);
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    diags_.push_back(error_at(lx_.peek().span, msg));
    throw ParseBail{};
  }

  Token expect(Tok k, const char* what) {
    if (!lx_.at(k)) fail(std::string("expected ") + what);
    return lx_.take();
  }

  void expect_word(const char* w) {
    if (!lx_.at_word(w)) fail(std::string("expected '") + w + "'");
    lx_.take();
  }

  SafetyLine parse_safety() {
    SafetyLine line;
    line.span = lx_.peek().span;
    line.name = expect(Tok::Ident, "safety line name").text;
    expect(Tok::Colon, "':'");
    expect_word("never");
    line.atoms.push_back(parse_count_atom());
    while (lx_.at_word("and")) {
      lx_.take();
      line.atoms.push_back(parse_count_atom());
    }
    return line;
  }

  CountAtom parse_count_atom() {
    CountAtom a;
    a.span = lx_.peek().span;
    a.threshold = (int)expect(Tok::Int, "count threshold").value;
    if (a.threshold < 1) fail("count threshold must be >= 1");
    expect_word("at");
    expect(Tok::LParen, "'('");
    a.predicate = parse_pred();
    expect(Tok::RParen, "')'");
    return a;
  }

  LivenessLine parse_liveness() {
    LivenessLine line;
    line.span = lx_.peek().span;
    line.name = expect(Tok::Ident, "liveness line name").text;
    expect(Tok::Colon, "':'");
    if (lx_.at_word("eventually")) {
      lx_.take();
      line.tmpl = LivenessTemplate::Eventually;
      line.p = parse_prop();
    } else if (lx_.at_word("always")) {
      lx_.take();
      line.tmpl = LivenessTemplate::AlwaysImplies;
      line.p = parse_prop();
      expect_word("implies");
      expect_word("eventually");
      line.q = parse_prop();
    } else {
      fail("expected 'eventually' or 'always'");
    }
    return line;
  }

  PropPtr parse_prop() { return parse_prop_or(); }

  PropPtr parse_prop_or() {
    auto l = parse_prop_and();
    while (lx_.at_word("or")) {
      auto sp = lx_.take().span;
      auto p = std::make_shared<Prop>();
      p->kind = PropKind::Or;
      p->span = sp;
      p->lhs = l;
      p->rhs = parse_prop_and();
      l = p;
    }
    return l;
  }

  PropPtr parse_prop_and() {
    auto l = parse_prop_atom();
    while (lx_.at_word("and")) {
      auto sp = lx_.take().span;
      auto p = std::make_shared<Prop>();
      p->kind = PropKind::And;
      p->span = sp;
      p->lhs = l;
      p->rhs = parse_prop_atom();
      l = p;
    }
    return l;
  }

  PropPtr parse_prop_atom() {
    auto p = std::make_shared<Prop>();
    p->span = lx_.peek().span;
    if (lx_.at_word("fired")) {
      lx_.take();
      expect(Tok::LParen, "'('");
      p->kind = PropKind::Fired;
      p->event = expect(Tok::Ident, "event name").text;
      expect(Tok::RParen, "')'");
      return p;
    }
    if (lx_.at_word("not")) {
      lx_.take();
      p->kind = PropKind::Not;
      p->sub = parse_prop_atom();
      return p;
    }
    if (lx_.at(Tok::LParen)) {
      lx_.take();
      auto inner = parse_prop();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (lx_.at_word("true")) {
      lx_.take();
      p->kind = PropKind::True;
      return p;
    }
    p->kind = PropKind::Count;
    p->atom = parse_count_atom();
    return p;
  }

  // Predicates reuse the expression grammar, without holes.
  ExprPtr parse_pred() { return parse_or(); }

  ExprPtr parse_or() {
    auto l = parse_and();
    while (lx_.at_word("or")) {
      auto sp = lx_.take().span;
      l = make_binary(BinOp::Or, l, parse_and(), sp);
    }
    return l;
  }
  ExprPtr parse_and() {
    auto l = parse_not();
    while (lx_.at_word("and")) {
      auto sp = lx_.take().span;
      l = make_binary(BinOp::And, l, parse_not(), sp);
    }
    return l;
  }
  ExprPtr parse_not() {
    if (lx_.at_word("not")) {
      auto sp = lx_.take().span;
      return make_unary(UnOp::Not, parse_not(), sp);
    }
    return parse_cmp();
  }
  ExprPtr parse_cmp() {
    auto l = parse_add();
    BinOp op;
    switch (lx_.peek().kind) {
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      default: return l;
    }
    auto sp = lx_.take().span;
    return make_binary(op, l, parse_add(), sp);
  }
  ExprPtr parse_add() {
    auto l = parse_primary();
    for (;;) {
      if (lx_.at(Tok::Plus)) {
        auto sp = lx_.take().span;
        l = make_binary(BinOp::Add, l, parse_primary(), sp);
      } else if (lx_.at(Tok::Minus)) {
        auto sp = lx_.take().span;
        l = make_binary(BinOp::Sub, l, parse_primary(), sp);
      } else {
        return l;
      }
    }
  }
  ExprPtr parse_primary() {
    const Token& t = lx_.peek();
    if (t.kind == Tok::Int) {
      auto tk = lx_.take();
      return make_int(tk.value, tk.span);
    }
    if (t.kind == Tok::LParen) {
      lx_.take();
      auto e = parse_pred();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true" || t.text == "false") {
        auto tk = lx_.take();
        return make_bool(tk.text == "true", tk.span);
      }
      auto tk = lx_.take();
      return make_var(tk.text, tk.span);
    }
    if (t.kind == Tok::Error) fail(t.text);
    fail("expected predicate expression");
  }

  Lexer lx_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

ExprPtr make_int(long long v, SourceSpan s) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->intValue = v;
  e->span = s;
  return e;
}

ExprPtr make_bool(bool v, SourceSpan s) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->intValue = v ? 1 : 0;
  e->span = s;
  return e;
}

ExprPtr make_var(std::string name, SourceSpan s) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  e->span = s;
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceSpan s) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->bop = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  e->span = s;
  return e;
}

ExprPtr make_unary(UnOp op, ExprPtr x, SourceSpan s) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->uop = op;
  e->sub = std::move(x);
  e->span = s;
  return e;
}

bool expr_contains_hole(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Hole) return true;
  return expr_contains_hole(e->lhs) || expr_contains_hole(e->rhs) || expr_contains_hole(e->sub);
}

bool stmts_contain_hole(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (expr_contains_hole(s.expr) || expr_contains_hole(s.sendPayload)) return true;
    if (s.kind == StmtKind::If && (stmts_contain_hole(s.thenBody) || stmts_contain_hole(s.elseBody)))
      return true;
  }
  return false;
}

SketchParseResult parse_sketch(const std::string& text, int maxCard) {
  return SketchParser(text, maxCard).run();
}

SpecParseResult parse_spec(const std::string& text) { return SpecParser(text).run(); }

}  // namespace forge
