#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/source.hpp"

namespace forge {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  IntLit,     // intValue
  BoolLit,    // intValue 0/1
  LocLit,     // name = location (goto targets only)
  Var,        // name = local variable
  Payload,    // name = event; <event>.payld
  DecVar,     // name = round id; <round>.decVar[intValue] (1-based)
  DefaultOf,  // name = variable; default(v) = domain low
  Hole,       // holeId; params carries parameter variable names
  Unary,      // op + sub
  Binary,     // op + lhs/rhs
};

enum class UnOp { Not, Neg };
enum class BinOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub };

struct Expr {
  ExprKind kind;
  SourceSpan span;
  long long intValue = 0;
  std::string name;
  int holeId = -1;
  std::vector<std::string> params;  // Hole: explicit parameter list (empty + explicitParams=false -> default)
  bool explicitParams = false;
  UnOp uop = UnOp::Not;
  BinOp bop = BinOp::Or;
  ExprPtr lhs, rhs, sub;
};

ExprPtr make_int(long long v, SourceSpan s = {});
ExprPtr make_bool(bool v, SourceSpan s = {});
ExprPtr make_var(std::string name, SourceSpan s = {});
ExprPtr make_binary(BinOp op, ExprPtr l, ExprPtr r, SourceSpan s = {});
ExprPtr make_unary(UnOp op, ExprPtr e, SourceSpan s = {});

bool expr_contains_hole(const ExprPtr& e);

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind { Assign, Goto, If, Send };

struct Stmt {
  StmtKind kind;
  SourceSpan span;
  // Assign
  std::string lhs;
  ExprPtr expr;  // Assign rhs / Goto target / If condition
  // If
  std::vector<Stmt> thenBody;
  std::vector<Stmt> elseBody;
  // Send: rend(<event>[payload], <replyTo>.sID)  -- environment-directed reply
  std::string sendEvent;
  ExprPtr sendPayload;      // may be null (payload-less event)
  std::string sendReplyTo;  // event whose sID is the target
};

bool stmts_contain_hole(const std::vector<Stmt>& body);

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct VarDecl {
  std::string name;
  int lo = 0;
  int hi = 0;
  bool isBool = false;
  SourceSpan span;
};

enum class EventKind { Internal, Broadcast, Rendezvous, Partition, Consensus };

// Declared communication events (`events` section). Agreement rounds are
// declared implicitly by their handlers and resolved into EventInfo later.
struct EventDecl {
  std::string name;
  EventKind kind = EventKind::Rendezvous;  // Broadcast or Rendezvous
  bool env = false;
  bool hasPayload = false;
  int payloadLo = 0, payloadHi = 0;
  SourceSpan span;
};

enum class HandlerKind {
  Internal,        // on _
  Receive,         // on recv(e)
  SendBroadcast,   // on bcast(e[payload])
  SendRendezvous,  // on rend(e[payload])
  Partition,       // on partition<id>(All, k)  win:/lose:
  Consensus,       // on consensus<id>(All, k, pv) do ...
};

struct Handler {
  HandlerKind kind;
  SourceSpan span;
  std::string eventName;  // event or round id; empty for Internal
  ExprPtr sendPayload;    // SendBroadcast / SendRendezvous
  ExprPtr guard;          // null = true
  std::vector<Stmt> body;
  std::vector<Stmt> winBody, loseBody;  // Partition only
  ExprPtr cardinality;                  // Partition/Consensus: IntLit or Hole
  std::string proposalVar;              // Consensus: variable or "" for `_`
};

struct LocationDecl {
  std::string name;
  bool initial = false;
  std::vector<Handler> handlers;
  SourceSpan span;
};

// ---------------------------------------------------------------------------
// Holes
// ---------------------------------------------------------------------------

enum class HolePos { GuardCondition, IfCondition, GotoTarget, AssignRhs, Cardinality };

enum class HoleRet { Bool, Int, Loc, Card };

struct HoleSignature {
  int id = -1;
  HolePos pos = HolePos::GuardCondition;
  SourceSpan span;
  std::vector<std::string> params;
  std::vector<std::vector<int>> paramDomains;  // parallel to params
  HoleRet retKind = HoleRet::Bool;
  std::vector<int> returnDomain;  // ascending; locations as indices
  size_t grid_size() const {
    size_t n = 1;
    for (const auto& d : paramDomains) n *= d.size();
    return n;
  }
};

// Resolved event table: declared communication events plus agreement rounds.
struct EventInfo {
  std::string name;
  EventKind kind = EventKind::Rendezvous;
  bool env = false;
  bool hasPayload = false;
  int payloadLo = 0, payloadHi = 0;
  ExprPtr cardinality;            // Partition/Consensus
  std::vector<int> roundDomain;   // Consensus: union of proposal variable domains
};

// ---------------------------------------------------------------------------
// Process sketch
// ---------------------------------------------------------------------------

struct ProcessSketch {
  std::string name;
  std::vector<VarDecl> variables;
  std::vector<EventDecl> eventDecls;
  std::vector<LocationDecl> locations;
  int initialLocation = -1;
  std::vector<HoleSignature> holes;  // sorted by id
  std::vector<EventInfo> events;     // resolved; sorted by name

  int location_index(const std::string& n) const {
    for (size_t i = 0; i < locations.size(); ++i)
      if (locations[i].name == n) return (int)i;
    return -1;
  }
  int var_index(const std::string& n) const {
    for (size_t i = 0; i < variables.size(); ++i)
      if (variables[i].name == n) return (int)i;
    return -1;
  }
  const HoleSignature* hole(int id) const {
    for (const auto& h : holes)
      if (h.id == id) return &h;
    return nullptr;
  }
  const EventInfo* event(const std::string& n) const {
    for (const auto& e : events)
      if (e.name == n) return &e;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Specifications
// ---------------------------------------------------------------------------

struct CountAtom {
  int threshold = 1;       // m
  ExprPtr predicate;       // over loc (`loc = Name`) and local variables
  SourceSpan span;
};

struct SafetyLine {
  std::string name;
  std::vector<CountAtom> atoms;  // violated when all atoms hold simultaneously
  SourceSpan span;
};

// Propositions for liveness lines: count atoms, fired(e) atoms, and/or/not.
struct Prop;
using PropPtr = std::shared_ptr<const Prop>;

enum class PropKind { Count, Fired, And, Or, Not, True };

struct Prop {
  PropKind kind;
  SourceSpan span;
  CountAtom atom;         // Count
  std::string event;      // Fired
  PropPtr lhs, rhs, sub;  // And/Or/Not
};

enum class LivenessTemplate { Eventually, AlwaysImplies };

struct LivenessLine {
  std::string name;
  LivenessTemplate tmpl = LivenessTemplate::Eventually;
  PropPtr p;  // Eventually(p) / AlwaysImplies(p, q)
  PropPtr q;
  SourceSpan span;
};

struct SpecSuite {
  std::vector<SafetyLine> safety;
  std::vector<LivenessLine> liveness;
};

}  // namespace forge
