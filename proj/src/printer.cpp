#include "forge/printer.hpp"

#include <json.hpp>
#include <sstream>

#include "forge/interp.hpp"

namespace forge {

namespace {

int prec_of(const Expr& e) {
  if (e.kind == ExprKind::Binary) {
    switch (e.bop) {
      case BinOp::Or: return 1;
      case BinOp::And: return 2;
      case BinOp::Eq:
      case BinOp::Ne:
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge: return 4;
      case BinOp::Add:
      case BinOp::Sub: return 5;
    }
  }
  if (e.kind == ExprKind::Unary) return e.uop == UnOp::Not ? 3 : 6;
  return 7;
}

const char* op_str(BinOp op) {
  switch (op) {
    case BinOp::Or: return "or";
    case BinOp::And: return "and";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
  }
  return "?";
}

void print_expr(std::ostream& os, const ExprPtr& e, int parentPrec) {
  int p = prec_of(*e);
  bool paren = p < parentPrec;
  if (paren) os << "(";
  switch (e->kind) {
    case ExprKind::IntLit: os << e->intValue; break;
    case ExprKind::BoolLit: os << (e->intValue ? "true" : "false"); break;
    case ExprKind::LocLit: os << e->name; break;
    case ExprKind::Var: os << e->name; break;
    case ExprKind::Payload: os << e->name << ".payld"; break;
    case ExprKind::DecVar: os << e->name << ".decVar[" << e->intValue << "]"; break;
    case ExprKind::DefaultOf: os << "default(" << e->name << ")"; break;
    case ExprKind::Hole:
      os << "??" << e->holeId;
      if (e->explicitParams) {
        os << "(";
        for (size_t i = 0; i < e->params.size(); ++i) os << (i ? "," : "") << e->params[i];
        os << ")";
      }
      if (e->name == "__range")
        os << " in [" << (e->intValue >> 32) << "," << (e->intValue & 0xffffffff) << "]";
      break;
    case ExprKind::Unary:
      if (e->uop == UnOp::Not) {
        os << "not ";
        print_expr(os, e->sub, 3);
      } else {
        os << "-";
        print_expr(os, e->sub, 6);
      }
      break;
    case ExprKind::Binary:
      print_expr(os, e->lhs, p);
      os << " " << op_str(e->bop) << " ";
      print_expr(os, e->rhs, p + 1);
      break;
  }
  if (paren) os << ")";
}

class Printer {
 public:
  Printer(const ProcessSketch& sk, const Interpretation* I) : sk_(sk), I_(I) {}

  std::string run() {
    os_ << "process " << sk_.name << "\n";
    if (!sk_.variables.empty()) {
      os_ << "variables\n";
      for (const auto& v : sk_.variables) {
        if (v.isBool)
          os_ << "  bool " << v.name << "\n";
        else
          os_ << "  int[" << v.lo << "," << v.hi << "] " << v.name << "\n";
      }
    }
    if (!sk_.eventDecls.empty()) {
      os_ << "events\n";
      for (const auto& e : sk_.eventDecls) {
        os_ << "  " << (e.env ? "env " : "") << (e.kind == EventKind::Rendezvous ? "rz " : "br ") << e.name;
        if (e.hasPayload) os_ << " : int[" << e.payloadLo << "," << e.payloadHi << "]";
        os_ << "\n";
      }
    }
    for (size_t i = 0; i < sk_.locations.size(); ++i) {
      const auto& loc = sk_.locations[i];
      os_ << (loc.initial ? "initial location " : "location ") << loc.name << "\n";
      for (const auto& h : loc.handlers) print_handler(h);
    }
    return os_.str();
  }

 private:
  void print_handler(const Handler& h) {
    os_ << "  on ";
    switch (h.kind) {
      case HandlerKind::Internal: os_ << "_"; break;
      case HandlerKind::Receive: os_ << "recv(" << h.eventName << ")"; break;
      case HandlerKind::SendBroadcast:
      case HandlerKind::SendRendezvous:
        os_ << (h.kind == HandlerKind::SendBroadcast ? "bcast(" : "rend(") << h.eventName;
        if (h.sendPayload) {
          os_ << "[";
          print_expr(os_, h.sendPayload, 0);
          os_ << "]";
        }
        os_ << ")";
        break;
      case HandlerKind::Partition:
      case HandlerKind::Consensus:
        os_ << (h.kind == HandlerKind::Partition ? "partition<" : "consensus<") << h.eventName << ">(All, ";
        print_card(h.cardinality);
        if (h.kind == HandlerKind::Consensus)
          os_ << ", " << (h.proposalVar.empty() ? "_" : h.proposalVar);
        os_ << ")";
        break;
    }
    if (h.guard) {
      os_ << " when ";
      print_cond(h.guard);
    }
    if (h.kind == HandlerKind::Partition) {
      os_ << "\n    win:";
      print_body(h.winBody, 6);
      os_ << "    lose:";
      print_body(h.loseBody, 6);
    } else if (!h.body.empty()) {
      os_ << " do";
      print_body(h.body, 4);
    } else {
      os_ << "\n";
    }
  }

  void print_card(const ExprPtr& card) {
    if (I_ && card->kind == ExprKind::Hole) {
      os_ << I_->value(card->holeId, 0);
      return;
    }
    print_expr(os_, card, 0);
  }

  // Conditions: under completion, Boolean holes expand to formulas over
  // their parameters.
  void print_cond(const ExprPtr& e) {
    if (I_ && e->kind == ExprKind::Hole) {
      const HoleSignature* sig = sk_.hole(e->holeId);
      std::vector<std::string> terms;
      for (size_t f = 0; f < sig->grid_size(); ++f) {
        if (!I_->value(sig->id, f)) continue;
        auto args = args_at(*sig, f);
        std::ostringstream t;
        if (args.empty()) {
          terms.push_back("true");
          continue;
        }
        t << "(";
        for (size_t i = 0; i < args.size(); ++i) {
          if (i) t << " and ";
          int vi = sk_.var_index(sig->params[i]);
          if (vi >= 0 && sk_.variables[vi].isBool)
            t << sig->params[i] << " = " << (args[i] ? "true" : "false");
          else
            t << sig->params[i] << " = " << args[i];
        }
        t << ")";
        terms.push_back(t.str());
      }
      if (terms.empty()) {
        os_ << "false";
      } else if (terms.size() == sig->grid_size()) {
        os_ << "true";
      } else {
        for (size_t i = 0; i < terms.size(); ++i) os_ << (i ? " or " : "") << terms[i];
      }
      return;
    }
    print_expr(os_, e, 0);
  }

  void print_body(const std::vector<Stmt>& body, int indent) {
    os_ << "\n";
    for (const auto& s : body) print_stmt(s, indent);
  }

  void pad(int n) {
    for (int i = 0; i < n; ++i) os_ << ' ';
  }

  // Value-position holes (goto / rhs) with parameters expand to if-chains
  // under completion.
  void print_stmt(const Stmt& s, int indent) {
    switch (s.kind) {
      case StmtKind::Assign:
      case StmtKind::Goto: {
        bool holey = s.expr->kind == ExprKind::Hole;
        if (I_ && holey) {
          const HoleSignature* sig = sk_.hole(s.expr->holeId);
          if (sig->grid_size() == 1) {
            pad(indent);
            emit_value_stmt(s, I_->value(sig->id, 0));
            os_ << "\n";
          } else {
            for (size_t f = 0; f < sig->grid_size(); ++f) {
              auto args = args_at(*sig, f);
              pad(indent);
              if (f) os_ << "else ";
              if (f + 1 < sig->grid_size()) {
                os_ << "if (";
                for (size_t i = 0; i < args.size(); ++i) {
                  if (i) os_ << " and ";
                  int vi = sk_.var_index(sig->params[i]);
                  if (vi >= 0 && sk_.variables[vi].isBool)
                    os_ << sig->params[i] << " = " << (args[i] ? "true" : "false");
                  else
                    os_ << sig->params[i] << " = " << args[i];
                }
                os_ << ") { ";
              } else {
                os_ << "{ ";
              }
              emit_value_stmt(s, I_->value(sig->id, f));
              os_ << " }\n";
            }
          }
          return;
        }
        pad(indent);
        if (s.kind == StmtKind::Assign) {
          os_ << s.lhs << " := ";
          print_cond_or_expr(s.expr);
        } else {
          os_ << "goto ";
          print_expr(os_, s.expr, 0);
        }
        os_ << "\n";
        break;
      }
      case StmtKind::If: {
        pad(indent);
        os_ << "if (";
        print_cond(s.expr);
        os_ << ") {\n";
        for (const auto& t : s.thenBody) print_stmt(t, indent + 2);
        pad(indent);
        os_ << "}";
        if (!s.elseBody.empty()) {
          os_ << " else {\n";
          for (const auto& t : s.elseBody) print_stmt(t, indent + 2);
          pad(indent);
          os_ << "}";
        }
        os_ << "\n";
        break;
      }
      case StmtKind::Send: {
        pad(indent);
        os_ << "rend(" << s.sendEvent;
        if (s.sendPayload) {
          os_ << "[";
          print_expr(os_, s.sendPayload, 0);
          os_ << "]";
        }
        os_ << ", " << s.sendReplyTo << ".sID)\n";
        break;
      }
    }
  }

  void print_cond_or_expr(const ExprPtr& e) {
    // Assignments to bool variables may hold Boolean hole conditions.
    if (I_ && e->kind == ExprKind::Hole)
      print_cond(e);
    else
      print_expr(os_, e, 0);
  }

  void emit_value_stmt(const Stmt& s, int value) {
    const HoleSignature* sig = sk_.hole(s.expr->holeId);
    if (s.kind == StmtKind::Goto) {
      os_ << "goto " << sk_.locations.at((size_t)value).name;
    } else {
      os_ << s.lhs << " := ";
      if (sig->retKind == HoleRet::Bool)
        os_ << (value ? "true" : "false");
      else
        os_ << value;
    }
  }

  const ProcessSketch& sk_;
  const Interpretation* I_;
  std::ostringstream os_;
};

using json = nlohmann::json;

json expr_json(const ExprPtr& e);

json stmt_json(const Stmt& s) {
  json j;
  switch (s.kind) {
    case StmtKind::Assign:
      j["kind"] = "assign";
      j["lhs"] = s.lhs;
      j["rhs"] = expr_json(s.expr);
      break;
    case StmtKind::Goto:
      j["kind"] = "goto";
      j["target"] = expr_json(s.expr);
      break;
    case StmtKind::If: {
      j["kind"] = "if";
      j["cond"] = expr_json(s.expr);
      json t = json::array(), e = json::array();
      for (const auto& x : s.thenBody) t.push_back(stmt_json(x));
      for (const auto& x : s.elseBody) e.push_back(stmt_json(x));
      j["then"] = t;
      j["else"] = e;
      break;
    }
    case StmtKind::Send:
      j["kind"] = "send";
      j["event"] = s.sendEvent;
      if (s.sendPayload) j["payload"] = expr_json(s.sendPayload);
      j["replyTo"] = s.sendReplyTo;
      break;
  }
  return j;
}

json expr_json(const ExprPtr& e) {
  json j;
  if (!e) return j;
  switch (e->kind) {
    case ExprKind::IntLit:
      j["kind"] = "int";
      j["value"] = e->intValue;
      break;
    case ExprKind::BoolLit:
      j["kind"] = "bool";
      j["value"] = (bool)e->intValue;
      break;
    case ExprKind::LocLit:
      j["kind"] = "loc";
      j["name"] = e->name;
      break;
    case ExprKind::Var:
      j["kind"] = "var";
      j["name"] = e->name;
      break;
    case ExprKind::Payload:
      j["kind"] = "payld";
      j["event"] = e->name;
      break;
    case ExprKind::DecVar:
      j["kind"] = "decVar";
      j["round"] = e->name;
      j["index"] = e->intValue;
      break;
    case ExprKind::DefaultOf:
      j["kind"] = "default";
      j["var"] = e->name;
      break;
    case ExprKind::Hole:
      j["kind"] = "hole";
      j["id"] = e->holeId;
      if (e->explicitParams) j["params"] = e->params;
      if (e->name == "__range") {
        j["cardLo"] = (int)(e->intValue >> 32);
        j["cardHi"] = (int)(e->intValue & 0xffffffff);
      }
      break;
    case ExprKind::Unary:
      j["kind"] = e->uop == UnOp::Not ? "not" : "neg";
      j["sub"] = expr_json(e->sub);
      break;
    case ExprKind::Binary:
      j["kind"] = "binary";
      j["op"] = op_str(e->bop);
      j["lhs"] = expr_json(e->lhs);
      j["rhs"] = expr_json(e->rhs);
      break;
  }
  return j;
}

}  // namespace

std::string expr_to_string(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty_print(const ProcessSketch& sk) { return Printer(sk, nullptr).run(); }

std::string print_completed(const ProcessSketch& sk, const Interpretation& interp) {
  return Printer(sk, &interp).run();
}

std::string ast_to_json(const ProcessSketch& sk) {
  json j;
  j["process"] = sk.name;
  json vars = json::array();
  for (const auto& v : sk.variables) {
    json jv;
    jv["name"] = v.name;
    jv["lo"] = v.lo;
    jv["hi"] = v.hi;
    jv["bool"] = v.isBool;
    vars.push_back(jv);
  }
  j["variables"] = vars;
  json evs = json::array();
  for (const auto& e : sk.events) {
    json je;
    je["name"] = e.name;
    switch (e.kind) {
      case EventKind::Broadcast: je["kind"] = "broadcast"; break;
      case EventKind::Rendezvous: je["kind"] = "rendezvous"; break;
      case EventKind::Partition: je["kind"] = "partition"; break;
      case EventKind::Consensus: je["kind"] = "consensus"; break;
      case EventKind::Internal: je["kind"] = "internal"; break;
    }
    je["env"] = e.env;
    if (e.hasPayload) {
      je["payloadLo"] = e.payloadLo;
      je["payloadHi"] = e.payloadHi;
    }
    evs.push_back(je);
  }
  j["events"] = evs;
  json locs = json::array();
  for (const auto& loc : sk.locations) {
    json jl;
    jl["name"] = loc.name;
    jl["initial"] = loc.initial;
    json hs = json::array();
    for (const auto& h : loc.handlers) {
      json jh;
      switch (h.kind) {
        case HandlerKind::Internal: jh["action"] = "internal"; break;
        case HandlerKind::Receive: jh["action"] = "recv"; break;
        case HandlerKind::SendBroadcast: jh["action"] = "bcast"; break;
        case HandlerKind::SendRendezvous: jh["action"] = "rend"; break;
        case HandlerKind::Partition: jh["action"] = "partition"; break;
        case HandlerKind::Consensus: jh["action"] = "consensus"; break;
      }
      if (!h.eventName.empty()) jh["event"] = h.eventName;
      if (h.sendPayload) jh["payload"] = expr_json(h.sendPayload);
      if (h.guard) jh["guard"] = expr_json(h.guard);
      if (h.cardinality) jh["cardinality"] = expr_json(h.cardinality);
      if (h.kind == HandlerKind::Consensus) jh["proposal"] = h.proposalVar;
      auto body_json = [](const std::vector<Stmt>& b) {
        json a = json::array();
        for (const auto& s : b) a.push_back(stmt_json(s));
        return a;
      };
      if (h.kind == HandlerKind::Partition) {
        jh["win"] = body_json(h.winBody);
        jh["lose"] = body_json(h.loseBody);
      } else {
        jh["body"] = body_json(h.body);
      }
      hs.push_back(jh);
    }
    jl["handlers"] = hs;
    locs.push_back(jl);
  }
  j["locations"] = locs;
  json holes = json::array();
  for (const auto& h : sk.holes) {
    json jh;
    jh["id"] = h.id;
    switch (h.pos) {
      case HolePos::GuardCondition: jh["position"] = "guard"; break;
      case HolePos::IfCondition: jh["position"] = "ifCondition"; break;
      case HolePos::GotoTarget: jh["position"] = "gotoTarget"; break;
      case HolePos::AssignRhs: jh["position"] = "assignRhs"; break;
      case HolePos::Cardinality: jh["position"] = "cardinality"; break;
    }
    jh["params"] = h.params;
    jh["returnDomain"] = h.returnDomain;
    holes.push_back(jh);
  }
  j["holes"] = holes;
  return j.dump(2);
}

}  // namespace forge
