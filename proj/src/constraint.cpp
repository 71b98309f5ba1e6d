#include "forge/constraint.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace forge {

namespace {

size_t combine(size_t h, size_t v) { return h * 1000003u ^ (v + 0x9e3779b97f4a7c15ull + (h << 6)); }

size_t term_hash(const Term& t) {
  size_t h = t.isApp ? 0x51ed2701 : 0x1;
  h = combine(h, (size_t)t.value);
  h = combine(h, (size_t)t.holeId);
  for (int a : t.args) h = combine(h, (size_t)(a + 1000));
  return h;
}

CPtr make(CNode n) {
  size_t h = (size_t)n.kind * 0x9e3779b9;
  if (n.kind == CNode::Kind::Cmp) {
    h = combine(h, (size_t)n.op);
    h = combine(h, term_hash(n.a));
    h = combine(h, term_hash(n.b));
  }
  for (const auto& k : n.kids) h = combine(h, k->hash);
  n.hash = h;
  return std::make_shared<CNode>(std::move(n));
}

const CPtr kTrue = [] {
  CNode n;
  n.kind = CNode::Kind::True;
  return make(std::move(n));
}();
const CPtr kFalse = [] {
  CNode n;
  n.kind = CNode::Kind::False;
  return make(std::move(n));
}();

bool cmp_eval(CmpOp op, long long a, long long b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

CmpOp cmp_negate(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
  }
  return CmpOp::Eq;
}

}  // namespace

CPtr c_true() { return kTrue; }
CPtr c_false() { return kFalse; }
CPtr c_bool(bool v) { return v ? kTrue : kFalse; }

CPtr c_cmp(CmpOp op, Term a, Term b) {
  if (!a.isApp && !b.isApp) return c_bool(cmp_eval(op, a.value, b.value));
  CNode n;
  n.kind = CNode::Kind::Cmp;
  n.op = op;
  n.a = std::move(a);
  n.b = std::move(b);
  return make(std::move(n));
}

CPtr c_not(CPtr x) {
  if (x->kind == CNode::Kind::True) return kFalse;
  if (x->kind == CNode::Kind::False) return kTrue;
  if (x->kind == CNode::Kind::Not) return x->kids[0];
  CNode n;
  n.kind = CNode::Kind::Not;
  n.kids = {std::move(x)};
  return make(std::move(n));
}

CPtr c_and(std::vector<CPtr> kids) {
  if (kids.empty()) return kTrue;
  if (kids.size() == 1) return kids[0];
  CNode n;
  n.kind = CNode::Kind::And;
  n.kids = std::move(kids);
  return make(std::move(n));
}

CPtr c_or(std::vector<CPtr> kids) {
  if (kids.empty()) return kFalse;
  if (kids.size() == 1) return kids[0];
  CNode n;
  n.kind = CNode::Kind::Or;
  n.kids = std::move(kids);
  return make(std::move(n));
}

bool c_equal(const CPtr& x, const CPtr& y) {
  if (x.get() == y.get()) return true;
  if (x->hash != y->hash || x->kind != y->kind) return false;
  if (x->kind == CNode::Kind::Cmp)
    return x->op == y->op && x->a == y->a && x->b == y->b;
  if (x->kids.size() != y->kids.size()) return false;
  for (size_t i = 0; i < x->kids.size(); ++i)
    if (!c_equal(x->kids[i], y->kids[i])) return false;
  return true;
}

const HoleSignature& SignatureTable::at(int holeId) const {
  for (const auto& s : *sigs)
    if (s.id == holeId) return s;
  throw std::runtime_error("unknown hole function ??" + std::to_string(holeId));
}

long long eval_term(const Term& t, const SignatureTable& tbl, const Interpretation& I) {
  if (!t.isApp) return t.value;
  return eval_term(tbl.at(t.holeId), t.args, I);
}

bool holds(const CPtr& c, const SignatureTable& tbl, const Interpretation& I) {
  switch (c->kind) {
    case CNode::Kind::True: return true;
    case CNode::Kind::False: return false;
    case CNode::Kind::Cmp:
      return cmp_eval(c->op, eval_term(c->a, tbl, I), eval_term(c->b, tbl, I));
    case CNode::Kind::Not: return !holds(c->kids[0], tbl, I);
    case CNode::Kind::And:
      for (const auto& k : c->kids)
        if (!holds(k, tbl, I)) return false;
      return true;
    case CNode::Kind::Or:
      for (const auto& k : c->kids)
        if (holds(k, tbl, I)) return true;
      return false;
  }
  return false;
}

CPtr negate(const CPtr& c) {
  switch (c->kind) {
    case CNode::Kind::True: return kFalse;
    case CNode::Kind::False: return kTrue;
    case CNode::Kind::Cmp: {
      CNode n;
      n.kind = CNode::Kind::Cmp;
      n.op = cmp_negate(c->op);
      n.a = c->a;
      n.b = c->b;
      return make(std::move(n));
    }
    case CNode::Kind::Not: return c->kids[0];
    case CNode::Kind::And: {
      std::vector<CPtr> ks;
      ks.reserve(c->kids.size());
      for (const auto& k : c->kids) ks.push_back(negate(k));
      return c_or(std::move(ks));
    }
    case CNode::Kind::Or: {
      std::vector<CPtr> ks;
      ks.reserve(c->kids.size());
      for (const auto& k : c->kids) ks.push_back(negate(k));
      return c_and(std::move(ks));
    }
  }
  return kFalse;
}

CPtr simplify(const CPtr& c) {
  switch (c->kind) {
    case CNode::Kind::True:
    case CNode::Kind::False:
      return c;
    case CNode::Kind::Cmp:
      if (!c->a.isApp && !c->b.isApp) return c_bool(cmp_eval(c->op, c->a.value, c->b.value));
      return c;
    case CNode::Kind::Not: {
      CPtr k = simplify(c->kids[0]);
      return c_not(std::move(k));
    }
    case CNode::Kind::And:
    case CNode::Kind::Or: {
      bool isAnd = c->kind == CNode::Kind::And;
      std::vector<CPtr> flat;
      std::unordered_set<size_t> seenHashes;
      std::vector<CPtr> seen;
      bool shortCircuit = false;
      std::function<void(const CPtr&)> walk = [&](const CPtr& node) {
        if (shortCircuit) return;
        CPtr s = simplify(node);
        if (s->kind == (isAnd ? CNode::Kind::True : CNode::Kind::False)) return;  // identity
        if (s->kind == (isAnd ? CNode::Kind::False : CNode::Kind::True)) {
          shortCircuit = true;
          return;
        }
        if (s->kind == c->kind) {
          for (const auto& k : s->kids) walk(k);
          return;
        }
        if (seenHashes.count(s->hash)) {
          for (const auto& prev : seen)
            if (c_equal(prev, s)) return;
        }
        seenHashes.insert(s->hash);
        seen.push_back(s);
        flat.push_back(std::move(s));
      };
      for (const auto& k : c->kids) walk(k);
      if (shortCircuit) return isAnd ? kFalse : kTrue;
      return isAnd ? c_and(std::move(flat)) : c_or(std::move(flat));
    }
  }
  return c;
}

namespace {

void sexpr_term(std::ostream& os, const Term& t) {
  if (!t.isApp) {
    os << t.value;
    return;
  }
  os << "(??" << t.holeId;
  for (int a : t.args) os << " " << a;
  os << ")";
}

const char* sexpr_op(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

void sexpr(std::ostream& os, const CPtr& c) {
  switch (c->kind) {
    case CNode::Kind::True: os << "true"; break;
    case CNode::Kind::False: os << "false"; break;
    case CNode::Kind::Cmp:
      os << "(" << sexpr_op(c->op) << " ";
      sexpr_term(os, c->a);
      os << " ";
      sexpr_term(os, c->b);
      os << ")";
      break;
    case CNode::Kind::Not:
      os << "(not ";
      sexpr(os, c->kids[0]);
      os << ")";
      break;
    case CNode::Kind::And:
    case CNode::Kind::Or:
      os << (c->kind == CNode::Kind::And ? "(and" : "(or");
      for (const auto& k : c->kids) {
        os << " ";
        sexpr(os, k);
      }
      os << ")";
      break;
  }
}

}  // namespace

std::string to_sexpr(const CPtr& c) {
  std::ostringstream os;
  sexpr(os, c);
  return os.str();
}

void collect_cells(const CPtr& c, const SignatureTable& tbl,
                   std::vector<std::pair<int, size_t>>& out) {
  switch (c->kind) {
    case CNode::Kind::Cmp:
      if (c->a.isApp) out.emplace_back(c->a.holeId, flat_index(tbl.at(c->a.holeId), c->a.args));
      if (c->b.isApp) out.emplace_back(c->b.holeId, flat_index(tbl.at(c->b.holeId), c->b.args));
      break;
    case CNode::Kind::Not:
    case CNode::Kind::And:
    case CNode::Kind::Or:
      for (const auto& k : c->kids) collect_cells(k, tbl, out);
      break;
    default:
      break;
  }
}

std::optional<std::string> check_constraint(const CPtr& c, const SignatureTable& tbl) {
  try {
    std::vector<std::pair<int, size_t>> cells;
    collect_cells(c, tbl, cells);
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

}  // namespace forge
