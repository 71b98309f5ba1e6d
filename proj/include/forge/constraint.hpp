#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/interp.hpp"

namespace forge {

// Ground terms: constants and hole applications with constant arguments.
// Nested applications never occur (encodings are ground).
struct Term {
  bool isApp = false;
  long long value = 0;  // constant
  int holeId = -1;
  std::vector<int> args;

  static Term constant(long long v) {
    Term t;
    t.value = v;
    return t;
  }
  static Term apply(int holeId, std::vector<int> args) {
    Term t;
    t.isApp = true;
    t.holeId = holeId;
    t.args = std::move(args);
    return t;
  }
  bool operator==(const Term& o) const {
    return isApp == o.isApp && value == o.value && holeId == o.holeId && args == o.args;
  }
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct CNode;
using CPtr = std::shared_ptr<const CNode>;

struct CNode {
  enum class Kind { True, False, Cmp, Not, And, Or };
  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;
  Term a, b;
  std::vector<CPtr> kids;
  size_t hash = 0;
};

CPtr c_true();
CPtr c_false();
CPtr c_bool(bool v);
CPtr c_cmp(CmpOp op, Term a, Term b);
CPtr c_not(CPtr x);
CPtr c_and(std::vector<CPtr> kids);
CPtr c_or(std::vector<CPtr> kids);

bool c_equal(const CPtr& x, const CPtr& y);

// Signature lookup used by evaluation; thin view over a sketch's holes.
struct SignatureTable {
  const std::vector<HoleSignature>* sigs = nullptr;
  const HoleSignature& at(int holeId) const;
};

long long eval_term(const Term& t, const SignatureTable& tbl, const Interpretation& I);

// Standard Boolean evaluation after replacing applications by their values.
bool holds(const CPtr& c, const SignatureTable& tbl, const Interpretation& I);

// Logical negation; keeps negation normal form (flips comparisons,
// De Morgan on connectives).
CPtr negate(const CPtr& c);

// Constant folding, flattening, short-circuiting, structural dedup.
// Idempotent: simplify(simplify(c)) == simplify(c).
CPtr simplify(const CPtr& c);

// One-line s-expression, e.g. (not (and (= (??4 3) 1) (> (??7 1 2) 7))).
std::string to_sexpr(const CPtr& c);

// All hole applications mentioned, as (holeId, flatIndex) pairs.
void collect_cells(const CPtr& c, const SignatureTable& tbl,
                   std::vector<std::pair<int, size_t>>& out);

// Type-checks every application in the constraint against the signatures.
// Returns an error message or nullopt.
std::optional<std::string> check_constraint(const CPtr& c, const SignatureTable& tbl);

}  // namespace forge
