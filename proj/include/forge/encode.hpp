#pragma once

#include <unordered_map>

#include "forge/constraint.hpp"
#include "forge/extract.hpp"
#include "forge/global_semantics.hpp"

namespace forge {

struct EncodeOptions {
  size_t maxPaths = 10000;  // simple-path cap for reaches()
};

// Property-agnostic counterexample encoder. Bound to one interpretation's
// semantics; memoizes reaches/hasAction/goesTo fragments.
class Encoder {
 public:
  explicit Encoder(const LocalSemantics& ls, EncodeOptions opts = {});

  // true for concrete states, else the disjunction over simple paths from
  // s0 (hasAction ^ goesTo per step). Falls back to the single shortest
  // path when the cap is hit (stronger encoding, logged in fallbacks()).
  CPtr reaches(int state);

  // Guard with the state's variable values substituted, asserted true
  // (resp. false), simplified over ground subterms.
  CPtr has_action(int state, int loc, int handler, std::optional<int> payload);
  CPtr has_no_action(int state, int loc, int handler, std::optional<int> payload);

  // Conjunction over the handler's updates along the generating execution;
  // hole applications pin the values they took.
  CPtr goes_to(const LocalTransition& t);

  CPtr encode_enabled(int transitionId);
  CPtr encode_disabled(int disabledId);
  // reaches ^ hasAction of a partial transition (s, a, *)
  CPtr encode_partial(int state, ActionLabel::Kind kind, int event);

  CPtr encode_local_cex(const LocalCex& cex);
  CPtr encode_global_cex(const GlobalSemantics& gs, const GlobalCex& cex);

  // Encoding of one enabled global transition: active local transitions
  // plus non-participation facts and cardinality pins for agreement events.
  CPtr encode_global_transition(const GlobalSemantics& gs, int transitionId);

  size_t fallbacks() const { return fallbacks_; }
  const LocalSemantics& semantics() const { return ls_; }

 private:
  CPtr guard_constraint(int state, int loc, int handler, std::optional<int> payload, bool wantTrue);

  const LocalSemantics& ls_;
  EncodeOptions opts_;
  size_t fallbacks_ = 0;
  std::unordered_map<int, CPtr> reachesMemo_;
  std::unordered_map<long long, CPtr> actionMemo_;  // keyed (state, handlerKey, payload, polarity)
  std::unordered_map<int, CPtr> goesToMemo_;        // enabled transition id
};

}  // namespace forge
