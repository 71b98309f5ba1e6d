#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/ast.hpp"
#include "forge/interp.hpp"

namespace forge {

// Build errors that are data-dependent rather than programming mistakes.
struct SemanticsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sketch paired with the interpretation used to evaluate its holes. Hole
// occurrences stay in the AST and are evaluated on demand.
struct ConcreteProcess {
  const ProcessSketch* sketch = nullptr;
  Interpretation interp;

  const HoleSignature& sig(int holeId) const;
  // Cardinality of an agreement event under the interpretation.
  int cardinality(const EventInfo& ev) const;
};

// Pairs sketch and interpretation; throws SemanticsError when the
// interpretation is missing a hole or maps cells outside their domains.
ConcreteProcess complete(const ProcessSketch& sketch, Interpretation interp);

struct LocalState {
  int loc = 0;
  std::vector<int> vals;
  bool operator==(const LocalState& o) const { return loc == o.loc && vals == o.vals; }
};

struct ActionLabel {
  enum Kind { Act, React, Internal } kind = Internal;
  int event = -1;  // index into sketch.events; -1 for internal
  bool operator==(const ActionLabel& o) const { return kind == o.kind && event == o.event; }
};

struct FiredEvent {
  int event;
  std::optional<int> payload;
  bool operator==(const FiredEvent& o) const { return event == o.event && payload == o.payload; }
};

// Instance data that distinguishes transitions of one handler: received or
// sent payload value, or the consensus decided set (ascending).
struct Instance {
  std::optional<int> payload;
  std::vector<int> decided;
  bool operator==(const Instance& o) const { return payload == o.payload && decided == o.decided; }
};

struct LocalTransition {
  int id = -1;
  int src = -1;
  ActionLabel label;
  int loc = -1;      // location of the handler
  int handler = -1;  // index within that location
  Instance inst;
  int dst = -1;
  bool sketch = false;
  std::vector<FiredEvent> fired;  // env replies sent by the body
};

struct DisabledTransition {
  int id = -1;
  int src = -1;
  ActionLabel label;
  int loc = -1;
  int handler = -1;
  std::optional<int> payload;  // set when the guard reads the payload
};

struct BuildOptions {
  size_t stateGridBound = 200000;
};

// Augmented local transition system: the full valuation grid with
// reachability and concreteness flags, enabled transitions, and disabled
// transitions (guard false at a reachable state).
struct LocalSemantics {
  ConcreteProcess proc;  // owned: the semantics outlives its inputs
  std::vector<LocalState> states;  // full grid, fixed mixed-radix order
  int s0 = -1;
  std::vector<bool> reachable;
  std::vector<bool> concrete;
  std::vector<LocalTransition> enabled;
  std::vector<DisabledTransition> disabled;
  std::vector<std::vector<int>> enabledBySrc;
  std::vector<std::vector<int>> disabledBySrc;

  const ProcessSketch& sk() const { return *proc.sketch; }
  int state_index(const LocalState& s) const;
  std::string state_name(int id) const;

  bool has_enabled(int src, ActionLabel::Kind k, int event) const;
  // true when some transition labeled with `event` (either action) leaves
  // or enters the state
  std::vector<int> enabled_with_action(int src, ActionLabel::Kind k, int event) const;
  std::vector<int> disabled_with_action(int src, ActionLabel::Kind k, int event) const;
};

// Exhaustive construction from s0. Throws SemanticsError on domain errors,
// ResourceError when the grid exceeds opts.stateGridBound.
LocalSemantics build_local_semantics(const ConcreteProcess& p, const BuildOptions& opts = {});

// Expression evaluation under an interpretation (used by the builder, the
// teacher's predicates, and tests).
struct EvalCtx {
  const std::vector<int>* vals = nullptr;  // current variable values
  int loc = -1;
  std::optional<int> payload;
  const std::vector<int>* decided = nullptr;
};
long long eval_expr(const ConcreteProcess& p, const ExprPtr& e, const EvalCtx& ctx);

// True if the expression contains + or - (such results clamp to the target
// domain instead of erroring).
bool expr_has_arith(const ExprPtr& e);

std::string to_dot(const LocalSemantics& ls);

}  // namespace forge
