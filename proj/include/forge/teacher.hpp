#pragma once

#include <optional>
#include <string>

#include "forge/ast.hpp"
#include "forge/global_semantics.hpp"

namespace forge {

struct ErrorTrace {
  std::string lineName;
  int errorState = -1;
  std::vector<int> transitions;  // q0 -> error state
};

struct DeadlockCex {
  int deadState = -1;
  std::vector<int> transitions;          // q0 -> deadlock state
  std::vector<DisabledGlobal> disabled;  // everything blocked there
};

// Counts processes satisfying a local-state predicate in a global state.
int count_satisfying(const GlobalSemantics& gs, const ExprPtr& pred, int state);

// A safety line is violated when every atom's count meets its threshold.
bool violates_line(const GlobalSemantics& gs, const SafetyLine& line, int state);

// BFS-order scan for the shortest trace to a violating state.
std::optional<ErrorTrace> check_safety(const GlobalSemantics& gs, const SpecSuite& spec);

// Shortest trace to a reachable state with no enabled event.
std::optional<DeadlockCex> check_deadlock(const GlobalSemantics& gs);

// ---------------------------------------------------------------------------
// Liveness
// ---------------------------------------------------------------------------

// Transition predicates over the destination global state (count atoms) and
// the fired events of the transition taken.
struct BuchiTransition {
  int src = -1, dst = -1;
  PropPtr pred;  // null = true
};

struct BuchiAutomaton {
  int states = 0;
  int initial = 0;
  std::vector<bool> accepting;
  std::vector<BuchiTransition> transitions;
  // when nonnull and true at q0 (count atoms only), the monitored run
  // starts in `preTriggeredState` instead of requiring a transition
  PropPtr initPred;
  int preTriggeredState = -1;
  // F p: when p holds at q0 the property is already satisfied
  PropPtr satisfiedAtInit;
};

// Negation automata for the two templates: F p and G (p => F q).
BuchiAutomaton ltl_to_buchi(const LivenessLine& line);

struct Lasso {
  std::string lineName;
  std::vector<int> stem;   // global transition ids
  std::vector<int> cycle;  // nonempty, returns to the stem's endpoint
  std::vector<DisabledGlobal> cycleDisabled;
};

// Builds the product, finds an accepting cycle that is fair (every event
// with an enabled global transition at some cycle state is taken on the
// cycle), shortest-leg construction inside a refined SCC.
std::optional<Lasso> find_fair_accepting_lasso(const GlobalSemantics& gs, const BuchiAutomaton& b,
                                               const std::string& lineName);

// Full liveness check of one template line.
std::optional<Lasso> check_liveness(const GlobalSemantics& gs, const LivenessLine& line);

}  // namespace forge
