#pragma once

#include <optional>
#include <string>

#include "forge/ast.hpp"
#include "forge/local_semantics.hpp"
#include "forge/phases.hpp"

namespace forge {

struct DecidabilityOptions {
  bool strictIndependence = false;  // independence = internal transitions only
  size_t pathExpansionBound = 500000;
  int jobs = 1;
};

// Instantiated failing cube of a phase-compatibility condition.
// Conditions: 1, 21 (condition 2, acting part), 22 (condition 2, reacting
// part), 3.
struct PcCube {
  int condition = 0;
  int e = -1, f = -1;
  int actingTrans = -1;    // s -A(e)-> s' (conditions 1, 21, 22)
  int reactState = -1;     // s' carrying the partial (s', R(f), *) literal
  int firableTrans = -1;   // z -e-> z' establishing firability
  int firableState = -1;   // z' carrying the partial (z', A(f), *) literal
  int tTrans = -1;         // t -A(e)-> t' (21) or t -R(e)-> t' (22)
  int missingAt = -1;      // state where R(e)/R(f)/path-to-R(f) is missing
  // condition 3
  int internalTrans = -1;  // s -> s'
  int phase = -1;          // merged phase id
  int sState = -1, tState = -1, zState = -1;
};

// Instantiated failing cube of the cutoff-amenability condition for one
// safety atom; the negation holds as x ^ y ^ a or x ^ y ^ b.
struct AmenCube {
  std::string lineName;
  int atomIndex = 0;
  ExprPtr predicate;
  std::vector<int> xPath;      // non-independent path s0 -> st(f)
  int xBad = -1;               // its non-independent transition
  int clause = 0;              // 2 = (a), 3 = (b)
  std::vector<int> yPath;      // independent path p in F
  int yTrans = -1;             // branching transition (s_s -> s_d)
  // clause (b) escape evidence
  int escapeKind = -1;         // 0 dead end, 1 cycle avoiding s_s, 2 non-independent edge
  std::vector<int> escapePath; // transitions from s_d
  std::vector<int> escapeCycle;
  int escapeBad = -1;
  std::vector<int> deadEndDisabled;  // disabled ids at the dead end
};

enum class PropertyKind { PhaseCompatibility, Amenability };

struct ConditionReport {
  PropertyKind property = PropertyKind::PhaseCompatibility;
  bool ok = true;
  std::optional<PcCube> pcCube;
  std::optional<AmenCube> amenCube;
  std::string description;
};

// True iff the transition's existence does not depend on other processes:
// internal transitions and reactions to environment events (the latter
// unless strict independence is requested).
bool independent(const LocalSemantics& ls, const LocalTransition& t, bool strict = false);

// States reachable from `from` via enabled internal transitions (inclusive).
std::vector<int> internal_closure(const LocalSemantics& ls, int from);

// All violating instantiations of one condition (1, 21, 22, 3), in the
// deterministic instantiation order; at most `limit` cubes.
std::vector<PcCube> pc_violations(const LocalSemantics& ls, const PhaseInfo& phases, int condition,
                                  size_t limit);

std::string describe_pc_cube(const LocalSemantics& ls, const PcCube& cube);

// Def-A.1-style conditions (1)-(3) over the instantiation order
// (event, then transition id, then state id); returns the first failing
// cube.
ConditionReport check_phase_compatibility(const LocalSemantics& ls, const PhaseInfo& phases,
                                          const DecidabilityOptions& opts = {});

// Path-independence conditions per safety atom. Requires
// phase-compatibility to have passed.
ConditionReport check_amenability(const LocalSemantics& ls, const SpecSuite& spec,
                                  const DecidabilityOptions& opts = {});

// max(sum of per-line thresholds, 1 + max agreement cardinality,
//     2 when an inter-process rendezvous exists).
int compute_cutoff(const ConcreteProcess& p, const SpecSuite& spec);

// Evaluates a normalized spec predicate at a local state ("loc" reads the
// location).
bool eval_state_pred(const LocalSemantics& ls, const ExprPtr& pred, int state);

// All grid states satisfying the predicate.
std::vector<int> satisfying_states(const LocalSemantics& ls, const ExprPtr& pred);

}  // namespace forge
