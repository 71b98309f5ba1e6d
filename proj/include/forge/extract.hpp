#pragma once

#include "forge/decidability.hpp"
#include "forge/teacher.hpp"

namespace forge {

// A subset of the local semantics witnessing a property violation, tagged
// with the instantiated cube it satisfies.
struct LocalCex {
  std::vector<int> enabledSubset;   // enabled transition ids, ascending
  std::vector<int> disabledSubset;  // disabled transition ids, ascending
  PropertyKind property = PropertyKind::PhaseCompatibility;
  std::optional<PcCube> pcCube;
  std::optional<AmenCube> amenCube;
  std::string description;
  size_t size() const { return enabledSubset.size() + disabledSubset.size(); }
};

enum class GlobalCexShape { Trace, Deadlock, Lasso };

struct GlobalCex {
  GlobalCexShape shape = GlobalCexShape::Trace;
  std::vector<int> enabledGlobal;  // global transition ids (trace / stem+cycle order)
  std::vector<DisabledGlobal> disabledFacts;
  std::string lineName;
};

// Witness of `not exists state ~~>R(f)*`: all internal paths out of the
// state, all disabled internal transitions from their states, and all
// disabled reactions to f there. Returns enabled ids; disabled ids appended
// to `disabledOut`.
std::vector<int> witness_no_reacting_path(const LocalSemantics& ls, int state, int f,
                                          std::vector<int>& disabledOut);

// Alg.-2 extraction: enumerate all satisfied cubes of the failed condition,
// build per-literal witnesses, return the smallest cube witness (ties:
// lexicographic on sorted transition keys).
LocalCex extract_local_cex(const LocalSemantics& ls, const PhaseInfo& phases, const PcCube& failedCube,
                           const DecidabilityOptions& opts = {});

LocalCex extract_amenability_cex(const LocalSemantics& ls, const AmenCube& failedCube,
                                 const DecidabilityOptions& opts = {});

GlobalCex package_global_cex(const ErrorTrace& trace);
GlobalCex package_global_cex(const DeadlockCex& deadlock);
GlobalCex package_global_cex(const Lasso& lasso);

// Re-evaluates the provenance cube over only the subset's transitions.
bool cex_satisfies_cube(const LocalSemantics& ls, const LocalCex& cex,
                        const DecidabilityOptions& opts = {});

// Replays a global counterexample's enabled transitions against
// global_successors (trace consistency).
bool global_cex_replays(const GlobalSemantics& gs, const GlobalCex& cex);

}  // namespace forge
