#pragma once

#include <map>
#include <optional>

#include "forge/local_semantics.hpp"

namespace forge {

// Core phases are the source/destination sets of globally-synchronizing
// events (broadcast, partition, consensus); merged phases are unions of
// core phases connected by internal paths (in either direction) or by
// shared states.
struct Phase {
  int id = -1;
  bool core = true;
  int event = -1;            // core: defining event
  bool sourceSide = true;    // core: src(e) vs dst(e)
  std::vector<int> states;   // ascending local state ids
  std::vector<int> members;  // merged: constituent core phase ids
};

struct PhaseInfo {
  std::vector<Phase> cores;
  std::vector<Phase> merged;
  std::vector<int> mergedOf;     // core id -> merged id
  std::vector<int> phaseOfState; // state -> merged id, -1 when in no phase
  // shortest internal path found from a state of core a to a state of core b
  std::map<std::pair<int, int>, std::vector<int>> connections;

  bool is_global_event(const LocalSemantics& ls, int ev) const;
};

// True for broadcast/partition/consensus events.
bool globally_synchronizing(const ProcessSketch& sk, int event);

PhaseInfo compute_phases(const LocalSemantics& ls);

// A deterministic membership transition establishing s's membership in the
// given core phase (outgoing e-transition for the source side, incoming for
// the destination side).
int membership_transition(const LocalSemantics& ls, const Phase& core, int state);

struct PhaseWitness {
  bool caseA = true;
  std::vector<int> transitions;  // enabled transition ids
};

// Case-A witness (shared core phase) or case-B witness (chain of cores
// joined by internal paths), or nullopt when the states share no phase.
std::optional<PhaseWitness> same_phase_witness(const LocalSemantics& ls, const PhaseInfo& info, int sa,
                                               int sb);

}  // namespace forge
