#pragma once

#include <unordered_map>

#include "forge/local_semantics.hpp"

namespace forge {

struct GlobalState {
  std::vector<int> locals;  // per process: local state id
  bool operator==(const GlobalState& o) const { return locals == o.locals; }
};

struct GlobalStep {
  int proc;
  int transition;  // enabled local transition id
};

struct GlobalTransition {
  int id = -1;
  int src = -1, dst = -1;
  int event = -1;                 // -1 for internal
  int internalLoc = -1, internalHandler = -1;
  std::vector<GlobalStep> steps;  // ascending process index
  std::optional<int> payload;
  std::vector<int> decided;
  int supportSize = -1;      // consensus: count of distinct proposals
  std::vector<int> winners;  // partition winner processes
  int sender = -1;           // -1 when the environment initiates
  std::vector<FiredEvent> fired;

  // Label used for fairness comparisons and witness output.
  long long fairness_key() const {
    if (event >= 0) return event;
    return -(((long long)internalLoc << 16) + internalHandler + 1);
  }
};

// One process whose relevant handlers for an event are all disabled while
// the event has no enabled instance at the state.
struct DisabledGlobal {
  int state = -1;
  int event = -1;
  int proc = -1;
  std::vector<int> facts;  // local DisabledTransition ids at locals[proc]
};

struct GlobalBuildOptions {
  size_t stateBound = 5000000;
};

struct GlobalSemantics {
  const LocalSemantics* ls = nullptr;
  int n = 0;
  std::vector<GlobalState> states;  // reachable, BFS order; q0 = 0
  std::vector<GlobalTransition> transitions;
  std::vector<std::vector<int>> outgoing;
  std::vector<std::vector<DisabledGlobal>> disabledAt;
  std::vector<int> parentEdge;  // shortest-path tree edge into each state
  // set when the builder constructed the local semantics itself
  std::shared_ptr<const LocalSemantics> ownedLocal;

  int find_state(const GlobalState& q) const;
  std::string state_name(int id) const;
  // Shortest trace q0 -> id, as transition ids.
  std::vector<int> trace_to(int id) const;

  struct VecHash {
    size_t operator()(const std::vector<int>& v) const {
      size_t h = v.size();
      for (int x : v) h = h * 1000003u ^ (size_t)x;
      return h;
    }
  };
  std::unordered_map<std::vector<int>, int, VecHash> index_;
};

// Breadth-first construction from (s0,...,s0). Throws ResourceError when
// the reachable set exceeds opts.stateBound.
GlobalSemantics build_global_semantics(const ConcreteProcess& p, int n,
                                       const GlobalBuildOptions& opts = {},
                                       const LocalSemantics* prebuilt = nullptr);

// The transitions the event rules generate at q (deterministic order), and
// the disabled-global entries recorded there.
std::pair<std::vector<int>, std::vector<DisabledGlobal>> global_successors(const GlobalSemantics& gs,
                                                                           int state);

std::string to_dot(const GlobalSemantics& gs);

}  // namespace forge
