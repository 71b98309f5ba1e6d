#pragma once

#include <functional>
#include <iosfwd>

#include "forge/encode.hpp"
#include "forge/solver.hpp"

namespace forge {

enum class LearnerMode { Solver, Enumerate };

enum class StageKind { PhaseCompatibility, Amenability, Safety, Deadlock, Liveness, None };

const char* stage_name(StageKind s);

// Passed to the per-iteration observer while the iteration's semantics are
// still alive.
struct CexEvent {
  int iteration = 0;
  StageKind stage = StageKind::None;
  const Interpretation* I = nullptr;
  const LocalSemantics* ls = nullptr;
  const GlobalSemantics* gs = nullptr;   // global stages only
  const LocalCex* localCex = nullptr;
  const GlobalCex* globalCex = nullptr;
  CPtr encoding;  // enc(cex)
  int cutoff = -1;
};

struct SynthOptions {
  long long maxIterations = 1000000;
  double timeoutSeconds = 0;  // 0 = unlimited
  int cutoffOverride = 0;     // 0 = computed
  LearnerMode learner = LearnerMode::Solver;
  bool deterministic = false;
  unsigned long long seed = 0;
  bool liveness = true;  // deadlock-freedom + liveness stage
  bool strictIndependence = false;
  size_t stateBound = 5000000;
  size_t maxPaths = 10000;
  int jobs = 1;
  ValueOrder valueOrder;  // solver value preference per hole
  std::ostream* dumpConstraints = nullptr;
  std::function<void(const CexEvent&)> observer;
};

struct IterationRecord {
  int iteration = 0;
  StageKind violation = StageKind::None;
  std::string detail;
  size_t cexEnabled = 0, cexDisabled = 0;
  size_t constraintCount = 0;
  int cutoff = -1;
  double seconds = 0;
  bool progressOk = true;  // holds(enc(cex), I) held for the produced cex
};

struct SynthStats {
  std::vector<IterationRecord> iterations;
  double totalSeconds = 0;
  size_t reachesFallbacks = 0;
  int count(StageKind k) const {
    int n = 0;
    for (const auto& it : iterations)
      if (it.violation == k) ++n;
    return n;
  }
};

enum class Outcome { Completed, NoSolution, Timeout, ResourceLimit };

struct SynthResult {
  Outcome outcome = Outcome::NoSolution;
  std::optional<Interpretation> interpretation;
  int cutoff = -1;
  SynthStats stats;
  std::string message;
};

// The staged loop: interpret -> complete -> phase compatibility ->
// amenability -> cutoff -> safety -> deadlock -> liveness; on failure
// extract + encode + negate + continue.
SynthResult synthesize(const ProcessSketch& sketch, const SpecSuite& spec, const SynthOptions& opts = {});

// Lemma-1 progress: the negated encoding must rule out the current
// interpretation.
bool iteration_progress_check(const std::vector<HoleSignature>& sigs, const Interpretation& I,
                              const CPtr& encoding);

struct StageVerdict {
  StageKind stage = StageKind::None;
  bool ok = true;
  std::string detail;
  std::string witnessJson;  // populated when requested and failing
};

struct VerifyReport {
  bool ok = true;
  int cutoff = -1;
  std::vector<StageVerdict> stages;
};

// Runs every stage once on a completed model.
VerifyReport verify(const ProcessSketch& sketch, const Interpretation& I, const SpecSuite& spec,
                    const SynthOptions& opts = {}, bool emitWitness = false);

std::string stats_to_json(const SynthStats& stats);
std::string verify_report_to_json(const VerifyReport& report);

// Witness serialization: traces as (event, participants, payload) records.
std::string trace_to_json(const GlobalSemantics& gs, const std::vector<int>& transitions);

}  // namespace forge
