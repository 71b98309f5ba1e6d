#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forge/parser.hpp"
#include "forge/synth.hpp"

namespace forge::test {

std::string read_corpus_file(const std::string& name);
ProcessSketch must_parse(const std::string& text, int maxCard = 8);
SpecSuite must_parse_spec(const std::string& text, const ProcessSketch& sketch);

// Loads corpus/<model>.mcy and corpus/<spec>.spec, validated together.
std::pair<ProcessSketch, SpecSuite> load_corpus(const std::string& model, const std::string& spec);

// Every interpretation of the sketch's holes, in lexicographic order.
// Throws when the count exceeds `limit`.
std::vector<Interpretation> all_interpretations(const std::vector<HoleSignature>& sigs,
                                                size_t limit = 100000);

// Naive baseline: first interpretation (in enumeration order) passing all
// stages, or nullopt.
std::optional<Interpretation> brute_force_synth(const ProcessSketch& sketch, const SpecSuite& spec,
                                                const SynthOptions& opts = {});

// Self-contained counterexample record. Local-state ids index the full
// valuation grid, which is identical for every interpretation of one
// sketch, so the same record can be tested against any interpretation.
struct PortableCex {
  bool global = false;
  int n = 0;  // system size for global records
  std::vector<LocalTransition> enabledLocal;
  std::vector<DisabledTransition> disabledLocal;
  struct Global {
    std::vector<int> srcLocals;
    int event;
    int internalLoc, internalHandler;
    std::optional<int> payload;
    std::vector<int> decided;
    std::vector<int> winners;
    int sender;
    std::vector<std::pair<int, LocalTransition>> steps;
    std::vector<int> dstLocals;
  };
  std::vector<Global> enabledGlobal;
  CPtr encoding;
  Interpretation producedBy;
  StageKind stage = StageKind::None;
};

PortableCex make_portable(const CexEvent& ev);

// Are all of the record's transitions present (enabled as enabled,
// disabled as disabled) in the semantics of complete(sketch, I)?
bool exhibits(const ProcessSketch& sketch, const Interpretation& I, const PortableCex& cex);

// As above with prebuilt semantics (gs may be null when cex is local).
bool exhibits_in(const LocalSemantics& ls, const GlobalSemantics* gs, const PortableCex& cex);

}  // namespace forge::test
