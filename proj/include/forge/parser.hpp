#pragma once

#include <string>
#include <vector>

#include "forge/ast.hpp"
#include "forge/source.hpp"

namespace forge {

struct SketchParseResult {
  ProcessSketch sketch;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

struct SpecParseResult {
  SpecSuite suite;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

// Parses the `.mcy` sketch/model format. Total: never throws on bad input,
// reports diagnostics instead. Hole signatures are inferred from syntactic
// position; `maxCard` bounds the default cardinality-hole domain.
SketchParseResult parse_sketch(const std::string& text, int maxCard = 8);

// Parses the `.spec` format (safety/liveness lines).
SpecParseResult parse_spec(const std::string& text);

// Cross-checks a sketch against itself and a spec against the sketch.
// Returns all diagnostics (empty means valid). Also normalizes spec
// predicates (resolves location names) in place.
std::vector<Diagnostic> validate(const ProcessSketch& sketch, SpecSuite& spec);
std::vector<Diagnostic> validate_sketch(const ProcessSketch& sketch);

}  // namespace forge
