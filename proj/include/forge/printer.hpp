#pragma once

#include <string>

#include "forge/ast.hpp"

namespace forge {

struct Interpretation;

// Canonical text form; reparsing yields a structurally equal sketch.
std::string pretty_print(const ProcessSketch& sk);

// As pretty_print, but expands every hole with its interpreted value:
// conditions become Boolean formulas over the hole's parameters, goto
// targets and rhs with parameters become if-chains, constants substitute
// directly. The result is hole-free.
std::string print_completed(const ProcessSketch& sk, const Interpretation& interp);

// Stable-field-name JSON dump of the AST (keys sorted).
std::string ast_to_json(const ProcessSketch& sk);

std::string expr_to_string(const ExprPtr& e);

}  // namespace forge
