#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/ast.hpp"

namespace forge {

// Total map from each hole's argument grid to return values. Cell order is
// row-major over the parameter domains (first parameter most significant).
struct Interpretation {
  std::map<int, std::vector<int>> funcs;  // hole id -> value per flat index

  bool has(int holeId) const { return funcs.find(holeId) != funcs.end(); }

  int value(int holeId, size_t flat) const {
    auto it = funcs.find(holeId);
    if (it == funcs.end()) throw std::runtime_error("interpretation missing hole ??" + std::to_string(holeId));
    return it->second.at(flat);
  }

  bool operator==(const Interpretation& o) const { return funcs == o.funcs; }
  bool operator<(const Interpretation& o) const { return funcs < o.funcs; }
};

// Flat index of an argument tuple in a hole's grid.
size_t flat_index(const HoleSignature& sig, const std::vector<int>& args);

// The argument tuple at a flat index.
std::vector<int> args_at(const HoleSignature& sig, size_t flat);

// Looks up f(args) under I, checking arity and argument ranges.
int eval_term(const HoleSignature& sig, const std::vector<int>& args, const Interpretation& I);

// Lexicographically least interpretation: every cell at its first
// return-domain value.
Interpretation least_interpretation(const std::vector<HoleSignature>& sigs);

// Advances to the next interpretation in lexicographic cell order.
// Returns false when the space is exhausted.
bool next_interpretation(const std::vector<HoleSignature>& sigs, Interpretation& I);

// Product over holes of |returnDomain|^gridSize, as a decimal string
// (exact up to 128 bits; throws on overflow).
std::string count_interpretations(const std::vector<HoleSignature>& sigs);

// Same count as a size_t; throws if it exceeds `limit`.
size_t count_interpretations_bounded(const std::vector<HoleSignature>& sigs, size_t limit);

std::string interpretation_to_string(const std::vector<HoleSignature>& sigs, const Interpretation& I,
                                     const ProcessSketch* sk = nullptr);

}  // namespace forge
