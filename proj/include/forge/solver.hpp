#pragma once

#include <optional>
#include <vector>

#include "forge/constraint.hpp"

namespace forge {

struct SolveOptions {
  // Fixed cell order + first-preference values: the returned model is the
  // least satisfying assignment under the value preference.
  bool deterministic = false;
  unsigned long long seed = 0;
};

// Per-hole value preference: for each hole id, the order in which return
// values are tried (indices into the hole's returnDomain). Unlisted holes
// use ascending order.
using ValueOrder = std::map<int, std::vector<int>>;

// Backtracking search over hole-grid cells with singleton propagation and
// activity-based cell ordering. Complete: domains are finite.
class Solver {
 public:
  explicit Solver(const std::vector<HoleSignature>& sigs, const ValueOrder& prefer = {});

  // Adds a constraint; throws std::runtime_error on an ill-typed store.
  void add(const CPtr& c);

  size_t constraint_count() const { return constraints_.size(); }
  const std::vector<CPtr>& constraints() const { return constraints_; }

  // Returns a satisfying interpretation or nullopt (UNSAT).
  std::optional<Interpretation> solve(const SolveOptions& opts = {});

 private:
  enum class Tri { False, True, Unknown };

  Tri eval(const CPtr& c) const;
  std::optional<long long> term_value(const Term& t) const;
  bool assign(int cell, int valueIdx, std::vector<int>& trail);
  void unwind(std::vector<int>& trail, size_t mark);
  bool search(size_t depth, const SolveOptions& opts);

  struct Cell {
    int holeId;
    size_t flat;
    const std::vector<int>* domain;
    const std::vector<int>* order;  // value indices in preference order
  };

  const std::vector<HoleSignature>& sigs_;
  SignatureTable tbl_;
  std::vector<Cell> cells_;
  std::vector<int> cellOf_;                     // dense map: see key()
  std::vector<std::vector<int>> touching_;      // cell -> constraint ids
  std::vector<std::vector<int>> conCells_;      // constraint -> cells
  std::vector<CPtr> constraints_;
  bool trivullyUnsat_ = false;

  std::vector<int> value_;    // per cell: index into domain, -1 unassigned
  std::vector<signed char> status_;  // per constraint: 2 undetermined, 1 true
  std::vector<double> activity_;
  std::vector<int> order_;    // deterministic order (cell indices)
  std::vector<std::vector<int>> valueOrders_;  // per hole (parallel to holeBase_)
  ValueOrder basePrefer_;

  int cell_index(int holeId, size_t flat) const;
  std::vector<std::pair<int, int>> holeBase_;  // holeId -> base cell index
};

}  // namespace forge
