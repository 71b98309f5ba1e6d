#include "forge/solver.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace forge {

Solver::Solver(const std::vector<HoleSignature>& sigs, const ValueOrder& prefer)
    : sigs_(sigs), basePrefer_(prefer) {
  tbl_.sigs = &sigs_;
  valueOrders_.reserve(sigs_.size());
  for (const auto& s : sigs_) {
    std::vector<int> order;
    auto it = prefer.find(s.id);
    if (it != prefer.end() && it->second.size() == s.returnDomain.size()) {
      order = it->second;
    } else {
      for (size_t v = 0; v < s.returnDomain.size(); ++v) order.push_back((int)v);
    }
    valueOrders_.push_back(std::move(order));
  }
  for (size_t si = 0; si < sigs_.size(); ++si) {
    const auto& s = sigs_[si];
    holeBase_.emplace_back(s.id, (int)cells_.size());
    for (size_t f = 0; f < s.grid_size(); ++f)
      cells_.push_back(Cell{s.id, f, &s.returnDomain, &valueOrders_[si]});
  }
  value_.assign(cells_.size(), -1);
  activity_.assign(cells_.size(), 0.0);
  touching_.resize(cells_.size());
  for (size_t i = 0; i < cells_.size(); ++i) order_.push_back((int)i);
}

int Solver::cell_index(int holeId, size_t flat) const {
  for (const auto& [id, base] : holeBase_)
    if (id == holeId) return base + (int)flat;
  throw std::runtime_error("unknown hole function ??" + std::to_string(holeId));
}

void Solver::add(const CPtr& c) {
  if (auto err = check_constraint(c, tbl_)) throw std::runtime_error(*err);
  CPtr s = simplify(c);
  if (s->kind == CNode::Kind::False) trivullyUnsat_ = true;
  if (s->kind == CNode::Kind::True) return;
  int id = (int)constraints_.size();
  constraints_.push_back(s);
  std::vector<std::pair<int, size_t>> cellPairs;
  collect_cells(s, tbl_, cellPairs);
  std::vector<int> cs;
  for (const auto& [hole, flat] : cellPairs) cs.push_back(cell_index(hole, flat));
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  for (int cell : cs) touching_[(size_t)cell].push_back(id);
  conCells_.push_back(std::move(cs));
}

std::optional<long long> Solver::term_value(const Term& t) const {
  if (!t.isApp) return t.value;
  int cell = cell_index(t.holeId, flat_index(tbl_.at(t.holeId), t.args));
  int vi = value_[(size_t)cell];
  if (vi < 0) return std::nullopt;
  return (*cells_[(size_t)cell].domain)[(size_t)vi];
}

Solver::Tri Solver::eval(const CPtr& c) const {
  switch (c->kind) {
    case CNode::Kind::True: return Tri::True;
    case CNode::Kind::False: return Tri::False;
    case CNode::Kind::Cmp: {
      auto a = term_value(c->a);
      auto b = term_value(c->b);
      if (!a || !b) return Tri::Unknown;
      bool r;
      switch (c->op) {
        case CmpOp::Eq: r = *a == *b; break;
        case CmpOp::Ne: r = *a != *b; break;
        case CmpOp::Lt: r = *a < *b; break;
        case CmpOp::Le: r = *a <= *b; break;
        case CmpOp::Gt: r = *a > *b; break;
        case CmpOp::Ge: r = *a >= *b; break;
        default: r = false;
      }
      return r ? Tri::True : Tri::False;
    }
    case CNode::Kind::Not: {
      Tri t = eval(c->kids[0]);
      if (t == Tri::Unknown) return t;
      return t == Tri::True ? Tri::False : Tri::True;
    }
    case CNode::Kind::And: {
      bool unknown = false;
      for (const auto& k : c->kids) {
        Tri t = eval(k);
        if (t == Tri::False) return Tri::False;
        if (t == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::True;
    }
    case CNode::Kind::Or: {
      bool unknown = false;
      for (const auto& k : c->kids) {
        Tri t = eval(k);
        if (t == Tri::True) return Tri::True;
        if (t == Tri::Unknown) unknown = true;
      }
      return unknown ? Tri::Unknown : Tri::False;
    }
  }
  return Tri::Unknown;
}

// Trail events: cell assignments and constraint status changes, undone in
// reverse on backtrack.
bool Solver::assign(int cell, int valueIdx, std::vector<int>& trail) {
  auto push_assign = [&](int c, int v) {
    value_[(size_t)c] = v;
    trail.push_back((c << 1) | 1);
  };
  auto set_status = [&](int cid, signed char st) {
    trail.push_back(((cid << 2) | (status_[(size_t)cid] & 3)) << 1);
    status_[(size_t)cid] = st;
  };

  push_assign(cell, valueIdx);
  std::vector<int> queue = {cell};
  while (!queue.empty()) {
    int cur = queue.back();
    queue.pop_back();
    for (int cid : touching_[(size_t)cur]) {
      if (status_[(size_t)cid] != 2) continue;  // already determined true
      Tri t = eval(constraints_[(size_t)cid]);
      if (t == Tri::False) {
        for (int cc : conCells_[(size_t)cid]) activity_[(size_t)cc] += 1.0;
        return false;
      }
      if (t == Tri::True) {
        set_status(cid, 1);
        continue;
      }
      // singleton propagation: exactly one unassigned cell left
      int open = -1;
      int openCount = 0;
      for (int cc : conCells_[(size_t)cid]) {
        if (value_[(size_t)cc] < 0) {
          open = cc;
          if (++openCount > 1) break;
        }
      }
      if (openCount == 1) {
        int allowed = -1, nAllowed = 0;
        const auto& dom = *cells_[(size_t)open].domain;
        for (size_t v = 0; v < dom.size(); ++v) {
          value_[(size_t)open] = (int)v;
          if (eval(constraints_[(size_t)cid]) != Tri::False) {
            if (nAllowed == 0) allowed = (int)v;
            if (++nAllowed > 1) break;
          }
        }
        value_[(size_t)open] = -1;
        if (nAllowed == 0) {
          for (int cc : conCells_[(size_t)cid]) activity_[(size_t)cc] += 1.0;
          return false;
        }
        if (nAllowed == 1) {
          push_assign(open, allowed);
          queue.push_back(open);
        }
      }
    }
  }
  return true;
}

void Solver::unwind(std::vector<int>& trail, size_t mark) {
  while (trail.size() > mark) {
    int ev = trail.back();
    trail.pop_back();
    if (ev & 1) {
      value_[(size_t)(ev >> 1)] = -1;
    } else {
      int packed = ev >> 1;
      status_[(size_t)(packed >> 2)] = (signed char)(packed & 3);
    }
  }
}

bool Solver::search(size_t depth, const SolveOptions& opts) {
  // Branch only on cells that appear in some undetermined constraint.
  int cell = -1;
  double best = -1.0;
  for (int c : order_) {
    if (value_[(size_t)c] >= 0) continue;
    bool relevant = false;
    for (int cid : touching_[(size_t)c]) {
      if (status_[(size_t)cid] == 2) {
        relevant = true;
        break;
      }
    }
    if (!relevant) continue;
    if (opts.deterministic) {
      cell = c;
      break;
    }
    if (activity_[(size_t)c] > best) {
      best = activity_[(size_t)c];
      cell = c;
    }
  }
  if (cell < 0) return true;  // every constraint determined (and none false)

  const auto& order = *cells_[(size_t)cell].order;
  std::vector<int> trail;
  for (int v : order) {
    size_t mark = trail.size();
    if (assign(cell, v, trail)) {
      if (search(depth + 1, opts)) return true;
    }
    unwind(trail, mark);
  }
  if (!opts.deterministic) activity_[(size_t)cell] *= 0.95;
  return false;
}

std::optional<Interpretation> Solver::solve(const SolveOptions& opts) {
  if (trivullyUnsat_) return std::nullopt;
  // Non-deterministic mode draws each hole's value preference from the
  // seed, so successive solvers propose structurally diverse models.
  for (size_t si = 0; si < sigs_.size(); ++si) {
    std::vector<int>& order = valueOrders_[si];
    auto base = basePrefer_.find(sigs_[si].id);
    if (base != basePrefer_.end() && base->second.size() == order.size()) {
      order = base->second;
    } else {
      for (size_t v = 0; v < order.size(); ++v) order[v] = (int)v;
    }
    if (!opts.deterministic) {
      std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ull + (unsigned)sigs_[si].id * 2654435761u);
      std::shuffle(order.begin(), order.end(), rng);
    }
  }
  std::fill(value_.begin(), value_.end(), -1);
  status_.assign(constraints_.size(), 2);
  // constraints with no open cells at the root are constant-folded by add()
  if (!search(0, opts)) return std::nullopt;
  Interpretation I;
  for (const auto& s : sigs_) I.funcs[s.id] = std::vector<int>(s.grid_size());
  for (size_t i = 0; i < cells_.size(); ++i) {
    int vi = value_[i];
    if (vi < 0) vi = cells_[i].order->front();  // unconstrained cells take the preferred value
    I.funcs[cells_[i].holeId][cells_[i].flat] = (*cells_[i].domain)[(size_t)vi];
  }
  return I;
}

}  // namespace forge
