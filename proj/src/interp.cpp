#include "forge/interp.hpp"

#include <algorithm>
#include <sstream>

namespace forge {

size_t flat_index(const HoleSignature& sig, const std::vector<int>& args) {
  if (args.size() != sig.paramDomains.size())
    throw std::runtime_error("arity mismatch applying hole ??" + std::to_string(sig.id) + ": got " +
                             std::to_string(args.size()) + " arguments, expected " +
                             std::to_string(sig.paramDomains.size()));
  size_t idx = 0;
  for (size_t i = 0; i < args.size(); ++i) {
    const auto& dom = sig.paramDomains[i];
    auto it = std::find(dom.begin(), dom.end(), args[i]);
    if (it == dom.end())
      throw std::runtime_error("argument " + std::to_string(args[i]) + " out of range for hole ??" +
                               std::to_string(sig.id));
    idx = idx * dom.size() + (size_t)(it - dom.begin());
  }
  return idx;
}

std::vector<int> args_at(const HoleSignature& sig, size_t flat) {
  std::vector<int> args(sig.paramDomains.size());
  for (size_t i = sig.paramDomains.size(); i-- > 0;) {
    const auto& dom = sig.paramDomains[i];
    args[i] = dom[flat % dom.size()];
    flat /= dom.size();
  }
  return args;
}

int eval_term(const HoleSignature& sig, const std::vector<int>& args, const Interpretation& I) {
  return I.value(sig.id, flat_index(sig, args));
}

Interpretation least_interpretation(const std::vector<HoleSignature>& sigs) {
  Interpretation I;
  for (const auto& s : sigs) I.funcs[s.id] = std::vector<int>(s.grid_size(), s.returnDomain.at(0));
  return I;
}

bool next_interpretation(const std::vector<HoleSignature>& sigs, Interpretation& I) {
  // Odometer: last hole's last cell is least significant.
  for (size_t h = sigs.size(); h-- > 0;) {
    const auto& sig = sigs[h];
    auto& cells = I.funcs[sig.id];
    for (size_t c = cells.size(); c-- > 0;) {
      auto it = std::find(sig.returnDomain.begin(), sig.returnDomain.end(), cells[c]);
      size_t pos = (size_t)(it - sig.returnDomain.begin());
      if (pos + 1 < sig.returnDomain.size()) {
        cells[c] = sig.returnDomain[pos + 1];
        return true;
      }
      cells[c] = sig.returnDomain[0];
    }
  }
  return false;
}

namespace {

unsigned __int128 pow_checked(unsigned __int128 base, size_t exp) {
  unsigned __int128 r = 1;
  for (size_t i = 0; i < exp; ++i) {
    unsigned __int128 n = r * base;
    if (base != 0 && n / base != r) throw std::runtime_error("interpretation count overflow");
    r = n;
  }
  return r;
}

std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back((char)('0' + (int)(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

unsigned __int128 count_u128(const std::vector<HoleSignature>& sigs) {
  unsigned __int128 total = 1;
  for (const auto& s : sigs) {
    unsigned __int128 per = pow_checked(s.returnDomain.size(), s.grid_size());
    unsigned __int128 n = total * per;
    if (per != 0 && n / per != total) throw std::runtime_error("interpretation count overflow");
    total = n;
  }
  return total;
}

}  // namespace

std::string count_interpretations(const std::vector<HoleSignature>& sigs) {
  return u128_to_string(count_u128(sigs));
}

size_t count_interpretations_bounded(const std::vector<HoleSignature>& sigs, size_t limit) {
  unsigned __int128 n = count_u128(sigs);
  if (n > (unsigned __int128)limit)
    throw std::runtime_error("interpretation count " + u128_to_string(n) + " exceeds bound " +
                             std::to_string(limit));
  return (size_t)n;
}

std::string interpretation_to_string(const std::vector<HoleSignature>& sigs, const Interpretation& I,
                                     const ProcessSketch* sk) {
  std::ostringstream os;
  auto show = [&](const HoleSignature& sig, int v) -> std::string {
    if (sig.retKind == HoleRet::Bool) return v ? "true" : "false";
    if (sig.retKind == HoleRet::Loc && sk) return sk->locations.at((size_t)v).name;
    return std::to_string(v);
  };
  for (const auto& sig : sigs) {
    if (!I.has(sig.id)) continue;
    os << "??" << sig.id;
    if (sig.grid_size() == 1 && sig.params.empty()) {
      os << " = " << show(sig, I.value(sig.id, 0)) << "\n";
      continue;
    }
    os << "(";
    for (size_t i = 0; i < sig.params.size(); ++i) os << (i ? "," : "") << sig.params[i];
    os << ") = {";
    for (size_t f = 0; f < sig.grid_size(); ++f) {
      auto args = args_at(sig, f);
      os << (f ? ", " : "");
      os << "(";
      for (size_t i = 0; i < args.size(); ++i) os << (i ? "," : "") << args[i];
      os << ")->" << show(sig, I.value(sig.id, f));
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace forge
