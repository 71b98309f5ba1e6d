#include "oracle.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace forge::test {

std::string read_corpus_file(const std::string& name) {
  std::string path = std::string(FORGE_CORPUS_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ProcessSketch must_parse(const std::string& text, int maxCard) {
  auto r = parse_sketch(text, maxCard);
  if (!r.ok()) {
    std::string msg = "parse failed:";
    for (const auto& d : r.diagnostics) msg += "\n  " + format_diagnostic(d);
    throw std::runtime_error(msg);
  }
  auto diags = validate_sketch(r.sketch);
  if (has_errors(diags)) {
    std::string msg = "validation failed:";
    for (const auto& d : diags) msg += "\n  " + format_diagnostic(d);
    throw std::runtime_error(msg);
  }
  return std::move(r.sketch);
}

SpecSuite must_parse_spec(const std::string& text, const ProcessSketch& sketch) {
  auto r = parse_spec(text);
  if (!r.ok()) {
    std::string msg = "spec parse failed:";
    for (const auto& d : r.diagnostics) msg += "\n  " + format_diagnostic(d);
    throw std::runtime_error(msg);
  }
  SpecSuite suite = std::move(r.suite);
  auto diags = validate(sketch, suite);
  if (has_errors(diags)) {
    std::string msg = "spec validation failed:";
    for (const auto& d : diags) msg += "\n  " + format_diagnostic(d);
    throw std::runtime_error(msg);
  }
  return suite;
}

std::pair<ProcessSketch, SpecSuite> load_corpus(const std::string& model, const std::string& spec) {
  ProcessSketch sk = must_parse(read_corpus_file(model));
  SpecSuite suite = must_parse_spec(read_corpus_file(spec), sk);
  return {std::move(sk), std::move(suite)};
}

std::vector<Interpretation> all_interpretations(const std::vector<HoleSignature>& sigs, size_t limit) {
  count_interpretations_bounded(sigs, limit);
  std::vector<Interpretation> out;
  Interpretation I = least_interpretation(sigs);
  out.push_back(I);
  while (next_interpretation(sigs, I)) out.push_back(I);
  return out;
}

std::optional<Interpretation> brute_force_synth(const ProcessSketch& sketch, const SpecSuite& spec,
                                                const SynthOptions& opts) {
  Interpretation I = least_interpretation(sketch.holes);
  for (;;) {
    if (verify(sketch, I, spec, opts).ok) return I;
    if (!next_interpretation(sketch.holes, I)) return std::nullopt;
  }
}

namespace {

LocalTransition strip(const LocalTransition& t) {
  LocalTransition c = t;
  c.id = -1;
  c.fired.clear();  // derived from the body; not part of identity
  return c;
}

bool same_local(const LocalTransition& a, const LocalTransition& b) {
  return a.src == b.src && a.label == b.label && a.loc == b.loc && a.handler == b.handler &&
         a.inst == b.inst && a.dst == b.dst;
}

bool same_disabled(const DisabledTransition& a, const DisabledTransition& b) {
  return a.src == b.src && a.label == b.label && a.loc == b.loc && a.handler == b.handler &&
         a.payload == b.payload;
}

}  // namespace

PortableCex make_portable(const CexEvent& ev) {
  PortableCex out;
  out.encoding = ev.encoding;
  out.producedBy = *ev.I;
  out.stage = ev.stage;
  if (ev.localCex) {
    for (int id : ev.localCex->enabledSubset) out.enabledLocal.push_back(strip(ev.ls->enabled[(size_t)id]));
    for (int id : ev.localCex->disabledSubset) out.disabledLocal.push_back(ev.ls->disabled[(size_t)id]);
    return out;
  }
  out.global = true;
  out.n = ev.gs->n;
  for (int id : ev.globalCex->enabledGlobal) {
    const auto& t = ev.gs->transitions[(size_t)id];
    PortableCex::Global g;
    g.srcLocals = ev.gs->states[(size_t)t.src].locals;
    g.dstLocals = ev.gs->states[(size_t)t.dst].locals;
    g.event = t.event;
    g.internalLoc = t.internalLoc;
    g.internalHandler = t.internalHandler;
    g.payload = t.payload;
    g.decided = t.decided;
    g.winners = t.winners;
    g.sender = t.sender;
    for (const auto& step : t.steps)
      g.steps.emplace_back(step.proc, strip(ev.gs->ls->enabled[(size_t)step.transition]));
    out.enabledGlobal.push_back(std::move(g));
  }
  for (const auto& d : ev.globalCex->disabledFacts)
    for (int f : d.facts) out.disabledLocal.push_back(ev.gs->ls->disabled[(size_t)f]);
  return out;
}

bool exhibits_in(const LocalSemantics& ls, const GlobalSemantics* gs, const PortableCex& cex) {
  for (const auto& want : cex.enabledLocal) {
    bool found = false;
    for (int id : ls.enabledBySrc[(size_t)want.src]) {
      if (same_local(ls.enabled[(size_t)id], want)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  for (const auto& want : cex.disabledLocal) {
    bool found = false;
    for (int id : ls.disabledBySrc[(size_t)want.src]) {
      if (same_disabled(ls.disabled[(size_t)id], want)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  for (const auto& want : cex.enabledGlobal) {
    if (!gs) return false;
    GlobalState q;
    q.locals = want.srcLocals;
    int qi = gs->find_state(q);
    if (qi < 0) return false;
    bool found = false;
    for (int id : gs->outgoing[(size_t)qi]) {
      const auto& t = gs->transitions[(size_t)id];
      if (t.event != want.event || t.payload != want.payload || t.decided != want.decided ||
          t.winners != want.winners || t.sender != want.sender ||
          t.internalLoc != want.internalLoc || t.internalHandler != want.internalHandler)
        continue;
      if (gs->states[(size_t)t.dst].locals != want.dstLocals) continue;
      if (t.steps.size() != want.steps.size()) continue;
      bool stepsMatch = true;
      for (size_t i = 0; i < t.steps.size(); ++i) {
        if (t.steps[i].proc != want.steps[i].first ||
            !same_local(gs->ls->enabled[(size_t)t.steps[i].transition], want.steps[i].second)) {
          stepsMatch = false;
          break;
        }
      }
      if (!stepsMatch) continue;
      found = true;
      break;
    }
    if (!found) return false;
  }
  return true;
}

bool exhibits(const ProcessSketch& sketch, const Interpretation& I, const PortableCex& cex) {
  ConcreteProcess p = complete(sketch, I);
  LocalSemantics ls = build_local_semantics(p);
  if (!cex.global) return exhibits_in(ls, nullptr, cex);
  std::optional<GlobalSemantics> gs;
  try {
    gs.emplace(build_global_semantics(p, cex.n, {}, &ls));
  } catch (const ResourceError&) {
    return false;
  }
  return exhibits_in(ls, &*gs, cex);
}

}  // namespace forge::test
