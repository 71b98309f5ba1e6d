// Acceptance suite: one pass/fail line per criterion; nonzero exit on any
// failure. Run through ctest or directly.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "forge/printer.hpp"
#include "oracle.hpp"

using namespace forge;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Collector {
  bool extractionSound = true;
  size_t localChecked = 0, globalChecked = 0;
  std::map<std::string, std::vector<test::PortableCex>> cexs;
  bool progressOk = true;
  bool noRepeat = true;
  size_t runs = 0, iterations = 0;
};

SynthResult run_collected(Collector& C, const std::string& name, const ProcessSketch& sk,
                          const SpecSuite& spec, SynthOptions opts, bool collectCexs) {
  auto seen = std::make_shared<std::set<Interpretation>>();
  bool deterministic = opts.deterministic;
  Collector* cp = &C;
  opts.observer = [cp, seen, deterministic, collectCexs, name](const CexEvent& ev) {
    if (ev.I && deterministic && !seen->insert(*ev.I).second) cp->noRepeat = false;
    if (ev.stage == StageKind::None) return;
    if (ev.localCex) {
      ++cp->localChecked;
      if (!cex_satisfies_cube(*ev.ls, *ev.localCex)) cp->extractionSound = false;
    }
    if (ev.globalCex) {
      ++cp->globalChecked;
      if (!global_cex_replays(*ev.gs, *ev.globalCex)) cp->extractionSound = false;
    }
    if (collectCexs) cp->cexs[name].push_back(test::make_portable(ev));
  };
  auto result = synthesize(sk, spec, opts);
  ++C.runs;
  C.iterations += result.stats.iterations.size();
  for (const auto& it : result.stats.iterations)
    if (!it.progressOk) C.progressOk = false;
  return result;
}

int failures = 0;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", n, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

const char* kBenchmarks[] = {
    "gate",         "duo",     "vote",          "distributed_store", "consortium",
    "lock_service", "register", "tracker",      "flocking",          "sats",
    "sats2",        "sensor",  "sensor_reset",  "planner",           "planner_reset",
    "pcbreak",      "amenbreak",
};

// 1. The reference store completion passes every stage at the cutoff.
void criterion1() {
  auto t0 = Clock::now();
  auto [sk, spec] = test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  auto rep = verify(sk, {}, spec);
  double secs = seconds_since(t0);
  std::ostringstream os;
  bool stages = rep.ok && rep.stages.size() == 5;
  os << rep.stages.size() << " stages pass, cutoff " << rep.cutoff << ", " << secs << "s";
  for (const auto& s : rep.stages)
    if (!s.ok) os << "; " << stage_name(s.stage) << ": " << s.detail;
  report(1, "reference-completion regression", stages && secs < 60.0, os.str());
}

// 2. End-to-end synthesis on the store sketch; qualitative violation
// distribution: phase compatibility most frequent, safety least frequent
// (ties at zero count as least; amenability cannot fail for this model).
void criterion2(Collector& C) {
  auto t0 = Clock::now();
  auto [sk, spec] = test::load_corpus("distributed_store.mcy", "distributed_store.spec");
  SynthOptions opts;
  opts.seed = 352;  // documented heuristic default for this benchmark
  opts.timeoutSeconds = 890;
  auto result = run_collected(C, "distributed_store", sk, spec, opts, false);
  double secs = seconds_since(t0);
  bool ok = result.outcome == Outcome::Completed && secs < 900.0;
  std::ostringstream os;
  os << result.stats.iterations.size() << " iterations in " << secs << "s";
  if (ok) {
    ok = verify(sk, *result.interpretation, spec).ok;
    os << (ok ? ", re-verifies" : ", RE-VERIFY FAILED");
  }
  int pc = result.stats.count(StageKind::PhaseCompatibility);
  int am = result.stats.count(StageKind::Amenability);
  int sa = result.stats.count(StageKind::Safety);
  int li = result.stats.count(StageKind::Liveness) + result.stats.count(StageKind::Deadlock);
  os << "; violations pc=" << pc << " amen=" << am << " safety=" << sa << " liveness=" << li;
  bool dist = pc > 0 && pc >= am && pc >= sa && pc >= li && sa <= am && sa <= li;
  if (!dist) os << " (distribution claim failed)";
  report(2, "end-to-end synthesis", ok && dist, os.str());
}

// 3. Encoding exactness, brute-forced over every interpretation.
void criterion3(Collector& C) {
  auto t0 = Clock::now();
  std::vector<std::pair<std::string, std::string>> runs = {
      {"gate", ""},      {"gate", "safety S: never 1 at (loc = A)"},
      {"duo", ""},       {"duo", "safety S: never 1 at (loc = W)"},
      {"vote", ""},      {"vote", "liveness L: eventually 1 at (loc = C and v = 2)"},
      {"pcbreak", ""},   {"amenbreak", ""},
  };
  for (const auto& [name, inlineSpec] : runs) {
    auto sk = test::must_parse(test::read_corpus_file(name + ".mcy"));
    SpecSuite spec = inlineSpec.empty()
                         ? test::must_parse_spec(test::read_corpus_file(name + ".spec"), sk)
                         : test::must_parse_spec(inlineSpec, sk);
    for (int mode = 0; mode < 4; ++mode) {
      SynthOptions opts;
      opts.deterministic = mode == 0;
      opts.seed = (unsigned long long)mode;
      opts.timeoutSeconds = 60;
      run_collected(C, name, sk, spec, opts, true);
    }
  }
  // extra seeds on the crafted sketches for condition-cube coverage
  for (const char* name : {"pcbreak", "amenbreak"}) {
    auto [sk, spec] = test::load_corpus(std::string(name) + ".mcy", std::string(name) + ".spec");
    for (unsigned long long seed = 3; seed < 6; ++seed) {
      SynthOptions opts;
      opts.seed = seed;
      opts.timeoutSeconds = 60;
      run_collected(C, name, sk, spec, opts, true);
    }
  }

  size_t pairs = 0, cexCount = 0, mismatches = 0;
  for (const auto& [name, cexs] : C.cexs) {
    cexCount += cexs.size();
    auto sk = test::must_parse(test::read_corpus_file(name + ".mcy"));
    SignatureTable tbl{&sk.holes};
    auto interps = test::all_interpretations(sk.holes, 10000);
    for (const auto& I : interps) {
      ConcreteProcess p = complete(sk, I);
      LocalSemantics ls = build_local_semantics(p);
      std::map<int, GlobalSemantics> gsByN;
      for (const auto& cex : cexs) {
        bool enc = holds(cex.encoding, tbl, I);
        bool exh;
        if (!cex.global) {
          exh = test::exhibits_in(ls, nullptr, cex);
        } else {
          auto it = gsByN.find(cex.n);
          if (it == gsByN.end())
            it = gsByN.emplace(cex.n, build_global_semantics(p, cex.n, {}, &ls)).first;
          exh = test::exhibits_in(ls, &it->second, cex);
        }
        ++pairs;
        if (enc != exh) ++mismatches;
      }
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << cexCount << " counterexamples, " << pairs << " (cex, interpretation) checks, " << mismatches
     << " mismatches, " << secs << "s";
  report(3, "encoding exactness", mismatches == 0 && pairs > 0 && secs < 300.0, os.str());
}

// 4. Progress: every iteration eliminated its interpretation; deterministic
// runs never propose the same interpretation twice.
void criterion4(const Collector& C) {
  std::ostringstream os;
  os << C.runs << " runs, " << C.iterations << " iterations";
  report(4, "progress (Lemma-1 check)", C.progressOk && C.noRepeat && C.iterations > 0, os.str());
}

// 5. Solver mode and enumerate mode agree on Completed-vs-NoSolution.
void criterion5(Collector& C) {
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"gate", ""},      {"gate", "safety S: never 1 at (loc = A)"},
      {"duo", ""},       {"duo", "safety S: never 1 at (loc = W)"},
      {"vote", ""},      {"pcbreak", ""},
      {"amenbreak", ""},
  };
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, inlineSpec] : pairs) {
    auto sk = test::must_parse(test::read_corpus_file(name + ".mcy"));
    SpecSuite spec = inlineSpec.empty()
                         ? test::must_parse_spec(test::read_corpus_file(name + ".spec"), sk)
                         : test::must_parse_spec(inlineSpec, sk);
    SynthOptions solverOpts;
    solverOpts.deterministic = true;
    solverOpts.timeoutSeconds = 120;
    SynthOptions enumOpts = solverOpts;
    enumOpts.learner = LearnerMode::Enumerate;
    auto a = run_collected(C, name, sk, spec, solverOpts, false);
    auto b = run_collected(C, name, sk, spec, enumOpts, false);
    if (a.outcome != b.outcome) {
      ok = false;
      os << name << ": solver vs enumerate disagree; ";
      continue;
    }
    if (a.outcome == Outcome::Completed &&
        (!verify(sk, *a.interpretation, spec).ok || !verify(sk, *b.interpretation, spec).ok)) {
      ok = false;
      os << name << ": completion failed re-verification; ";
    }
  }
  if (os.str().empty()) {
    std::ostringstream head;
    head << pairs.size() << " (sketch, spec) pairs agree; completions re-verify";
    report(5, "CEGIS equivalent to enumeration", ok, head.str());
    return;
  }
  report(5, "CEGIS equivalent to enumeration", ok, os.str());
}

// 6. Extraction soundness on every counterexample produced above.
void criterion6(const Collector& C) {
  std::ostringstream os;
  os << C.localChecked << " local cubes re-satisfied, " << C.globalChecked
     << " global witnesses replayed";
  report(6, "extraction soundness", C.extractionSound && C.localChecked > 0 && C.globalChecked > 0,
         os.str());
}

// 7. Every benchmark that synthesizes is also safe one above its cutoff.
void criterion7(Collector& C) {
  bool ok = true;
  int synthesized = 0;
  std::ostringstream os;
  for (const char* name : kBenchmarks) {
    auto [sk, spec] = test::load_corpus(std::string(name) + ".mcy", std::string(name) + ".spec");
    SynthOptions opts;
    opts.deterministic = true;
    opts.timeoutSeconds = 120;
    auto result = run_collected(C, name, sk, spec, opts, false);
    if (result.outcome != Outcome::Completed) continue;
    ++synthesized;
    try {
      ConcreteProcess p = complete(sk, *result.interpretation);
      LocalSemantics ls = build_local_semantics(p);
      GlobalSemantics gs = build_global_semantics(p, result.cutoff + 1, {}, &ls);
      if (auto trace = check_safety(gs, spec)) {
        ok = false;
        os << name << ": unsafe at cutoff+1 (line " << trace->lineName << "); ";
      }
    } catch (const ResourceError& e) {
      os << name << ": state bound hit at cutoff+1; ";
    }
  }
  std::ostringstream head;
  head << synthesized << "/" << (int)std::size(kBenchmarks) << " benchmarks synthesized"
       << (os.str().empty() ? "" : "; ") << os.str();
  report(7, "cutoff consistency at c+1", ok && synthesized > 0, head.str());
}

// 8. The liveness filter matters: without it some seeded run's first
// completion deadlocks or livelocks; with it the completion is live.
void criterion8(Collector& C) {
  auto [sk, spec] = test::load_corpus("gate.mcy", "gate.spec");
  bool sawDud = false;
  for (unsigned long long seed = 0; seed < 5 && !sawDud; ++seed) {
    SynthOptions noLive;
    noLive.liveness = false;
    noLive.seed = seed;
    noLive.timeoutSeconds = 60;
    auto quick = run_collected(C, "gate", sk, spec, noLive, false);
    if (quick.outcome != Outcome::Completed) continue;
    auto recheck = verify(sk, *quick.interpretation, spec);
    for (const auto& s : recheck.stages)
      if (!s.ok && (s.stage == StageKind::Deadlock || s.stage == StageKind::Liveness)) sawDud = true;
  }
  SynthOptions full;
  full.deterministic = true;
  full.timeoutSeconds = 60;
  auto best = run_collected(C, "gate", sk, spec, full, false);
  bool livePasses = false;
  if (best.outcome == Outcome::Completed) {
    ConcreteProcess p = complete(sk, *best.interpretation);
    LocalSemantics ls = build_local_semantics(p);
    GlobalSemantics gs = build_global_semantics(p, 2, {}, &ls);
    livePasses = !check_liveness(gs, spec.liveness[0]).has_value();
  }
  std::ostringstream os;
  os << (sawDud ? "an unfiltered completion is not live" : "no seeded run produced a dud")
     << "; the filtered completion " << (livePasses ? "satisfies" : "VIOLATES")
     << " eventually 1 at (loc = B)";
  report(8, "liveness filter effect", sawDud && livePasses, os.str());
}

// 9. The annotated store sketch admits exactly 163,840,000 completions.
void criterion9() {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store.mcy"));
  std::string n = count_interpretations(sk.holes);
  report(9, "interpretation count (conditional on corpus annotations)", n == "163840000", n);
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  Collector C;
  criterion1();
  criterion2(C);
  criterion3(C);
  criterion5(C);
  criterion7(C);
  criterion8(C);
  criterion4(C);  // aggregates every run above
  criterion6(C);
  criterion9();
  std::printf("acceptance: %s (%d failed, %.1fs)\n", failures == 0 ? "PASS" : "FAIL", failures,
              seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
