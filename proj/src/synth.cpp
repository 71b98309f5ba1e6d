#include "forge/synth.hpp"

#include <cassert>
#include <chrono>
#include <json.hpp>
#include <ostream>

#include "forge/teacher.hpp"

namespace forge {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

const char* stage_name(StageKind s) {
  switch (s) {
    case StageKind::PhaseCompatibility: return "phase-compatibility";
    case StageKind::Amenability: return "amenability";
    case StageKind::Safety: return "safety";
    case StageKind::Deadlock: return "deadlock";
    case StageKind::Liveness: return "liveness";
    case StageKind::None: return "none";
  }
  return "?";
}

bool iteration_progress_check(const std::vector<HoleSignature>& sigs, const Interpretation& I,
                              const CPtr& encoding) {
  SignatureTable tbl{&sigs};
  return !holds(negate(encoding), tbl, I);
}

namespace {

CPtr interpretation_constraint(const std::vector<HoleSignature>& sigs, const Interpretation& I) {
  std::vector<CPtr> conj;
  for (const auto& sig : sigs) {
    for (size_t f = 0; f < sig.grid_size(); ++f) {
      conj.push_back(c_cmp(CmpOp::Eq, Term::apply(sig.id, args_at(sig, f)),
                           Term::constant(I.value(sig.id, f))));
    }
  }
  return c_and(std::move(conj));
}

struct StageOutcome {
  bool violated = false;
  StageKind stage = StageKind::None;
  std::string detail;
  std::optional<LocalCex> localCex;
  std::optional<GlobalCex> globalCex;
};

}  // namespace

SynthResult synthesize(const ProcessSketch& sketch, const SpecSuite& spec, const SynthOptions& opts) {
  SynthResult result;
  auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  Solver solver(sketch.holes, opts.valueOrder);
  SignatureTable tbl{&sketch.holes};
  SolveOptions solveOpts;
  solveOpts.deterministic = opts.deterministic || opts.learner == LearnerMode::Enumerate;
  solveOpts.seed = opts.seed;
  DecidabilityOptions decOpts;
  decOpts.strictIndependence = opts.strictIndependence;
  decOpts.jobs = opts.jobs;
  GlobalBuildOptions gsOpts;
  gsOpts.stateBound = opts.stateBound;

  for (long long iter = 1; iter <= opts.maxIterations; ++iter) {
    if (opts.timeoutSeconds > 0 && elapsed() > opts.timeoutSeconds) {
      result.outcome = Outcome::Timeout;
      result.message = "timeout after " + std::to_string(iter - 1) + " iterations";
      result.stats.totalSeconds = elapsed();
      return result;
    }
    auto iterStart = Clock::now();
    IterationRecord rec;
    rec.iteration = (int)iter;

    auto I = solver.solve(solveOpts);
    if (!I) {
      result.outcome = Outcome::NoSolution;
      result.message = "constraint store unsatisfiable after " + std::to_string(iter - 1) +
                       " iterations";
      result.stats.totalSeconds = elapsed();
      return result;
    }

    ConcreteProcess proc = complete(sketch, *I);
    StageOutcome out;
    std::optional<LocalSemantics> ls;
    std::optional<GlobalSemantics> gs;
    int cutoff = -1;
    try {
      ls.emplace(build_local_semantics(proc));
      PhaseInfo phases = compute_phases(*ls);

      ConditionReport pc = check_phase_compatibility(*ls, phases, decOpts);
      if (!pc.ok) {
        out.violated = true;
        out.stage = StageKind::PhaseCompatibility;
        out.detail = pc.description;
        out.localCex = extract_local_cex(*ls, phases, *pc.pcCube, decOpts);
      } else {
        ConditionReport ca = check_amenability(*ls, spec, decOpts);
        if (!ca.ok) {
          out.violated = true;
          out.stage = StageKind::Amenability;
          out.detail = ca.description;
          out.localCex = extract_amenability_cex(*ls, *ca.amenCube, decOpts);
        } else {
          cutoff = compute_cutoff(proc, spec);
          if (opts.cutoffOverride > 0) {
            if (opts.cutoffOverride < cutoff)
              throw std::invalid_argument("cutoff override " + std::to_string(opts.cutoffOverride) +
                                          " is below the computed cutoff " + std::to_string(cutoff));
            cutoff = opts.cutoffOverride;
          }
          rec.cutoff = cutoff;
          gs.emplace(build_global_semantics(proc, cutoff, gsOpts, &*ls));
          if (auto trace = check_safety(*gs, spec)) {
            out.violated = true;
            out.stage = StageKind::Safety;
            out.detail = "safety line '" + trace->lineName + "' violated";
            out.globalCex = package_global_cex(*trace);
          } else if (opts.liveness) {
            if (auto dead = check_deadlock(*gs)) {
              out.violated = true;
              out.stage = StageKind::Deadlock;
              out.detail = "deadlock at " + gs->state_name(dead->deadState);
              out.globalCex = package_global_cex(*dead);
            } else {
              for (const auto& line : spec.liveness) {
                if (auto lasso = check_liveness(*gs, line)) {
                  out.violated = true;
                  out.stage = StageKind::Liveness;
                  out.detail = "liveness line '" + line.name + "' violated";
                  out.globalCex = package_global_cex(*lasso);
                  break;
                }
              }
            }
          }
        }
      }
    } catch (const ResourceError& e) {
      result.outcome = Outcome::ResourceLimit;
      result.message = e.what();
      result.stats.totalSeconds = elapsed();
      return result;
    }

    if (!out.violated) {
      rec.violation = StageKind::None;
      rec.constraintCount = solver.constraint_count();
      rec.seconds = std::chrono::duration<double>(Clock::now() - iterStart).count();
      result.stats.iterations.push_back(rec);
      result.outcome = Outcome::Completed;
      result.interpretation = *I;
      result.cutoff = cutoff;
      result.stats.totalSeconds = elapsed();
      if (opts.observer) {
        CexEvent ev;
        ev.iteration = (int)iter;
        ev.stage = StageKind::None;
        ev.I = &*I;
        ev.ls = &*ls;
        ev.gs = gs ? &*gs : nullptr;
        ev.cutoff = cutoff;
        opts.observer(ev);
      }
      return result;
    }

    // encode the root cause and rule it out
    Encoder encoder(*ls, EncodeOptions{opts.maxPaths});
    CPtr enc;
    if (out.localCex) {
      assert(cex_satisfies_cube(*ls, *out.localCex, decOpts) &&
             "extracted counterexample does not satisfy its own cube");
      enc = encoder.encode_local_cex(*out.localCex);
    } else {
      assert(global_cex_replays(*gs, *out.globalCex) && "global counterexample fails to replay");
      enc = encoder.encode_global_cex(*gs, *out.globalCex);
    }
    result.stats.reachesFallbacks += encoder.fallbacks();

    CPtr constraint;
    if (opts.learner == LearnerMode::Enumerate) {
      constraint = negate(interpretation_constraint(sketch.holes, *I));
    } else {
      constraint = negate(enc);
    }

    rec.violation = out.stage;
    rec.detail = out.detail;
    if (out.localCex) {
      rec.cexEnabled = out.localCex->enabledSubset.size();
      rec.cexDisabled = out.localCex->disabledSubset.size();
    } else {
      rec.cexEnabled = out.globalCex->enabledGlobal.size();
      rec.cexDisabled = out.globalCex->disabledFacts.size();
    }
    rec.progressOk = holds(enc, tbl, *I) && iteration_progress_check(sketch.holes, *I, enc);
    assert(rec.progressOk && "encoding fails to eliminate the current interpretation");

    if (opts.observer) {
      CexEvent ev;
      ev.iteration = (int)iter;
      ev.stage = out.stage;
      ev.I = &*I;
      ev.ls = &*ls;
      ev.gs = gs ? &*gs : nullptr;
      ev.localCex = out.localCex ? &*out.localCex : nullptr;
      ev.globalCex = out.globalCex ? &*out.globalCex : nullptr;
      ev.encoding = enc;
      ev.cutoff = cutoff;
      opts.observer(ev);
    }

    solver.add(constraint);
    if (opts.dumpConstraints) (*opts.dumpConstraints) << to_sexpr(constraint) << "\n";
    rec.constraintCount = solver.constraint_count();
    rec.seconds = std::chrono::duration<double>(Clock::now() - iterStart).count();
    result.stats.iterations.push_back(rec);
  }
  result.outcome = Outcome::Timeout;
  result.message = "iteration limit reached";
  result.stats.totalSeconds = elapsed();
  return result;
}

std::string trace_to_json(const GlobalSemantics& gs, const std::vector<int>& transitions) {
  const ProcessSketch& sk = gs.ls->sk();
  json arr = json::array();
  for (int id : transitions) {
    const auto& t = gs.transitions[(size_t)id];
    json e;
    e["event"] = t.event >= 0 ? sk.events[(size_t)t.event].name
                              : "internal@" + sk.locations[(size_t)t.internalLoc].name;
    json parts = json::array();
    for (const auto& step : t.steps) parts.push_back(step.proc);
    e["participants"] = parts;
    if (t.payload) e["payload"] = *t.payload;
    if (!t.decided.empty()) e["decided"] = t.decided;
    if (!t.winners.empty()) e["winners"] = t.winners;
    e["to"] = gs.state_name(t.dst);
    arr.push_back(e);
  }
  return arr.dump(2);
}

VerifyReport verify(const ProcessSketch& sketch, const Interpretation& I, const SpecSuite& spec,
                    const SynthOptions& opts, bool emitWitness) {
  VerifyReport report;
  ConcreteProcess proc = complete(sketch, I);
  LocalSemantics ls = build_local_semantics(proc);
  PhaseInfo phases = compute_phases(ls);
  DecidabilityOptions decOpts;
  decOpts.strictIndependence = opts.strictIndependence;
  decOpts.jobs = opts.jobs;

  auto push = [&](StageKind k, bool ok, std::string detail, std::string witness = "") {
    report.stages.push_back({k, ok, std::move(detail), std::move(witness)});
    if (!ok) report.ok = false;
  };

  ConditionReport pc = check_phase_compatibility(ls, phases, decOpts);
  push(StageKind::PhaseCompatibility, pc.ok, pc.ok ? "" : pc.description);
  if (!pc.ok) return report;

  ConditionReport ca = check_amenability(ls, spec, decOpts);
  push(StageKind::Amenability, ca.ok, ca.ok ? "" : ca.description);
  if (!ca.ok) return report;

  int cutoff = compute_cutoff(proc, spec);
  if (opts.cutoffOverride > 0) {
    if (opts.cutoffOverride < cutoff)
      throw std::invalid_argument("cutoff override below computed cutoff");
    cutoff = opts.cutoffOverride;
  }
  report.cutoff = cutoff;

  GlobalBuildOptions gsOpts;
  gsOpts.stateBound = opts.stateBound;
  GlobalSemantics gs = build_global_semantics(proc, cutoff, gsOpts, &ls);

  if (auto trace = check_safety(gs, spec)) {
    push(StageKind::Safety, false, "safety line '" + trace->lineName + "' violated",
         emitWitness ? trace_to_json(gs, trace->transitions) : "");
    return report;
  }
  push(StageKind::Safety, true, "");

  if (opts.liveness) {
    if (auto dead = check_deadlock(gs)) {
      push(StageKind::Deadlock, false, "deadlock at " + gs.state_name(dead->deadState),
           emitWitness ? trace_to_json(gs, dead->transitions) : "");
      return report;
    }
    push(StageKind::Deadlock, true, "");
    for (const auto& line : spec.liveness) {
      if (auto lasso = check_liveness(gs, line)) {
        std::vector<int> all = lasso->stem;
        all.insert(all.end(), lasso->cycle.begin(), lasso->cycle.end());
        push(StageKind::Liveness, false, "liveness line '" + line.name + "' violated",
             emitWitness ? trace_to_json(gs, all) : "");
        return report;
      }
    }
    push(StageKind::Liveness, true, "");
  }
  return report;
}

std::string stats_to_json(const SynthStats& stats) {
  json j;
  j["totalSeconds"] = stats.totalSeconds;
  j["iterations"] = stats.iterations.size();
  j["reachesFallbacks"] = stats.reachesFallbacks;
  json kinds;
  kinds["phaseCompatibility"] = stats.count(StageKind::PhaseCompatibility);
  kinds["amenability"] = stats.count(StageKind::Amenability);
  kinds["safety"] = stats.count(StageKind::Safety);
  kinds["deadlock"] = stats.count(StageKind::Deadlock);
  kinds["liveness"] = stats.count(StageKind::Liveness);
  j["violations"] = kinds;
  json arr = json::array();
  for (const auto& it : stats.iterations) {
    json r;
    r["iteration"] = it.iteration;
    r["stage"] = stage_name(it.violation);
    r["detail"] = it.detail;
    r["cexEnabled"] = it.cexEnabled;
    r["cexDisabled"] = it.cexDisabled;
    r["constraints"] = it.constraintCount;
    if (it.cutoff > 0) r["cutoff"] = it.cutoff;
    r["seconds"] = it.seconds;
    r["progressOk"] = it.progressOk;
    arr.push_back(r);
  }
  j["trace"] = arr;
  return j.dump(2);
}

std::string verify_report_to_json(const VerifyReport& report) {
  json j;
  j["ok"] = report.ok;
  if (report.cutoff > 0) j["cutoff"] = report.cutoff;
  json arr = json::array();
  for (const auto& s : report.stages) {
    json e;
    e["stage"] = stage_name(s.stage);
    e["ok"] = s.ok;
    if (!s.detail.empty()) e["detail"] = s.detail;
    if (!s.witnessJson.empty()) e["witness"] = json::parse(s.witnessJson);
    arr.push_back(e);
  }
  j["stages"] = arr;
  return j.dump(2);
}

}  // namespace forge
