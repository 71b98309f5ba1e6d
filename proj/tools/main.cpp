#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "forge/parser.hpp"
#include "forge/printer.hpp"
#include "forge/constraint.hpp"
#include "forge/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoSolution = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInputError = 3;

struct CommonArgs {
  std::string modelPath;
  std::string specPath;
  int cutoff = 0;
  double timeout = 0;
  long long maxIters = 1000000;
  std::string learner = "solver";
  bool noLiveness = false;
  bool deterministic = false;
  bool strictIndependence = false;
  unsigned long long seed = 0;
  std::string statsPath;
  bool emitWitness = false;
  int jobs = 1;
  int maxCard = 8;
  bool traceCex = false;
  bool dumpConstraints = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

size_t state_bound_from_env() {
  const char* v = std::getenv("AGREEMENT_FORGE_STATE_BOUND");
  if (!v) return 5000000;
  return (size_t)std::strtoull(v, nullptr, 10);
}

int load(const CommonArgs& args, forge::ProcessSketch& sketch, forge::SpecSuite& spec,
         bool needSpec) {
  auto sk = forge::parse_sketch(read_file(args.modelPath), args.maxCard);
  for (const auto& d : sk.diagnostics) std::cerr << args.modelPath << ": " << format_diagnostic(d) << "\n";
  if (!sk.ok()) return kExitInputError;
  sketch = std::move(sk.sketch);
  if (!args.specPath.empty()) {
    auto sp = forge::parse_spec(read_file(args.specPath));
    for (const auto& d : sp.diagnostics)
      std::cerr << args.specPath << ": " << format_diagnostic(d) << "\n";
    if (!sp.ok()) return kExitInputError;
    spec = std::move(sp.suite);
  } else if (needSpec) {
    std::cerr << "a specification file is required\n";
    return kExitInputError;
  }
  auto diags = forge::validate(sketch, spec);
  for (const auto& d : diags) std::cerr << format_diagnostic(d) << "\n";
  if (forge::has_errors(diags)) return kExitInputError;
  return kExitOk;
}

forge::SynthOptions options_of(const CommonArgs& args) {
  forge::SynthOptions opts;
  opts.maxIterations = args.maxIters;
  opts.timeoutSeconds = args.timeout;
  opts.cutoffOverride = args.cutoff;
  opts.learner = args.learner == "enumerate" ? forge::LearnerMode::Enumerate
                                             : forge::LearnerMode::Solver;
  opts.deterministic = args.deterministic;
  opts.seed = args.seed;
  opts.liveness = !args.noLiveness;
  opts.strictIndependence = args.strictIndependence;
  opts.stateBound = state_bound_from_env();
  opts.jobs = args.jobs;
  if (args.dumpConstraints) opts.dumpConstraints = &std::cerr;
  if (args.traceCex) {
    opts.observer = [](const forge::CexEvent& ev) {
      if (ev.stage == forge::StageKind::None) return;
      std::cerr << "cex " << ev.iteration << " [" << forge::stage_name(ev.stage) << "]";
      if (ev.localCex) {
        std::cerr << " " << ev.localCex->description << " | enabled "
                  << ev.localCex->enabledSubset.size() << ", disabled "
                  << ev.localCex->disabledSubset.size() << "\n  transitions:";
        for (int id : ev.localCex->enabledSubset) {
          const auto& t = ev.ls->enabled[(size_t)id];
          std::cerr << " " << ev.ls->state_name(t.src) << "->" << ev.ls->state_name(t.dst);
        }
        for (int id : ev.localCex->disabledSubset)
          std::cerr << " " << ev.ls->state_name(ev.ls->disabled[(size_t)id].src) << "-/->";
      }
      if (ev.globalCex) {
        std::cerr << " line '" << ev.globalCex->lineName << "' | transitions "
                  << ev.globalCex->enabledGlobal.size() << ", disabled facts "
                  << ev.globalCex->disabledFacts.size();
      }
      std::cerr << "\n  encoding: " << forge::to_sexpr(ev.encoding) << "\n";
    };
  }
  return opts;
}

void write_stats(const std::string& path, const forge::SynthStats& stats) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << forge::stats_to_json(stats) << "\n";
}

forge::Interpretation empty_interpretation(const forge::ProcessSketch& sk) {
  return forge::least_interpretation(sk.holes);
}

void print_report(const forge::VerifyReport& report, bool emitWitness) {
  for (const auto& s : report.stages) {
    std::cout << (s.ok ? "[pass] " : "[FAIL] ") << forge::stage_name(s.stage);
    if (!s.detail.empty()) std::cout << ": " << s.detail;
    std::cout << "\n";
    if (emitWitness && !s.witnessJson.empty()) std::cout << s.witnessJson << "\n";
  }
  if (report.cutoff > 0) std::cout << "cutoff: " << report.cutoff << "\n";
}

int cmd_synth(const CommonArgs& args, const std::string& outPath) {
  forge::ProcessSketch sketch;
  forge::SpecSuite spec;
  if (int rc = load(args, sketch, spec, true)) return rc;
  auto opts = options_of(args);
  auto result = forge::synthesize(sketch, spec, opts);
  write_stats(args.statsPath, result.stats);
  switch (result.outcome) {
    case forge::Outcome::Completed: {
      std::cout << "completed in " << result.stats.iterations.size() << " iterations (cutoff "
                << result.cutoff << ", " << result.stats.totalSeconds << "s)\n";
      std::cout << "// hole assignment\n"
                << forge::interpretation_to_string(sketch.holes, *result.interpretation, &sketch);
      std::string completed = forge::print_completed(sketch, *result.interpretation);
      std::string path = outPath;
      if (path.empty()) {
        path = args.modelPath;
        auto slash = path.find_last_of('/');
        std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
        auto dot = base.find_last_of('.');
        if (dot != std::string::npos) base = base.substr(0, dot);
        path = base + "_completed.mcy";
      }
      std::ofstream out(path);
      out << completed;
      std::cout << "completion written to " << path << "\n";
      return kExitOk;
    }
    case forge::Outcome::NoSolution:
      std::cout << "no solution: " << result.message << "\n";
      return kExitNoSolution;
    case forge::Outcome::Timeout:
      std::cout << "timeout: " << result.message << "\n";
      return kExitTimeout;
    case forge::Outcome::ResourceLimit:
      std::cout << "resource limit: " << result.message << "\n";
      return kExitTimeout;
  }
  return kExitInputError;
}

int cmd_verify(const CommonArgs& args) {
  forge::ProcessSketch sketch;
  forge::SpecSuite spec;
  if (int rc = load(args, sketch, spec, true)) return rc;
  if (!sketch.holes.empty()) {
    std::cerr << "verify requires a hole-free model (" << sketch.holes.size() << " holes present)\n";
    return kExitInputError;
  }
  auto report = forge::verify(sketch, empty_interpretation(sketch), spec, options_of(args),
                              args.emitWitness);
  print_report(report, args.emitWitness);
  return report.ok ? kExitOk : kExitNoSolution;
}

int cmd_phases(const CommonArgs& args) {
  forge::ProcessSketch sketch;
  forge::SpecSuite spec;
  if (int rc = load(args, sketch, spec, false)) return rc;
  if (!sketch.holes.empty()) {
    std::cerr << "phases requires a hole-free model\n";
    return kExitInputError;
  }
  auto proc = forge::complete(sketch, empty_interpretation(sketch));
  auto ls = forge::build_local_semantics(proc);
  auto phases = forge::compute_phases(ls);
  forge::DecidabilityOptions decOpts;
  decOpts.strictIndependence = args.strictIndependence;
  auto pc = forge::check_phase_compatibility(ls, phases, decOpts);
  std::ostringstream os;
  os << "{\n  \"corePhases\": [";
  for (size_t i = 0; i < phases.cores.size(); ++i) {
    const auto& c = phases.cores[i];
    os << (i ? "," : "") << "\n    {\"event\": \"" << sketch.events[(size_t)c.event].name
       << "\", \"side\": \"" << (c.sourceSide ? "source" : "destination") << "\", \"states\": [";
    for (size_t j = 0; j < c.states.size(); ++j)
      os << (j ? ", " : "") << "\"" << ls.state_name(c.states[j]) << "\"";
    os << "]}";
  }
  os << "\n  ],\n  \"mergedPhases\": [";
  for (size_t i = 0; i < phases.merged.size(); ++i) {
    os << (i ? "," : "") << "\n    [";
    for (size_t j = 0; j < phases.merged[i].states.size(); ++j)
      os << (j ? ", " : "") << "\"" << ls.state_name(phases.merged[i].states[j]) << "\"";
    os << "]";
  }
  os << "\n  ],\n  \"phaseCompatibility\": {\"ok\": " << (pc.ok ? "true" : "false");
  if (!pc.ok) os << ", \"violation\": \"" << pc.description << "\"";
  os << "}";
  if (!spec.safety.empty()) {
    auto ca = forge::check_amenability(ls, spec, decOpts);
    os << ",\n  \"amenability\": {\"ok\": " << (ca.ok ? "true" : "false");
    if (!ca.ok) os << ", \"violation\": \"" << ca.description << "\"";
    os << "}";
  }
  os << "\n}\n";
  std::cout << os.str();
  return kExitOk;
}

int cmd_count(const CommonArgs& args) {
  forge::ProcessSketch sketch;
  forge::SpecSuite spec;
  if (int rc = load(args, sketch, spec, false)) return rc;
  std::cout << forge::count_interpretations(sketch.holes) << "\n";
  return kExitOk;
}

int cmd_dump(const CommonArgs& args, const std::string& what, int n) {
  forge::ProcessSketch sketch;
  forge::SpecSuite spec;
  if (int rc = load(args, sketch, spec, false)) return rc;
  if (what == "ast") {
    std::cout << forge::ast_to_json(sketch) << "\n";
    return kExitOk;
  }
  if (!sketch.holes.empty()) {
    std::cerr << "dump --" << what << " requires a hole-free model\n";
    return kExitInputError;
  }
  auto proc = forge::complete(sketch, empty_interpretation(sketch));
  auto ls = forge::build_local_semantics(proc);
  if (what == "ls") {
    std::cout << forge::to_dot(ls);
    return kExitOk;
  }
  forge::GlobalBuildOptions gsOpts;
  gsOpts.stateBound = state_bound_from_env();
  auto gs = forge::build_global_semantics(proc, n, gsOpts, &ls);
  std::cout << forge::to_dot(gs);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agreement-forge: sketch completion for agreement-based protocol processes"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string outPath, dumpWhat = "ast";
  int dumpN = 2;

  auto add_common = [&](CLI::App* cmd, bool withSpec) {
    cmd->add_option("model", args.modelPath, "model/sketch file (.mcy)")->required();
    if (withSpec) cmd->add_option("spec", args.specPath, "specification file (.spec)");
    cmd->add_option("--cutoff", args.cutoff, "override the computed cutoff (larger only)");
    cmd->add_option("--timeout", args.timeout, "wall-clock timeout in seconds");
    cmd->add_option("--max-iters", args.maxIters, "iteration limit");
    cmd->add_option("--learner", args.learner, "solver|enumerate")
        ->check(CLI::IsMember({"solver", "enumerate"}));
    cmd->add_flag("--no-liveness", args.noLiveness, "skip deadlock and liveness stages");
    cmd->add_flag("--deterministic", args.deterministic,
                  "lexicographically least interpretations");
    cmd->add_flag("--strict-independence", args.strictIndependence,
                  "independence = internal transitions only");
    cmd->add_option("--seed", args.seed, "solver tie-break seed");
    cmd->add_option("--stats", args.statsPath, "write per-iteration stats JSON");
    cmd->add_flag("--emit-witness", args.emitWitness, "serialize counterexample witnesses");
    cmd->add_option("--jobs", args.jobs, "parallel condition-cube checking");
    cmd->add_option("--max-card", args.maxCard, "default cardinality-hole upper bound");
    cmd->add_flag("--trace-cex", args.traceCex, "pretty-print each counterexample");
    cmd->add_flag("--dump-constraints", args.dumpConstraints,
                  "emit the constraint store as s-expressions");
  };

  auto* synth = app.add_subcommand("synth", "complete a sketch against a specification");
  add_common(synth, true);
  synth->add_option("--out", outPath, "path for the completed model");

  auto* verify = app.add_subcommand("verify", "check a completed model against a specification");
  add_common(verify, true);

  auto* phasesCmd = app.add_subcommand("phases", "print phases and condition verdicts as JSON");
  add_common(phasesCmd, true);

  auto* count = app.add_subcommand("count", "print the number of possible completions");
  add_common(count, false);

  auto* dump = app.add_subcommand("dump", "emit AST/semantics artifacts");
  add_common(dump, true);
  dump->add_option("--what", dumpWhat, "ast|ls|gs")->check(CLI::IsMember({"ast", "ls", "gs"}));
  bool dumpAst = false, dumpLs = false, dumpGs = false;
  dump->add_flag("--dump-ast", dumpAst, "emit the AST as JSON");
  dump->add_flag("--dump-ls", dumpLs, "emit the local semantics as DOT");
  dump->add_flag("--dump-gs", dumpGs, "emit the global semantics as DOT");
  dump->add_option("-n", dumpN, "system size for --what gs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (synth->parsed()) return cmd_synth(args, outPath);
    if (verify->parsed()) return cmd_verify(args);
    if (phasesCmd->parsed()) return cmd_phases(args);
    if (count->parsed()) return cmd_count(args);
    if (dump->parsed()) {
      if (dumpAst) dumpWhat = "ast";
      if (dumpLs) dumpWhat = "ls";
      if (dumpGs) dumpWhat = "gs";
      return cmd_dump(args, dumpWhat, dumpN);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
