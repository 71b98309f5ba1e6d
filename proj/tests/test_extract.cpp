#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forge/extract.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

Interpretation mk(std::map<int, std::vector<int>> cells) {
  Interpretation I;
  I.funcs = std::move(cells);
  return I;
}

// Condition-1 violation with a disabled reacting handler as witness.
const char* kOneWay = R"(process OneWay
events
  br ping
initial location A
  on bcast(ping) do
    goto B
  on recv(ping) when false do
    goto B
location B
  on recv(ping) do
    goto B
)";

// Pure condition-3 violation: M lags behind its phase mates.
const char* kCond3 = R"(process Cond3
events
  br f
  br g
initial location A
  on partition<p>(All, 1)
    win: goto S
    lose: goto S
location S
  on _ do
    goto S2
  on _ do
    goto M
location S2
  on recv(f) do
    goto S2
  on bcast(f) do
    goto S2
  on recv(g) do
    goto S2
location M
  on recv(f) when false do
    goto M
  on bcast(g) do
    goto M
  on recv(g) do
    goto M
)";

LocalCex extract_first(const LocalSemantics& ls, const PhaseInfo& phases) {
  auto rep = check_phase_compatibility(ls, phases);
  REQUIRE(!rep.ok);
  return extract_local_cex(ls, phases, *rep.pcCube);
}

}  // namespace

TEST_CASE("condition-1 witness: the acting transition plus the disabled reaction") {
  auto sk = test::must_parse(kOneWay);
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  LocalCex cex = extract_first(ls, phases);
  REQUIRE(cex.pcCube);
  CHECK(cex.pcCube->condition == 1);
  REQUIRE(cex.enabledSubset.size() == 1);
  CHECK(ls.enabled[(size_t)cex.enabledSubset[0]].label.kind == ActionLabel::Act);
  REQUIRE(cex.disabledSubset.size() == 1);
  CHECK(ls.disabled[(size_t)cex.disabledSubset[0]].label.kind == ActionLabel::React);
  CHECK(cex_satisfies_cube(ls, cex));

  // minimality: dropping any single element falsifies the cube
  for (size_t i = 0; i < cex.enabledSubset.size(); ++i) {
    LocalCex smaller = cex;
    smaller.enabledSubset.erase(smaller.enabledSubset.begin() + (long)i);
    CHECK(!cex_satisfies_cube(ls, smaller));
  }
  for (size_t i = 0; i < cex.disabledSubset.size(); ++i) {
    LocalCex smaller = cex;
    smaller.disabledSubset.erase(smaller.disabledSubset.begin() + (long)i);
    CHECK(!cex_satisfies_cube(ls, smaller));
  }
}

TEST_CASE("pickMinimal prefers the smaller cube witness") {
  // ping's violation needs 2 transitions, pong's needs 3
  auto sk = test::must_parse(R"(process TwoBad
events
  br ping
  br pong
initial location A
  on bcast(ping) do
    goto B
  on recv(ping) when false do
    goto B
location B
  on bcast(pong) do
    goto B
  on recv(pong) when false do
    goto B
  on recv(pong) when false do
    goto A
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  LocalCex cex = extract_first(ls, phases);
  CHECK(cex.size() == 2);
  CHECK(ls.sk().events[(size_t)cex.pcCube->e].name == "ping");
}

TEST_CASE("condition-3 extraction: the worked union of literal witnesses") {
  auto sk = test::must_parse(kCond3);
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  auto rep = check_phase_compatibility(ls, phases);
  REQUIRE(!rep.ok);
  REQUIRE(rep.pcCube);
  REQUIRE(rep.pcCube->condition == 3);
  int M = ls.state_index({sk.location_index("M"), {}});
  CHECK(rep.pcCube->tState == M);
  LocalCex cex = extract_local_cex(ls, phases, *rep.pcCube);
  CHECK(cex_satisfies_cube(ls, cex));
  // includes the internal anchor and the disabled (t, R(f), bot)
  bool hasInternal = false;
  for (int id : cex.enabledSubset)
    if (ls.enabled[(size_t)id].label.kind == ActionLabel::Internal) hasInternal = true;
  CHECK(hasInternal);
  bool hasDisabledReact = false;
  for (int id : cex.disabledSubset) {
    const auto& d = ls.disabled[(size_t)id];
    if (d.src == M && d.label.kind == ActionLabel::React &&
        ls.sk().events[(size_t)d.label.event].name == "f")
      hasDisabledReact = true;
  }
  CHECK(hasDisabledReact);
  // phase membership witnesses are part of the subset: something establishes
  // M's membership (a g-labeled transition at M)
  bool hasG = false;
  for (int id : cex.enabledSubset) {
    const auto& t = ls.enabled[(size_t)id];
    if (t.label.event >= 0 && ls.sk().events[(size_t)t.label.event].name == "g") hasG = true;
  }
  CHECK(hasG);
}

TEST_CASE("no-reacting-path witness at a state without internal moves") {
  auto sk = test::must_parse(R"(process Stuck
events
  br f
initial location A
  on bcast(f) do
    goto T
  on recv(f) do
    goto T
location T
  on _ when false do
    goto A
  on recv(f) when false do
    goto T
)");
  auto ls = build_local_semantics(complete(sk, {}));
  int T = ls.state_index({sk.location_index("T"), {}});
  int f = 0;
  std::vector<int> disabled;
  auto enabled = witness_no_reacting_path(ls, T, f, disabled);
  CHECK(enabled.empty());
  CHECK(disabled.size() == 2);  // the disabled internal and the disabled reaction
}

TEST_CASE("amenability cex 2(a): path plus the offending branch") {
  auto sk = test::must_parse(R"(process Back
events
  env rz go
  br jump
initial location A
  on recv(go) do
    goto T
  on bcast(jump) do
    goto T
  on recv(jump) do
    goto A
location T
  on recv(go) do
    goto T
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto spec = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk);
  auto rep = check_amenability(ls, spec);
  REQUIRE(!rep.ok);
  REQUIRE(rep.amenCube->clause == 2);
  LocalCex cex = extract_amenability_cex(ls, *rep.amenCube);
  CHECK(cex_satisfies_cube(ls, cex));
  CHECK(cex.enabledSubset.size() >= 2);  // the independent path and the branch
  CHECK(cex.disabledSubset.empty());
}

TEST_CASE("amenability cex 2(b): path, branch, and escape evidence") {
  auto sk = test::must_parse(R"(process Esc
events
  env rz go
  br leak
initial location A
  on recv(go) do
    goto T
  on _ do
    goto D
location T
  on recv(go) do
    goto T
location D
  on bcast(leak) do
    goto T
  on recv(leak) do
    goto D
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto spec = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk);
  auto rep = check_amenability(ls, spec);
  REQUIRE(!rep.ok);
  REQUIRE(rep.amenCube->clause == 3);
  LocalCex cex = extract_amenability_cex(ls, *rep.amenCube);
  CHECK(cex_satisfies_cube(ls, cex));
  // dropping the branch transition falsifies the cube
  LocalCex smaller = cex;
  auto it = std::find(smaller.enabledSubset.begin(), smaller.enabledSubset.end(),
                      rep.amenCube->yTrans);
  REQUIRE(it != smaller.enabledSubset.end());
  smaller.enabledSubset.erase(it);
  CHECK(!cex_satisfies_cube(ls, smaller));
}

TEST_CASE("global packaging: trace, deadlock, lasso") {
  auto duo = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto duoGs = build_global_semantics(complete(duo, {}), 2);
  auto trace = check_safety(duoGs, test::must_parse_spec("safety S: never 1 at (loc = W)", duo));
  REQUIRE(trace);
  GlobalCex t = package_global_cex(*trace);
  CHECK(t.shape == GlobalCexShape::Trace);
  CHECK(t.enabledGlobal.size() == 1);
  CHECK(t.disabledFacts.empty());
  CHECK(global_cex_replays(duoGs, t));

  auto gate = test::must_parse(test::read_corpus_file("gate.mcy"));
  int B = gate.location_index("B");
  auto closedGs = build_global_semantics(complete(gate, mk({{1, {0, 0}}, {2, {B, B}}})), 2);
  auto dead = check_deadlock(closedGs);
  REQUIRE(dead);
  GlobalCex d = package_global_cex(*dead);
  CHECK(d.shape == GlobalCexShape::Deadlock);
  CHECK(d.enabledGlobal.empty());
  CHECK(d.disabledFacts.size() == 2);
  CHECK(global_cex_replays(closedGs, d));

  int A = gate.location_index("A");
  auto loopGs = build_global_semantics(complete(gate, mk({{1, {1, 1}}, {2, {A, A}}})), 2);
  auto spec = test::must_parse_spec("liveness L: eventually 1 at (loc = B)", gate);
  auto lasso = check_liveness(loopGs, spec.liveness[0]);
  REQUIRE(lasso);
  GlobalCex l = package_global_cex(*lasso);
  CHECK(l.shape == GlobalCexShape::Lasso);
  CHECK(!l.enabledGlobal.empty());
  CHECK(l.disabledFacts.empty());
  CHECK(global_cex_replays(loopGs, l));
}
