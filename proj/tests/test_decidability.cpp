#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "forge/decidability.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

Interpretation mk(std::map<int, std::vector<int>> cells) {
  Interpretation I;
  I.funcs = std::move(cells);
  return I;
}

// Independent path to the target plus a non-returning branch through a
// broadcast; fails amenability clause 2(b).
const char* kEscape = R"(process Esc
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
)";

// A non-independent transition between two states of the independent error
// path; fails amenability clause 2(a).
const char* kBack = R"(process Back
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
)";

}  // namespace

TEST_CASE("duo core phases: src(p) and dst(p)") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  REQUIRE(phases.cores.size() == 2);
  CHECK(phases.cores[0].sourceSide);
  CHECK(phases.cores[0].states == std::vector<int>{ls.state_index({sk.location_index("C"), {}})});
  CHECK(!phases.cores[1].sourceSide);
  CHECK(phases.cores[1].states ==
        std::vector<int>{ls.state_index({sk.location_index("W"), {}}),
                         ls.state_index({sk.location_index("L"), {}})});
}

TEST_CASE("no globally-synchronizing events: no phases") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  auto ls = build_local_semantics(complete(sk, mk({{1, {1, 1}}, {2, {1, 1}}})));
  CHECK(compute_phases(ls).cores.empty());
}

TEST_CASE("vote core phases from the 4-state enumeration") {
  auto sk = test::must_parse(test::read_corpus_file("vote.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  int C = sk.location_index("C"), D = sk.location_index("D");
  REQUIRE(phases.cores.size() == 2);
  CHECK(phases.cores[0].states ==
        std::vector<int>{ls.state_index({C, {1}}), ls.state_index({C, {2}})});
  CHECK(phases.cores[1].states ==
        std::vector<int>{ls.state_index({D, {1}}), ls.state_index({D, {2}})});
}

TEST_CASE("duo same-phase witness for (W, L): case A via dst(p)") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  int W = ls.state_index({sk.location_index("W"), {}});
  int L = ls.state_index({sk.location_index("L"), {}});
  auto w = same_phase_witness(ls, phases, W, L);
  REQUIRE(w);
  CHECK(w->caseA);
  REQUIRE(w->transitions.size() == 2);
  const auto& t0 = ls.enabled[(size_t)w->transitions[0]];
  const auto& t1 = ls.enabled[(size_t)w->transitions[1]];
  CHECK(t0.label.kind == ActionLabel::Act);
  CHECK(t0.dst == W);
  CHECK(t1.label.kind == ActionLabel::React);
  CHECK(t1.dst == L);
  // reflexivity: a single membership transition
  auto self = same_phase_witness(ls, phases, W, W);
  REQUIRE(self);
  CHECK(self->caseA);
  CHECK(self->transitions.size() == 1);
}

TEST_CASE("states in unconnected core phases share no phase") {
  auto sk = test::must_parse(R"(process Split
initial location A
  on partition<p>(All, 1)
    win: goto B
    lose: goto B
location B
  on partition<q>(All, 1)
    win: goto C
    lose: goto C
location C
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  int a = ls.state_index({sk.location_index("A"), {}});
  int c = ls.state_index({sk.location_index("C"), {}});
  CHECK(!same_phase_witness(ls, phases, a, c));
  // dst(p) and src(q) share state B and therefore merge
  int b = ls.state_index({sk.location_index("B"), {}});
  auto w = same_phase_witness(ls, phases, b, b);
  CHECK(w);
}

TEST_CASE("witness symmetry on merged phases") {
  auto sk = test::must_parse(R"(process Chain
initial location A
  on partition<p>(All, 1)
    win: goto B
    lose: goto B
location B
  on _ do
    goto C
location C
  on partition<q>(All, 1)
    win: goto D
    lose: goto D
location D
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  int b = ls.state_index({sk.location_index("B"), {}});
  int c = ls.state_index({sk.location_index("C"), {}});
  auto w1 = same_phase_witness(ls, phases, b, c);
  auto w2 = same_phase_witness(ls, phases, c, b);
  REQUIRE(w1);
  REQUIRE(w2);
  CHECK(!w1->caseA);
  // the connecting internal path B -> C is part of the witness
  bool hasInternal = false;
  for (int id : w1->transitions)
    if (ls.enabled[(size_t)id].label.kind == ActionLabel::Internal) hasInternal = true;
  CHECK(hasInternal);
}

TEST_CASE("duo passes phase compatibility vacuously") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto rep = check_phase_compatibility(ls, compute_phases(ls));
  CHECK(rep.ok);
}

TEST_CASE("acting without reacting fails condition 1") {
  auto sk = test::must_parse(R"(process OneWay
events
  br ping
initial location A
  on bcast(ping) do
    goto B
location B
  on recv(ping) do
    goto B
)");
  auto ls = build_local_semantics(complete(sk, {}));
  auto rep = check_phase_compatibility(ls, compute_phases(ls));
  REQUIRE(!rep.ok);
  REQUIRE(rep.pcCube);
  CHECK(rep.pcCube->condition == 1);
  CHECK(rep.pcCube->missingAt == ls.state_index({sk.location_index("A"), {}}));
}

TEST_CASE("reference store completion is phase compatible and amenable") {
  auto [sk, spec] =
      test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  auto ls = build_local_semantics(complete(sk, {}));
  auto rep = check_phase_compatibility(ls, compute_phases(ls));
  CHECK_MESSAGE(rep.ok, rep.description);
  auto ca = check_amenability(ls, spec);
  CHECK_MESSAGE(ca.ok, ca.description);
}

TEST_CASE("independence classification") {
  auto sk = test::must_parse(kEscape);
  auto ls = build_local_semantics(complete(sk, {}));
  bool sawInternal = false, sawEnvReact = false, sawBroadcastAct = false;
  for (const auto& t : ls.enabled) {
    if (t.label.kind == ActionLabel::Internal) {
      CHECK(independent(ls, t));
      CHECK(independent(ls, t, true));
      sawInternal = true;
    } else if (t.label.kind == ActionLabel::Act) {
      CHECK(!independent(ls, t));
      sawBroadcastAct = true;
    } else if (ls.sk().events[(size_t)t.label.event].env) {
      CHECK(independent(ls, t));
      CHECK(!independent(ls, t, true));  // strict mode: internal only
      sawEnvReact = true;
    }
  }
  CHECK(sawInternal);
  CHECK(sawEnvReact);
  CHECK(sawBroadcastAct);
}

TEST_CASE("gate with an open gate satisfies amenability via clause 1") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int B = sk.location_index("B");
  auto ls = build_local_semantics(complete(sk, mk({{1, {1, 1}}, {2, {B, B}}})));
  auto spec = test::must_parse_spec("safety S: never 1 at (loc = B)", sk);
  auto rep = check_amenability(ls, spec);
  CHECK(rep.ok);
}

TEST_CASE("escaping branch fails clause 2(b)") {
  auto sk = test::must_parse(kEscape);
  auto ls = build_local_semantics(complete(sk, {}));
  REQUIRE(check_phase_compatibility(ls, compute_phases(ls)).ok);
  auto spec = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk);
  auto rep = check_amenability(ls, spec);
  REQUIRE(!rep.ok);
  REQUIRE(rep.amenCube);
  CHECK(rep.amenCube->clause == 3);
  CHECK(!rep.amenCube->xPath.empty());
  CHECK(rep.amenCube->yTrans >= 0);
}

TEST_CASE("non-independent shortcut fails clause 2(a)") {
  auto sk = test::must_parse(kBack);
  auto ls = build_local_semantics(complete(sk, {}));
  REQUIRE(check_phase_compatibility(ls, compute_phases(ls)).ok);
  auto spec = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk);
  auto rep = check_amenability(ls, spec);
  REQUIRE(!rep.ok);
  REQUIRE(rep.amenCube);
  CHECK(rep.amenCube->clause == 2);
}

TEST_CASE("unsatisfiable atom predicate passes vacuously") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto spec = test::must_parse_spec("safety S: never 1 at (loc = W and loc = L)", sk);
  CHECK(check_amenability(ls, spec).ok);
}

TEST_CASE("amenability ignores disabled transitions") {
  // verdicts agree between a model and the same model with extra disabled
  // handlers
  auto sk1 = test::must_parse(kEscape);
  auto sk2 = test::must_parse(R"(process Esc
events
  env rz go
  br leak
initial location A
  on recv(go) do
    goto T
  on _ do
    goto D
  on recv(go) when false do
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
  auto spec1 = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk1);
  auto spec2 = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk2);
  auto ls1 = build_local_semantics(complete(sk1, {}));
  auto ls2 = build_local_semantics(complete(sk2, {}));
  auto r1 = check_amenability(ls1, spec1);
  auto r2 = check_amenability(ls2, spec2);
  CHECK(r1.ok == r2.ok);
  CHECK(r1.amenCube->clause == r2.amenCube->clause);
}

TEST_CASE("cutoff formula") {
  // thresholds ride on top of the largest agreement cardinality
  auto [dsSk, dsSpec] =
      test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  CHECK(compute_cutoff(complete(dsSk, {}), dsSpec) == 3);

  auto [duoSk, duoSpec] = test::load_corpus("duo.mcy", "duo.spec");
  CHECK(compute_cutoff(complete(duoSk, {}), duoSpec) == 3);

  // single atom with m=3, no agreement events, no rendezvous
  auto gate = test::must_parse(test::read_corpus_file("gate.mcy"));
  auto spec3 = test::must_parse_spec("safety S: never 3 at (loc = B)", gate);
  auto gateProc = complete(gate, mk({{1, {1, 1}}, {2, {1, 1}}}));
  CHECK(compute_cutoff(gateProc, spec3) == 3);

  // "at most four" style line: m=5
  auto spec5 = test::must_parse_spec("safety S: never 5 at (loc = B)", gate);
  CHECK(compute_cutoff(gateProc, spec5) == 5);

  // inter-process rendezvous forces at least 2
  auto rzSk = test::must_parse(R"(process Rz
events
  rz call
initial location A
  on rend(call) do
    goto B
  on recv(call) do
    goto B
location B
  on _ do
    goto B
)");
  SpecSuite empty;
  CHECK(compute_cutoff(complete(rzSk, {}), empty) == 2);

  // partition cardinality k = 4 gives k + 1
  auto satsish = test::must_parse(R"(process K4
initial location A
  on partition<p>(All, 4)
    win: goto B
    lose: goto A
location B
  on _ do
    goto B
)");
  CHECK(compute_cutoff(complete(satsish, {}), empty) == 5);
}

TEST_CASE("condition checks are pure: repeated calls agree") {
  auto sk = test::must_parse(kEscape);
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  auto spec = test::must_parse_spec("safety Tgt: never 1 at (loc = T)", sk);
  for (int i = 0; i < 3; ++i) {
    CHECK(check_phase_compatibility(ls, phases).ok);
    auto rep = check_amenability(ls, spec);
    REQUIRE(!rep.ok);
    CHECK(rep.amenCube->yTrans == check_amenability(ls, spec).amenCube->yTrans);
  }
}

TEST_CASE("phase soundness: membership iff an incident labeled transition") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store_complete.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  auto phases = compute_phases(ls);
  for (const auto& core : phases.cores) {
    for (size_t s = 0; s < ls.states.size(); ++s) {
      bool member = std::binary_search(core.states.begin(), core.states.end(), (int)s);
      bool incident = false;
      for (const auto& t : ls.enabled) {
        if (t.label.event != core.event) continue;
        if (core.sourceSide ? t.src == (int)s : t.dst == (int)s) incident = true;
      }
      CHECK(member == incident);
    }
  }
}
