#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "forge/global_semantics.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

Interpretation mk(const ProcessSketch& sk, std::map<int, std::vector<int>> cells) {
  Interpretation I;
  I.funcs = std::move(cells);
  (void)sk;
  return I;
}

// minimal gate without the corpus idle loop: exact transition-set shapes
const char* kBareGate = R"(process Gate
variables
  bool b
events
  env rz go
initial location A
  on recv(go) when ??1(b) do
    b := true
    goto ??2(b)
location B
)";

ProcessSketch gate() { return test::must_parse(kBareGate); }
ProcessSketch duo() { return test::must_parse(test::read_corpus_file("duo.mcy")); }
ProcessSketch vote() { return test::must_parse(test::read_corpus_file("vote.mcy")); }

// Gate: ??1 guard over b (grid {false,true}), ??2 goto over b.
Interpretation gate_open_to_B(const ProcessSketch& sk) {
  int B = sk.location_index("B");
  return mk(sk, {{1, {1, 1}}, {2, {B, B}}});
}

}  // namespace

TEST_CASE("complete pairs sketch and interpretation; missing holes error") {
  auto sk = gate();
  auto I = gate_open_to_B(sk);
  auto p = complete(sk, I);
  CHECK(p.sketch == &sk);
  Interpretation partial;
  partial.funcs[1] = {1, 1};
  CHECK_THROWS_WITH_AS(auto q = complete(sk, partial), doctest::Contains("??2"), SemanticsError);
  Interpretation bad = I;
  bad.funcs[2] = {7, 7};  // out of the location range
  CHECK_THROWS_AS(auto r = complete(sk, bad), SemanticsError);
}

TEST_CASE("gate local semantics under open gate to B") {
  auto sk = gate();
  auto ls = build_local_semantics(complete(sk, gate_open_to_B(sk)));
  CHECK(ls.states.size() == 4);  // 2 locations x bool
  int a0 = ls.state_index({sk.location_index("A"), {0}});
  int b1 = ls.state_index({sk.location_index("B"), {1}});
  CHECK(ls.s0 == a0);
  CHECK(ls.concrete[(size_t)a0]);
  int reachable = (int)std::count(ls.reachable.begin(), ls.reachable.end(), true);
  CHECK(reachable == 2);
  REQUIRE(ls.enabled.size() == 1);
  const auto& t = ls.enabled[0];
  CHECK(t.src == a0);
  CHECK(t.dst == b1);
  CHECK(t.label.kind == ActionLabel::React);
  CHECK(ls.sk().events[(size_t)t.label.event].name == "go");
  CHECK(ls.disabled.empty());
  CHECK(!t.sketch);  // the handler contains holes
}

TEST_CASE("gate under a closed gate: only a disabled transition") {
  auto sk = gate();
  int B = sk.location_index("B");
  auto ls = build_local_semantics(complete(sk, mk(sk, {{1, {0, 0}}, {2, {B, B}}})));
  CHECK(ls.enabled.empty());
  REQUIRE(ls.disabled.size() == 1);
  CHECK(ls.disabled[0].src == ls.s0);
  CHECK(ls.disabled[0].label.kind == ActionLabel::React);
}

TEST_CASE("duo global semantics at n=3: three winner choices") {
  auto sk = duo();
  auto gs = build_global_semantics(complete(sk, {}), 3);
  auto [enabled, disabled] = global_successors(gs, 0);
  REQUIRE(enabled.size() == 3);
  CHECK(disabled.empty());
  int W = sk.location_index("W");
  int L = sk.location_index("L");
  std::set<std::vector<int>> dsts;
  for (int id : enabled) {
    const auto& t = gs.transitions[(size_t)id];
    CHECK(t.winners.size() == 1);
    std::vector<int> locs;
    for (int lsId : gs.states[(size_t)t.dst].locals) locs.push_back(gs.ls->states[(size_t)lsId].loc);
    dsts.insert(locs);
  }
  CHECK(dsts == std::set<std::vector<int>>{{W, L, L}, {L, W, L}, {L, L, W}});
}

TEST_CASE("vote global semantics at n=2: decided sets from distinct proposals") {
  auto sk = vote();
  auto ls = build_local_semantics(complete(sk, {}));
  auto gs = build_global_semantics(complete(sk, {}), 2, {}, &ls);
  // find the state ((C,1),(C,2))
  int c1 = ls.state_index({sk.location_index("C"), {1}});
  int c2 = ls.state_index({sk.location_index("C"), {2}});
  GlobalState want;
  want.locals = {c1, c2};
  int qi = gs.find_state(want);
  REQUIRE(qi >= 0);
  int kEvent = -1;
  for (size_t i = 0; i < sk.events.size(); ++i)
    if (sk.events[i].name == "k") kEvent = (int)i;
  std::vector<int> consensusSuccs;
  for (int id : gs.outgoing[(size_t)qi])
    if (gs.transitions[(size_t)id].event == kEvent) consensusSuccs.push_back(id);
  REQUIRE(consensusSuccs.size() == 2);
  int D = sk.location_index("D");
  for (int id : consensusSuccs) {
    const auto& t = gs.transitions[(size_t)id];
    REQUIRE(t.decided.size() == 1);
    const auto& dst = gs.states[(size_t)t.dst];
    const auto& p0 = gs.ls->states[(size_t)dst.locals[0]];
    const auto& p1 = gs.ls->states[(size_t)dst.locals[1]];
    CHECK(p0.loc == D);
    CHECK(p1.loc == D);
    CHECK(p0.vals[0] == t.decided[0]);
    CHECK(p1.vals[0] == t.decided[0]);
  }
}

TEST_CASE("broadcast with a single process: zero receivers") {
  auto sk = test::must_parse(R"(process Solo
events
  br ping
initial location A
  on bcast(ping) do
    goto B
  on recv(ping) do
    goto B
location B
  on _ do
    goto B
)");
  auto gs = build_global_semantics(complete(sk, {}), 1);
  auto [enabled, disabled] = global_successors(gs, 0);
  REQUIRE(enabled.size() == 1);
  CHECK(disabled.empty());
  CHECK(gs.transitions[0].steps.size() == 1);
}

TEST_CASE("closed gate at n=2: deadlock with one disabled entry per process") {
  auto sk = gate();
  int B = sk.location_index("B");
  auto gs = build_global_semantics(complete(sk, mk(sk, {{1, {0, 0}}, {2, {B, B}}})), 2);
  auto [enabled, disabled] = global_successors(gs, 0);
  CHECK(enabled.empty());
  REQUIRE(disabled.size() == 2);
  CHECK(disabled[0].proc == 0);
  CHECK(disabled[1].proc == 1);
  REQUIRE(disabled[0].facts.size() == 1);
  CHECK(gs.ls->disabled[(size_t)disabled[0].facts[0]].src == gs.ls->s0);
}

TEST_CASE("every reachable (state, handler) pair is classified exactly once") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store_complete.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  for (size_t s = 0; s < ls.states.size(); ++s) {
    if (!ls.reachable[s]) continue;
    const auto& loc = sk.locations[(size_t)ls.states[s].loc];
    for (size_t h = 0; h < loc.handlers.size(); ++h) {
      bool hasEnabled = false, hasDisabled = false;
      for (int id : ls.enabledBySrc[s])
        if (ls.enabled[(size_t)id].handler == (int)h) hasEnabled = true;
      for (int id : ls.disabledBySrc[s])
        if (ls.disabled[(size_t)id].handler == (int)h) hasDisabled = true;
      // consensus handlers may be vacuously absent when the round domain is
      // empty; otherwise exactly one classification
      CHECK_MESSAGE(hasEnabled != hasDisabled,
                    "state " << ls.state_name((int)s) << " handler " << h);
    }
  }
}

TEST_CASE("construction is deterministic") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store_complete.mcy"));
  auto ls1 = build_local_semantics(complete(sk, {}));
  auto ls2 = build_local_semantics(complete(sk, {}));
  REQUIRE(ls1.enabled.size() == ls2.enabled.size());
  for (size_t i = 0; i < ls1.enabled.size(); ++i) {
    CHECK(ls1.enabled[i].src == ls2.enabled[i].src);
    CHECK(ls1.enabled[i].dst == ls2.enabled[i].dst);
  }
  auto gs1 = build_global_semantics(complete(sk, {}), 2);
  auto gs2 = build_global_semantics(complete(sk, {}), 2);
  REQUIRE(gs1.states.size() == gs2.states.size());
  REQUIRE(gs1.transitions.size() == gs2.transitions.size());
  for (size_t i = 0; i < gs1.transitions.size(); ++i) {
    CHECK(gs1.transitions[i].src == gs2.transitions[i].src);
    CHECK(gs1.transitions[i].dst == gs2.transitions[i].dst);
    CHECK(gs1.transitions[i].event == gs2.transitions[i].event);
  }
}

TEST_CASE("symmetry: permuting process indices preserves reachability") {
  for (const char* name : {"duo.mcy", "vote.mcy"}) {
    auto sk = test::must_parse(test::read_corpus_file(name));
    auto gs = build_global_semantics(complete(sk, {}), 3);
    for (const auto& q : gs.states) {
      GlobalState swapped;
      swapped.locals = q.locals;
      std::swap(swapped.locals[0], swapped.locals[2]);
      CHECK(gs.find_state(swapped) >= 0);
    }
  }
}

TEST_CASE("reference store semantics: consensus keeps stored in agreement") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store_complete.mcy"));
  auto gs = build_global_semantics(complete(sk, {}), 2);
  int leader = sk.location_index("Leader");
  int replica = sk.location_index("Replica");
  int storedVar = sk.var_index("stored");
  for (const auto& q : gs.states) {
    // whenever one process leads and the other replicates, stored agrees
    const auto& a = gs.ls->states[(size_t)q.locals[0]];
    const auto& b = gs.ls->states[(size_t)q.locals[1]];
    bool steady = (a.loc == leader && b.loc == replica) || (a.loc == replica && b.loc == leader);
    if (steady) CHECK(a.vals[(size_t)storedVar] == b.vals[(size_t)storedVar]);
  }
}

TEST_CASE("saturating arithmetic keeps the store with domain bounds") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store_complete.mcy"));
  auto ls = build_local_semantics(complete(sk, {}));
  int storedVar = sk.var_index("stored");
  for (const auto& s : ls.states)
    CHECK((s.vals[(size_t)storedVar] >= 1 && s.vals[(size_t)storedVar] <= 2));
  // increments from stored=2 stay at 2; decrements from 1 stay at 1
  int repCmd = sk.location_index("RepCmd");
  bool sawIncrementClamp = false;
  for (const auto& t : ls.enabled) {
    if (ls.states[(size_t)t.src].loc != repCmd || t.inst.decided != std::vector<int>{4}) continue;
    if (ls.states[(size_t)t.src].vals[(size_t)storedVar] == 2) {
      CHECK(ls.states[(size_t)t.dst].vals[(size_t)storedVar] == 2);
      sawIncrementClamp = true;
    }
  }
  CHECK(sawIncrementClamp);
}

TEST_CASE("dropping one process of an env-only model preserves reachability") {
  auto sk = gate();
  auto proc = complete(sk, gate_open_to_B(sk));
  auto ls = build_local_semantics(proc);
  auto gs3 = build_global_semantics(proc, 3, {}, &ls);
  auto gs2 = build_global_semantics(proc, 2, {}, &ls);
  for (const auto& q : gs3.states) {
    for (size_t drop = 0; drop < 3; ++drop) {
      GlobalState smaller;
      for (size_t i = 0; i < 3; ++i)
        if (i != drop) smaller.locals.push_back(q.locals[i]);
      CHECK(gs2.find_state(smaller) >= 0);
    }
  }
}
