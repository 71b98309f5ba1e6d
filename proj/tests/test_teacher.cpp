#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "forge/teacher.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

Interpretation mk(std::map<int, std::vector<int>> cells) {
  Interpretation I;
  I.funcs = std::move(cells);
  return I;
}

}  // namespace

TEST_CASE("duo safety: one winner under k=1, trace when the bar is lower") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto gs = build_global_semantics(complete(sk, {}), 3);
  auto ok = check_safety(gs, test::must_parse_spec("safety S: never 2 at (loc = W)", sk));
  CHECK(!ok);
  auto bad = check_safety(gs, test::must_parse_spec("safety S: never 1 at (loc = W)", sk));
  REQUIRE(bad);
  CHECK(bad->lineName == "S");
  CHECK(bad->transitions.size() == 1);  // the partition step itself
}

TEST_CASE("reference store is safe at the cutoff") {
  auto [sk, spec] =
      test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  auto gs = build_global_semantics(complete(sk, {}), 2);
  CHECK(!check_safety(gs, spec));
}

TEST_CASE("closed gate deadlocks at the initial state") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int B = sk.location_index("B");
  auto gs = build_global_semantics(complete(sk, mk({{1, {0, 0}}, {2, {B, B}}})), 2);
  auto dead = check_deadlock(gs);
  REQUIRE(dead);
  CHECK(dead->deadState == 0);
  CHECK(dead->transitions.empty());
  CHECK(dead->disabled.size() == 2);
}

TEST_CASE("open gate looping to A never deadlocks") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int A = sk.location_index("A");
  auto gs = build_global_semantics(complete(sk, mk({{1, {1, 1}}, {2, {A, A}}})), 2);
  CHECK(!check_deadlock(gs));
  CHECK(gs.states.size() <= 4);
}

TEST_CASE("winners without idle loops deadlock after the round") {
  auto sk = test::must_parse(R"(process BareDuo
initial location C
  on partition<p>(All, 1)
    win: goto W
    lose: goto L
location W
location L
)");
  auto gs = build_global_semantics(complete(sk, {}), 3);
  auto dead = check_deadlock(gs);
  REQUIRE(dead);
  CHECK(dead->transitions.size() == 1);
}

TEST_CASE("buchi templates have the fixed two-state shape") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  auto spec = test::must_parse_spec(
      "liveness L1: eventually 1 at (loc = B)\n"
      "liveness L2: always fired(go) implies eventually 1 at (loc = B)\n",
      sk);
  auto b1 = ltl_to_buchi(spec.liveness[0]);
  CHECK(b1.states == 2);
  CHECK(b1.accepting == std::vector<bool>{false, true});
  CHECK(b1.transitions.size() == 2);
  CHECK((bool)b1.satisfiedAtInit);
  auto b2 = ltl_to_buchi(spec.liveness[1]);
  CHECK(b2.states == 2);
  CHECK(b2.transitions.size() == 3);
  CHECK(!b2.satisfiedAtInit);
}

TEST_CASE("eventually true holds trivially") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int A = sk.location_index("A");
  auto gs = build_global_semantics(complete(sk, mk({{1, {1, 1}}, {2, {A, A}}})), 2);
  auto spec = test::must_parse_spec("liveness L: eventually true", sk);
  CHECK(!check_liveness(gs, spec.liveness[0]));
}

TEST_CASE("gate livelock: goto A yields a fair accepting lasso") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int A = sk.location_index("A");
  auto gs = build_global_semantics(complete(sk, mk({{1, {1, 1}}, {2, {A, A}}})), 2);
  auto spec = test::must_parse_spec("liveness L: eventually 1 at (loc = B)", sk);
  auto lasso = check_liveness(gs, spec.liveness[0]);
  REQUIRE(lasso);
  CHECK(!lasso->cycle.empty());
  for (int id : lasso->cycle) {
    const auto& t = gs.transitions[(size_t)id];
    CHECK(gs.ls->sk().events[(size_t)t.event].name == "go");
  }
  CHECK(lasso->cycleDisabled.empty());
  // the cycle closes on the stem's endpoint
  int head = lasso->stem.empty() ? 0 : gs.transitions[(size_t)lasso->stem.back()].dst;
  CHECK(gs.transitions[(size_t)lasso->cycle.front()].src == head);
  CHECK(gs.transitions[(size_t)lasso->cycle.back()].dst == head);
}

TEST_CASE("property already true at the initial state: no lasso") {
  auto sk = test::must_parse(test::read_corpus_file("gate.mcy"));
  int A = sk.location_index("A");
  auto gs = build_global_semantics(complete(sk, mk({{1, {1, 1}}, {2, {A, A}}})), 2);
  auto spec = test::must_parse_spec("liveness L: eventually 2 at (loc = A)", sk);
  CHECK(!check_liveness(gs, spec.liveness[0]));
}

TEST_CASE("fairness rejects cycles that starve a ready event") {
  // `a` keeps the process in S, `b` moves it to G; a cycle of only `a`
  // steps is unfair because `b` stays ready.
  auto stay = test::must_parse(R"(process Fair
events
  env rz a
  env rz b
initial location S
  on recv(a) do
    goto S
  on recv(b) do
    goto G
location G
  on recv(a) do
    goto G
  on recv(b) do
    goto G
)");
  auto gs = build_global_semantics(complete(stay, {}), 2);
  auto spec = test::must_parse_spec("liveness L: eventually 1 at (loc = G)", stay);
  CHECK(!check_liveness(gs, spec.liveness[0]));

  // the same shape where `b` also stays: a fair violating cycle exists
  auto loop = test::must_parse(R"(process Unfair
events
  env rz a
  env rz b
initial location S
  on recv(a) do
    goto S
  on recv(b) do
    goto S
location G
)");
  auto gs2 = build_global_semantics(complete(loop, {}), 2);
  auto spec2 = test::must_parse_spec("liveness L: eventually 1 at (loc = G)", loop);
  auto lasso = check_liveness(gs2, spec2.liveness[0]);
  REQUIRE(lasso);
  // both a and b are taken on the fair cycle
  bool tookA = false, tookB = false;
  for (int id : lasso->cycle) {
    const auto& name = gs2.ls->sk().events[(size_t)gs2.transitions[(size_t)id].event].name;
    tookA = tookA || name == "a";
    tookB = tookB || name == "b";
  }
  CHECK(tookA);
  CHECK(tookB);
}

TEST_CASE("reference store passes deadlock and both liveness lines at the cutoff") {
  auto [sk, spec] =
      test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  auto gs = build_global_semantics(complete(sk, {}), 2);
  CHECK(!check_deadlock(gs));
  REQUIRE(spec.liveness.size() == 2);
  CHECK(!check_liveness(gs, spec.liveness[0]));
  CHECK(!check_liveness(gs, spec.liveness[1]));
}

TEST_CASE("fired atoms discharge the acknowledgement obligation") {
  // drop the `ret` disjunct: read-only commands then violate the line
  auto [sk, spec] =
      test::load_corpus("distributed_store_complete.mcy", "distributed_store.spec");
  auto narrow = test::must_parse_spec(
      "liveness Ack: always fired(doCmd) implies eventually fired(ackCmd)", sk);
  auto gs = build_global_semantics(complete(sk, {}), 2);
  auto lasso = check_liveness(gs, narrow.liveness[0]);
  REQUIRE(lasso);  // serving reads forever never fires ackCmd
  for (int id : lasso->cycle) {
    const auto& t = gs.transitions[(size_t)id];
    for (const auto& f : t.fired)
      CHECK(gs.ls->sk().events[(size_t)f.event].name != "ackCmd");
  }
}

TEST_CASE("error traces replay to a state violating their line") {
  auto sk = test::must_parse(test::read_corpus_file("duo.mcy"));
  auto gs = build_global_semantics(complete(sk, {}), 3);
  auto spec = test::must_parse_spec("safety S: never 2 at (loc = L)", sk);
  auto trace = check_safety(gs, spec);
  REQUIRE(trace);
  int cur = 0;
  for (int id : trace->transitions) {
    auto [enabled, disabled] = global_successors(gs, cur);
    CHECK(std::find(enabled.begin(), enabled.end(), id) != enabled.end());
    cur = gs.transitions[(size_t)id].dst;
  }
  CHECK(cur == trace->errorState);
  CHECK(violates_line(gs, spec.safety[0], cur));
}
