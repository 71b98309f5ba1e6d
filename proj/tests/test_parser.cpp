#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "forge/parser.hpp"
#include "forge/printer.hpp"
#include "oracle.hpp"

using namespace forge;

namespace {

const char* kGate = R"(
// toy gate
process Gate
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

}  // namespace

TEST_CASE("minimal process parses") {
  auto r = parse_sketch("process P initial location A");
  REQUIRE(r.ok());
  CHECK(r.sketch.name == "P");
  CHECK(r.sketch.holes.empty());
  CHECK(r.sketch.locations.size() == 1);
  CHECK(r.sketch.initialLocation == 0);
}

TEST_CASE("gate sketch: holes and signatures") {
  auto sk = test::must_parse(kGate);
  REQUIRE(sk.holes.size() == 2);
  const auto& h1 = sk.holes[0];
  CHECK(h1.id == 1);
  CHECK(h1.pos == HolePos::GuardCondition);
  CHECK(h1.retKind == HoleRet::Bool);
  REQUIRE(h1.params == std::vector<std::string>{"b"});
  CHECK(h1.grid_size() == 2);
  const auto& h2 = sk.holes[1];
  CHECK(h2.pos == HolePos::GotoTarget);
  CHECK(h2.returnDomain == std::vector<int>{0, 1});
  CHECK(sk.events.size() == 1);
  CHECK(sk.events[0].env);
  CHECK(sk.events[0].kind == EventKind::Rendezvous);
}

TEST_CASE("goto to undeclared location is diagnosed with its line") {
  auto r = parse_sketch(R"(process P
initial location A
  on _ do
    goto Undeclared
)");
  REQUIRE(r.ok());
  auto diags = validate_sketch(r.sketch);
  REQUIRE(has_errors(diags));
  bool found = false;
  for (const auto& d : diags) {
    if (d.message.find("Undeclared") != std::string::npos) {
      found = true;
      CHECK(d.span.begin.line == 4);
    }
  }
  CHECK(found);
}

TEST_CASE("duplicate hole id is rejected") {
  auto r = parse_sketch(R"(process P
variables
  bool x
initial location A
  on _ when ??1(x) do
    goto ??1(x)
)");
  CHECK(!r.ok());
}

TEST_CASE("hole nested in an expression is rejected") {
  auto r = parse_sketch(R"(process P
variables
  int[1,3] x
initial location A
  on _ when ??1(x) = 2 do
    goto A
)");
  CHECK(!r.ok());
}

TEST_CASE("distributed store corpus: shape from the reference description") {
  auto sk = test::must_parse(test::read_corpus_file("distributed_store.mcy"));
  CHECK(sk.holes.size() == 10);
  CHECK(sk.locations.size() == 5);
  REQUIRE(sk.variables.size() == 2);
  CHECK(sk.variables[0].name == "cmd");
  CHECK(sk.variables[0].lo == 1);
  CHECK(sk.variables[0].hi == 5);
  CHECK(sk.variables[1].name == "stored");
  CHECK(sk.variables[1].lo == 1);
  CHECK(sk.variables[1].hi == 2);
}

TEST_CASE("spec lines parse") {
  auto sk = test::must_parse(kGate);
  auto r = parse_spec("safety OneLeader: never 2 at (loc = B)\n"
                      "liveness Elect: eventually 1 at (loc = B)\n");
  REQUIRE(r.ok());
  REQUIRE(r.suite.safety.size() == 1);
  CHECK(r.suite.safety[0].name == "OneLeader");
  REQUIRE(r.suite.safety[0].atoms.size() == 1);
  CHECK(r.suite.safety[0].atoms[0].threshold == 2);
  REQUIRE(r.suite.liveness.size() == 1);
  CHECK(r.suite.liveness[0].tmpl == LivenessTemplate::Eventually);
  SpecSuite suite = r.suite;
  CHECK(!has_errors(validate(sk, suite)));
}

TEST_CASE("empty spec is a vacuous suite") {
  auto r = parse_spec("");
  REQUIRE(r.ok());
  CHECK(r.suite.safety.empty());
  CHECK(r.suite.liveness.empty());
}

TEST_CASE("threshold zero is rejected") {
  auto r = parse_spec("safety S: never 0 at (loc = A)");
  CHECK(!r.ok());
}

TEST_CASE("spec naming an unknown location fails validation") {
  auto sk = test::must_parse(kGate);
  auto r = parse_spec("safety S: never 1 at (loc = Ghost)");
  REQUIRE(r.ok());
  SpecSuite suite = r.suite;
  CHECK(has_errors(validate(sk, suite)));
}

TEST_CASE("pretty-print round trip is structurally equal") {
  for (const char* name : {"gate.mcy", "duo.mcy", "vote.mcy", "distributed_store.mcy",
                           "distributed_store_complete.mcy"}) {
    auto sk = test::must_parse(test::read_corpus_file(name));
    std::string printed = pretty_print(sk);
    auto again = parse_sketch(printed, 8);
    REQUIRE_MESSAGE(again.ok(), "reparse of " << name << " failed:\n" << printed);
    CHECK_MESSAGE(ast_to_json(sk) == ast_to_json(again.sketch), "round trip diverged for " << name);
  }
}

TEST_CASE("parse is total on mangled inputs") {
  std::mt19937 rng(7);
  auto sk = test::read_corpus_file("distributed_store.mcy");
  for (int round = 0; round < 200; ++round) {
    std::string text = sk;
    int edits = 1 + (int)(rng() % 8);
    for (int e = 0; e < edits; ++e) {
      size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = (char)(32 + rng() % 95); break;
        case 1: text.erase(pos, rng() % 10); break;
        default: text.insert(pos, std::string(1 + rng() % 3, (char)(32 + rng() % 95))); break;
      }
      if (text.empty()) text = "x";
    }
    auto r = parse_sketch(text);  // must not crash; diagnostics or AST
    if (!r.ok()) CHECK(!r.diagnostics.empty());
  }
}

TEST_CASE("ast json is stable across reparses") {
  auto sk = test::must_parse(kGate);
  auto again = test::must_parse(kGate);
  CHECK(ast_to_json(sk) == ast_to_json(again));
}
