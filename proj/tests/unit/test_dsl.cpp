#include <random>
#include <string>

#include "doctest.h"
#include "support/support.hpp"
#include "t2m/dsl.hpp"

using namespace t2m;
using namespace t2m::testing;

namespace {

const char* kCopy =
    "machine id { start s0; s0: s -> c; c: t0 -> z, o; z: w3=0 -> h; o: w3=1 -> h2; h: r0 -> c; h2: r0 -> c; }";

SourceSpan span_of(const std::string& text) {
  try {
    parse_machine(text);
  } catch (const SyntaxError& e) {
    return e.span();
  }
  FAIL("no SyntaxError for: " << text);
  return {};
}

}  // namespace

TEST_SUITE("dsl") {
  TEST_CASE("copy machine parses and copies") {
    const auto m = parse_machine(kCopy);
    CHECK(m.size() == 6);
    CHECK(m.name() == "id");
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
      const auto x = random_binary(rng, 10);
      const auto r = run(m, x, 2000);
      REQUIRE(r.written >= 16);
      CHECK(ref::same_prefix(r.output, x, 16));
    }
  }

  TEST_CASE("duplicate vertex is a syntax error at the second definition") {
    const std::string text = "machine bad { start s0; s0: s -> s0; s0: accept; }";
    const auto span = span_of(text);
    CHECK(span.line == 1);
    CHECK(text.substr(span.column - 1, 2) == "s0");
    CHECK(span.column == 38);
  }

  TEST_CASE("two starts is a validation error") {
    try {
      parse_machine("machine two_starts { start a; a: s -> b; b: s -> c; c: accept; }");
      FAIL("parsed");
    } catch (const ValidationError& e) {
      CHECK(e.validation_kind() == ValidationKind::MultipleStart);
    }
  }

  TEST_CASE("syntax error spans point inside the offending token") {
    struct Case {
      std::string text;
      std::string token;
    };
    const std::vector<Case> cases = {
        {"machine m {\n  start s0;\n  s0: s -> h;\n  h: w0=1 -> h2;\n  h2: accept;\n}", "w0"},
        {"machine m { start s0; s0: t3 -> a, b; a: accept; b: accept; }", "t3"},
        {"machine m { start s0; s0: s -> h h: accept; }", "h"},
        {"machine m { start s0; s0: frob; }", "frob"},
        {"machine m { start s0; s0: w1=2 -> h; h: accept; }", "2"},
        {"machine m { start s0; s0: ? cont=a qry=b; a: accept; b: accept; }", "qry"},
        {"mchine m { start s0; }", "mchine"},
    };
    for (const auto& c : cases) {
      const auto span = span_of(c.text);
      // Locate the line, then the column.
      std::size_t pos = 0;
      for (std::size_t l = 1; l < span.line; ++l) pos = c.text.find('\n', pos) + 1;
      pos += span.column - 1;
      REQUIRE(pos < c.text.size());
      const auto start = c.text.rfind(c.token, pos);
      INFO(c.text);
      CHECK(start != std::string::npos);
      CHECK(pos < start + c.token.size());
    }
  }

  TEST_CASE("unterminated input") {
    CHECK_THROWS_AS(parse_machine("machine m { start s0; s0: s -> h; h: accept;"), SyntaxError);
    CHECK_THROWS_AS(parse_machine(""), SyntaxError);
  }

  TEST_CASE("comments and multiple machines") {
    const auto ms = parse_machines(
        "# two machines\nmachine a { start s; s: s -> h; # inline\n h: accept; }\n"
        "machine b { start s; s: s -> h; h: reject; }\n");
    REQUIRE(ms.size() == 2);
    CHECK(ms[1].name() == "b");
    CHECK_THROWS(parse_machine("machine a { start s; s: s -> h; h: accept; } machine b { start s; s: s -> h; h: accept; }"));
  }

  TEST_CASE("query vertices print with cont and query") {
    const auto m = MachineBuilder("q").start("s").begin("s", "q").query("q", "c", "x").accept("c").accept("x").build();
    const auto text = print_machine(m);
    CHECK(text.find("q: ? cont=c query=x;") != std::string::npos);
    CHECK(parse_machine(text) == m);
  }

  TEST_CASE("printing an empty machine fails validation") {
    CHECK_THROWS_AS(print_machine(MachineGraph("empty")), ValidationError);
  }

  TEST_CASE("round trip on corpus and generated machines") {
    std::vector<MachineGraph> machines;
    for (const auto& [name, m] : load_corpus()) machines.push_back(m);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 12; ++i) machines.push_back(random_machine(rng, 3 + rng() % 10, true, i % 3 == 0));
    CHECK(machines.size() >= 25);
    std::set<LabelKind> kinds;
    for (const auto& m : machines) {
      for (const auto& v : m.vertices()) kinds.insert(v.label.kind());
      const auto text = print_machine(m);
      const auto again = parse_machine(text);
      REQUIRE(again == m);
      CHECK(print_machine(again) == text);
    }
    CHECK(kinds.size() == 8);
  }

  TEST_CASE("layer tags survive printing") {
    const auto m = MachineBuilder("l").start("s").begin("s", "h").accept("h").layer("h", 2).build();
    const auto text = print_machine(m);
    CHECK(text.find("# layer: 2") != std::string::npos);
    CHECK(parse_machine(text).layer_tag(*m.find("h")) == 2u);
  }

  TEST_CASE("invalid corpus files") {
    const auto dir = corpus_dir() / "invalid";
    CHECK_THROWS_AS(load_machine_file((dir / "two_starts.t2m").string()), ValidationError);
    CHECK_THROWS_AS(load_machine_file((dir / "dangling.t2m").string()), ValidationError);
    CHECK_THROWS_AS(load_machine_file((dir / "duplicate_vertex.t2m").string()), SyntaxError);
    CHECK_THROWS_AS(load_machine_file((dir / "bad_label.t2m").string()), SyntaxError);
  }
}
