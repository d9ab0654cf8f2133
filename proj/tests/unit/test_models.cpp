#include <random>

#include "doctest.h"
#include "support/support.hpp"
#include "t2m/models.hpp"

using namespace t2m;
using namespace t2m::testing;

TEST_SUITE("models") {
  TEST_CASE("revising_decode") {
    auto dec = [](std::vector<Symbol> p) { return revising_decode(RevisingStream::from_symbols(EvSeq(p, 0))); };
    CHECK(dec({1, 0, MARK, 1, 1}) == parse_seq("11:0"));
    CHECK(dec({1, 0, 1}) == parse_seq("101:0"));
    CHECK(dec({MARK, MARK, 0, 1}) == parse_seq("01:0"));
    CHECK(RevisingStream::from_symbols(EvSeq({MARK, 1, MARK}, 0)).mark_count == 2);
    CHECK_THROWS_AS(RevisingStream::from_symbols(EvSeq({3}, 0)), DecodeError);
    CHECK_THROWS_AS(RevisingStream::from_symbols(EvSeq::constant(MARK)), DecodeError);
  }

  TEST_CASE("binary encoding of revising streams") {
    const auto s = RevisingStream::from_symbols(EvSeq({1, 0, MARK, 1}, 0));
    const auto bits = encode_revising(s);
    CHECK(bits == parse_seq("01001001:0"));
    CHECK(decode_revising_bits(bits).symbols == s.symbols);
    CHECK_THROWS_AS(decode_revising_bits(parse_seq("11:0")), DecodeError);
    CHECK_THROWS_AS(encode_revising(RevisingStream::from_symbols(EvSeq::constant(1))), TailNotZero);
  }

  TEST_CASE("max_by_lpo_loop") {
    auto r = max_by_lpo_loop(parse_seq("2,0,1:0"), 10);
    CHECK(r.value == 2);
    CHECK(r.calls_used == 3);
    REQUIRE(r.trace.size() == 3);
    CHECK(r.trace[0].query == parse_seq("101:0"));
    CHECK(r.trace[1].query == parse_seq("1:0"));
    CHECK(r.trace[2].answer == EvSeq::zeros());
    r = max_by_lpo_loop(parse_seq(":0"), 10);
    CHECK(r.value == 0);
    CHECK(r.calls_used == 1);
    r = max_by_lpo_loop(parse_seq(":4"), 10);
    CHECK(r.value == 4);
    CHECK(r.calls_used == 5);
    CHECK_THROWS_AS(max_by_lpo_loop(parse_seq(":4"), 4), BudgetExceeded);
    CHECK(threshold_stream(parse_seq("3,1:2"), 1) == parse_seq("10:1"));
  }

  TEST_CASE("loop law on random inputs") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      const auto w = random_naturals(rng, 16, 12);
      const auto r = max_by_lpo_loop(w, 13);
      REQUIRE(r.value == ref::max(w));
      REQUIRE(r.calls_used == ref::max(w) + 1);
    }
  }

  TEST_CASE("revising simulation") {
    const auto zero = simulate_lpo_by_revising(corpus("zero_query"), parse_seq("1:0"));
    CHECK(zero.stream.mark_count == 0);
    CHECK(zero.main_status == Status::Accepted);

    const auto hit = simulate_lpo_by_revising(corpus("late_hit"), parse_seq("1101:0"));
    const auto direct = run_with_oracle(Program(corpus("late_hit")), lpo(), parse_seq("1101:0"), 1, 100000);
    CHECK(hit.stream.mark_count == 1);
    CHECK(hit.revised_queries == 1);
    CHECK(revising_decode(hit.stream).take(64) == observe(direct, 64).prefix);

    const auto plain = simulate_lpo_by_revising(corpus("copy16"), parse_seq("1011:0"));
    CHECK(plain.stream.mark_count == 0);
    CHECK(plain.calls == 0);
    CHECK(revising_decode(plain.stream) == run(corpus("copy16"), parse_seq("1011:0"), 1000).output);
  }

  TEST_CASE("revising simulation surfaces undecided queries") {
    CHECK_THROWS_AS(simulate_lpo_by_revising(corpus("diverging_query"), EvSeq::zeros(), {10000, 64, 64}),
                    QueryUndecidedWithinFuel);
    CHECK_THROWS_AS(simulate_lpo_by_revising(corpus("three_flat"), parse_seq("1:0"), {100000, 2, 64}),
                    CallBudgetExceeded);
  }

  TEST_CASE("revising_to_max") {
    const auto s = RevisingStream::from_symbols(EvSeq({1, 0, MARK, 1, 1}, 0));
    const auto t = revising_to_max(s);
    CHECK(t.query == EvSeq({0, 0, 3, 3, 3}, 3));
    CHECK(ref::max(t.query) == 3);
    CHECK(t.answer_to_output(3) == parse_seq("11:0"));

    const auto none = revising_to_max(RevisingStream::from_symbols(parse_seq("101:0")));
    CHECK(none.query == EvSeq::zeros());
    CHECK(none.answer_to_output(0) == parse_seq("101:0"));

    const auto two = RevisingStream::from_symbols(EvSeq({MARK, 1, MARK, 0, 1}, 0));
    const auto tt = revising_to_max(two);
    CHECK(ref::max(tt.query) == 3);
    CHECK(tt.answer_to_output(ref::max(tt.query)) == revising_decode(two));
  }

  TEST_CASE("halting demo") {
    const auto h = halting_demo(corpus("accept_now"), HaltingCertificate::halts(1), 1000);
    CHECK(h.halts);
    CHECK(h.query == parse_seq("1:0"));
    const auto l = halting_demo(corpus("loop"), HaltingCertificate::loops(), 1000);
    CHECK_FALSE(l.halts);
    CHECK(l.answer == EvSeq::zeros());
    CHECK_THROWS_AS(halting_demo(corpus("accept_now"), HaltingCertificate::halts(1000000000), 1000000),
                    CertificateUnverifiable);
    CHECK_THROWS_AS(halting_demo(corpus("loop"), HaltingCertificate::halts(50), 1000), CertificateRefuted);
    CHECK_THROWS_AS(halting_demo(corpus("accept_now"), HaltingCertificate::loops(), 1000), CertificateRefuted);
  }

  TEST_CASE("certificates") {
    CHECK(parse_certificate("loops").kind == HaltingCertificate::Kind::Loops);
    CHECK(parse_certificate("halts:12").step == 12);
    CHECK_THROWS_AS(parse_certificate("halts:"), ParseError);
    CHECK_THROWS_AS(parse_certificate("maybe"), ParseError);
  }
}
