#include <random>

#include "doctest.h"
#include "support/support.hpp"
#include "t2m/oracle.hpp"

using namespace t2m;
using namespace t2m::testing;

namespace {

/// The query computation writes 1 and accepts; the caller copies tape 2.
MachineGraph writes_one() {
  return MachineBuilder("writes_one")
      .start("s")
      .begin("s", "q")
      .query("q", "c", "w")
      .write("w", 3, 1, "wa")
      .accept("wa")
      .branch("c", 2, "c0", "c1")
      .write("c0", 3, 0, "h")
      .write("c1", 3, 1, "h")
      .accept("h")
      .build();
}

std::vector<EvSeq> sample_inputs(std::uint64_t seed, std::size_t n = 20) {
  std::mt19937_64 rng(seed);
  std::vector<EvSeq> out = {EvSeq::zeros(), EvSeq::constant(1)};
  while (out.size() < n) out.push_back(random_binary(rng, 10));
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("lpo") {
    const auto o = lpo();
    CHECK(o.select(EvSeq::zeros()) == EvSeq::zeros());
    CHECK(o.select(parse_seq("010:0")) == EvSeq::one_then_zeros());
    CHECK(o.select(EvSeq::constant(1)) == EvSeq::one_then_zeros());
    CHECK(o.single_valued);
    CHECK(o.range_finite);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      const auto x = random_binary(rng, 12);
      REQUIRE(o.select(x) == ref::lpo(x));
      const auto y = o.select(o.select(x));
      CHECK((y == EvSeq::zeros() || y == EvSeq::one_then_zeros()));
    }
    CHECK(o.select(EvSeq::one_then_zeros()) == EvSeq::one_then_zeros());
  }

  TEST_CASE("llpo is multi-valued on zero") {
    const auto o = llpo();
    CHECK_FALSE(o.single_valued);
    CHECK(o.answer(EvSeq::zeros()).size() == 2);
    CHECK(o.answer(parse_seq("1:0")) == std::vector<EvSeq>{EvSeq::zeros()});
    CHECK(o.answer(parse_seq("01:0")) == std::vector<EvSeq>{EvSeq::one_then_zeros()});
  }

  TEST_CASE("max") {
    const auto sym = max_oracle(NatEncoding::Symbols);
    CHECK(sym.select(parse_seq("3,1,2:0")).at(0) == 3);
    CHECK(sym.select(parse_seq(":5")).at(0) == 5);
    CHECK(sym.select(parse_seq(":0")).at(0) == 0);
    const auto un = max_oracle(NatEncoding::Unary);
    CHECK(un.select(encode_naturals(parse_seq("3,1,2:0"))) == EvSeq({1, 1, 1}, 0));
    CHECK_THROWS_AS(un.answer(EvSeq::constant(1)), OracleDomainError);
  }

  TEST_CASE("computable oracles") {
    const auto constant = computable_oracle(corpus("accept_now"), 1000);
    CHECK(constant.select(parse_seq("1101:0")) == EvSeq::zeros());
    const auto copy = computable_oracle(corpus("copy16"), 10000);
    CHECK(copy.select(parse_seq("1101:0")) == parse_seq("1101:0"));
    CHECK(copy.select(EvSeq::constant(1)) == EvSeq(std::vector<Symbol>(16, 1), 0));
    const auto diverge = computable_oracle(corpus("loop"), 1000);
    CHECK_THROWS_AS(diverge.answer(EvSeq::zeros()), OracleDivergence);
  }

  TEST_CASE("combinators") {
    const auto l = lpo();
    const auto p = product_oracle(l, l);
    CHECK(p.select(interleave_pair(EvSeq::zeros(), EvSeq::one_then_zeros())) ==
          interleave_pair(EvSeq::zeros(), EvSeq::one_then_zeros()));
    CHECK(p.select(interleave_pair(parse_seq("001:0"), EvSeq::zeros())) ==
          interleave_pair(EvSeq::one_then_zeros(), EvSeq::zeros()));

    const auto pw = power_oracle(l, 3);
    const std::vector<EvSeq> parts = {EvSeq::zeros(), parse_seq("01:0"), EvSeq::zeros()};
    const std::vector<EvSeq> want = {EvSeq::zeros(), EvSeq::one_then_zeros(), EvSeq::zeros()};
    CHECK(pw.select(interleave(parts)) == interleave(want));
    CHECK(power_oracle(l, 0).select(parse_seq("1:0")) == EvSeq::zeros());

    const auto co = coproduct_oracle({identity_oracle(), l});
    const std::vector<Symbol> one = {1, 0};
    CHECK(co.select(parse_seq("010:0").prepend(one)) == EvSeq::one_then_zeros().prepend(one));
    const std::vector<Symbol> zero = {0};
    CHECK(co.select(parse_seq("010:0").prepend(zero)) == parse_seq("010:0").prepend(zero));
    const std::vector<Symbol> five = {1, 1, 1, 1, 1, 0};
    CHECK_THROWS_AS(co.answer(EvSeq::zeros().prepend(five)), IndexOutOfRange);

    const auto pf = parallel_finite_oracle(l, 2);
    const auto packed = lambda_pack(SeqTuple{{EvSeq::zeros(), EvSeq::one_then_zeros()}});
    CHECK(pf.select(packed) == packed);
    CHECK(pf.select(EvSeq::zeros()) == EvSeq::zeros());
    const auto packed2 = lambda_pack(SeqTuple{{parse_seq("0001:0"), EvSeq::zeros()}});
    CHECK(lambda_unpack(pf.select(packed2), 2).component(0) == EvSeq::one_then_zeros());
  }

  TEST_CASE("oracle specs") {
    CHECK(parse_oracle_spec("lpo").name == "lpo");
    CHECK(parse_oracle_spec("power:lpo^2").select(interleave(std::vector<EvSeq>{EvSeq::zeros(), parse_seq("1:0")})) ==
          interleave(std::vector<EvSeq>{EvSeq::zeros(), EvSeq::one_then_zeros()}));
    CHECK_NOTHROW(parse_oracle_spec("product:lpo,max"));
    CHECK_NOTHROW(parse_oracle_spec("coproduct:lpo;id"));
    CHECK_NOTHROW(parse_oracle_spec("parfin:lpo*3"));
    CHECK_NOTHROW(parse_oracle_spec("machine:" + (corpus_dir() / "copy16.t2m").string()));
    CHECK_THROWS_AS(parse_oracle_spec("nope"), UnknownName);
  }

  TEST_CASE("run_with_oracle examples") {
    const auto m = writes_one();
    const auto r = run_with_oracle(Program(m), lpo(), EvSeq::zeros(), 1, 1000);
    CHECK(r.base.status == Status::Accepted);
    CHECK(r.base.output == EvSeq::one_then_zeros());
    REQUIRE(r.calls.size() == 1);
    CHECK(r.calls[0].query == EvSeq::one_then_zeros());
    CHECK(r.calls[0].answer == EvSeq::one_then_zeros());
    CHECK(r.calls[0].depth_at_call == 1);
    REQUIRE(r.base.final.has_value());
    CHECK(r.base.final->tapes[2] == EvSeq::one_then_zeros());

    const auto r0 = run_with_oracle(Program(m), nullptr, EvSeq::zeros(), 0, 1000);
    CHECK(r0.base.status == Status::QueryEncountered);

    const auto nested = run_with_oracle(Program(corpus("nested2")), lpo(), EvSeq::zeros(), 1, 10000);
    CHECK(nested.base.status == Status::QueryDiverged);

    const auto dq = run_with_oracle(Program(corpus("diverging_query")), lpo(), EvSeq::zeros(), 1, 5000);
    CHECK(dq.base.status == Status::QueryDiverged);
  }

  TEST_CASE("domain errors and call limits") {
    const auto dom = run_with_oracle(Program(writes_one()), coproduct_oracle({lpo()}), EvSeq::zeros(), 1, 1000);
    CHECK(dom.base.status == Status::OracleDomainError);
    RunOptions opts;
    opts.call_limit = 2;
    const auto lim = run_with_oracle(Program(corpus("three_flat")), lpo(), EvSeq::zeros(), 1, 100000, opts);
    CHECK(lim.base.status == Status::CallLimitExceeded);
    opts.call_limit = 3;
    CHECK(run_with_oracle(Program(corpus("three_flat")), lpo(), EvSeq::zeros(), 1, 100000, opts).base.status ==
          Status::Accepted);
  }

  TEST_CASE("fueled-limit queries are approximate") {
    RunOptions opts;
    opts.query_mode = QueryMode::FueledLimit;
    opts.query_fuel = 200;
    const auto r = run_with_oracle(Program(corpus("lpo_scan")), lpo(), EvSeq::zeros(), 1, 100000, opts);
    CHECK(r.approximate);
    CHECK(r.base.status == Status::Accepted);
    const auto exact = run_with_oracle(Program(corpus("lpo_scan")), lpo(), EvSeq::zeros(), 1, 100000);
    CHECK(exact.base.status == Status::QueryDiverged);
  }

  TEST_CASE("query isolation") {
    const auto m = corpus("query_uses_worktape");
    for (const auto& x : sample_inputs(2)) {
      std::vector<Configuration> before;
      // The caller's state just before and after its call.
      const auto r = run_with_oracle(Program(m), lpo(), x, 1, 10000);
      REQUIRE(r.base.final.has_value());
      const auto& fin = *r.base.final;
      CHECK(fin.tapes[0] == x);
      CHECK(fin.tapes[1] == EvSeq({x.at(0)}, 0));
      CHECK(fin.heads[1] == 0);
      CHECK(fin.tapes[2] == lpo().select(EvSeq({x.at(0)}, 0)));
    }
  }

  TEST_CASE("depth monotonicity and query-free machines") {
    const auto inputs = sample_inputs(3);
    for (const auto& [name, m] : load_corpus()) {
      for (const auto& x : inputs) {
        if (!m.has_queries()) {
          const auto plain = run(m, x, 5000);
          for (unsigned d = 0; d <= 3; ++d) {
            const auto r = run_with_oracle(Program(m), lpo(), x, d, 5000);
            REQUIRE(r.base.status == plain.status);
            REQUIRE(r.base.output == plain.output);
          }
        }
        for (unsigned d = 1; d <= 3; ++d) {
          const auto lo = run_with_oracle(Program(m), lpo(), x, d - 1, 20000);
          if (lo.base.status != Status::Accepted) continue;
          const auto hi = run_with_oracle(Program(m), lpo(), x, d, 20000);
          CHECK(hi.base.output == lo.base.output);
        }
      }
    }
  }

  TEST_CASE("f_n_eval") {
    const auto inputs = sample_inputs(4);
    EvalOptions opts;
    opts.prefix_len = 16;
    opts.fuel = 20000;
    opts.depth = 0;
    const auto id0 = f_n_eval(Program(corpus("copy16")), lpo(), inputs, opts);
    opts.depth = 3;
    CHECK(f_n_eval(Program(corpus("copy16")), lpo(), inputs, opts) == id0);

    opts.depth = 0;
    const auto l0 = f_n_eval(Program(corpus("lpo4")), lpo(), inputs, opts);
    opts.depth = 1;
    const auto l1 = f_n_eval(Program(corpus("lpo4")), lpo(), inputs, opts);
    for (const auto& x : inputs) {
      CHECK(l0.at(x).begin()->kind == OutcomeKind::NoOutput);
      CHECK(l1.at(x).begin()->kind == OutcomeKind::Output);
    }

    opts.exhaustive = true;
    for (const auto& [x, outs] : f_n_eval(Program(corpus("two_calls")), lpo(), inputs, opts)) CHECK(outs.size() == 1);
    const auto multi = f_n_eval(Program(corpus("lpo4")), llpo(), std::vector<EvSeq>{EvSeq::zeros()}, opts);
    CHECK(multi.at(EvSeq::zeros()).size() == 2);
  }

  TEST_CASE("stabilization") {
    const auto inputs = sample_inputs(5);
    // nested2 has no output at depths 0 and 1, so the sample test stops at 0.
    CHECK(stabilization_check(Program(corpus("nested2")), lpo(), inputs, 4, 20000, 16) == 0u);
    const std::vector<EvSeq> two = {EvSeq::zeros(), parse_seq("1:0"), parse_seq("11:0")};
    CHECK(stabilization_check(Program(corpus("chain")), lpo(), two, 4, 20000, 16) == 2u);
    CHECK(stabilization_check(Program(corpus("copy16")), lpo(), inputs, 4, 20000, 16) == 0u);
    const std::vector<EvSeq> ladder = {EvSeq::zeros(), parse_seq("1:0"), parse_seq("11:0"), parse_seq("111:0"),
                                       parse_seq("1111:0")};
    CHECK_FALSE(stabilization_check(Program(corpus("chain")), lpo(), ladder, 3, 20000, 16).has_value());
    CHECK(stabilization_check(Program(corpus("chain")), lpo(), ladder, 5, 20000, 16) == 4u);
  }
}
