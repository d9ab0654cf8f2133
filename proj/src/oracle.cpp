#include "t2m/oracle.hpp"

#include <algorithm>
#include <cctype>

#include "t2m/dsl.hpp"

namespace t2m {

std::vector<EvSeq> Oracle::answer(const EvSeq& x) const {
  if (in_domain && !in_domain(x)) throw OracleDomainError(name + ": " + x.to_string() + " is outside the domain");
  auto out = answers(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw OracleDomainError(name + ": empty answer set for " + x.to_string());
  return out;
}

namespace {

bool binary(const EvSeq& x) { return x.is_binary(); }

// All tuples picking one entry from each list.
std::vector<std::vector<EvSeq>> cartesian(const std::vector<std::vector<EvSeq>>& lists) {
  std::vector<std::vector<EvSeq>> out{{}};
  for (const auto& l : lists) {
    std::vector<std::vector<EvSeq>> next;
    for (const auto& partial : out) {
      for (const auto& e : l) {
        auto t = partial;
        t.push_back(e);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool unary_decodable(const EvSeq& x) { return x.is_binary() && x.tail() == 0; }

}  // namespace

Oracle lpo() {
  Oracle o;
  o.name = "lpo";
  o.in_domain = binary;
  o.answers = [](const EvSeq& x) {
    return std::vector<EvSeq>{x.is_zero() ? EvSeq::zeros() : EvSeq::one_then_zeros()};
  };
  o.range_finite = true;
  return o;
}

Oracle llpo() {
  Oracle o;
  o.name = "llpo";
  o.in_domain = binary;
  o.answers = [](const EvSeq& x) {
    const auto& p = x.prefix();
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 1) {
        first = i;
        break;
      }
    }
    if (!first && x.tail() == 1) first = p.size();
    if (!first) return std::vector<EvSeq>{EvSeq::zeros(), EvSeq::one_then_zeros()};
    return std::vector<EvSeq>{*first % 2 == 0 ? EvSeq::zeros() : EvSeq::one_then_zeros()};
  };
  o.single_valued = false;
  o.range_finite = true;
  return o;
}

Oracle max_oracle(NatEncoding enc) {
  Oracle o;
  o.name = "max";
  if (enc == NatEncoding::Unary) {
    o.in_domain = unary_decodable;
    o.answers = [](const EvSeq& x) {
      const Symbol m = decode_naturals(x).max_symbol();
      return std::vector<EvSeq>{EvSeq(encode_unary(m), 0)};
    };
  } else {
    o.in_domain = [](const EvSeq&) { return true; };
    o.answers = [](const EvSeq& x) { return std::vector<EvSeq>{EvSeq({x.max_symbol()}, 0)}; };
  }
  return o;
}

Oracle computable_oracle(MachineGraph g, std::uint64_t fuel) {
  validate_graph(g);
  Oracle o;
  o.name = "machine:" + g.name();
  o.in_domain = binary;
  auto shared = std::make_shared<const MachineGraph>(std::move(g));
  o.answers = [shared, fuel](const EvSeq& x) {
    auto r = run(*shared, x, fuel);
    if (r.status != Status::Accepted) {
      throw OracleDivergence("machine " + shared->name() + " on " + x.to_string() + ": " + to_string(r.status));
    }
    return std::vector<EvSeq>{r.output};
  };
  return o;
}

Oracle identity_oracle() {
  Oracle o;
  o.name = "id";
  o.in_domain = [](const EvSeq&) { return true; };
  o.answers = [](const EvSeq& x) { return std::vector<EvSeq>{x}; };
  return o;
}

Oracle power_oracle(const Oracle& base, std::size_t n) {
  Oracle o;
  o.name = "power:" + base.name + "^" + std::to_string(n);
  o.single_valued = base.single_valued || n == 0;
  o.range_finite = base.range_finite || n == 0;
  if (n == 0) {
    o.in_domain = [](const EvSeq&) { return true; };
    o.answers = [](const EvSeq&) { return std::vector<EvSeq>{EvSeq::zeros()}; };
    return o;
  }
  o.in_domain = [base, n](const EvSeq& x) {
    for (const auto& part : deinterleave(x, n)) {
      if (!base.in_domain(part)) return false;
    }
    return true;
  };
  o.answers = [base, n](const EvSeq& x) {
    std::vector<std::vector<EvSeq>> lists;
    for (const auto& part : deinterleave(x, n)) lists.push_back(base.answer(part));
    std::vector<EvSeq> out;
    for (const auto& t : cartesian(lists)) out.push_back(interleave(t));
    return out;
  };
  return o;
}

Oracle product_oracle(const Oracle& a, const Oracle& b) {
  Oracle o;
  o.name = "product:" + a.name + "," + b.name;
  o.single_valued = a.single_valued && b.single_valued;
  o.range_finite = a.range_finite && b.range_finite;
  o.in_domain = [a, b](const EvSeq& x) {
    auto [l, r] = split_pair(x);
    return a.in_domain(l) && b.in_domain(r);
  };
  o.answers = [a, b](const EvSeq& x) {
    auto [l, r] = split_pair(x);
    std::vector<EvSeq> out;
    for (const auto& t : cartesian({a.answer(l), b.answer(r)})) out.push_back(interleave(t));
    return out;
  };
  return o;
}

Oracle coproduct_oracle(std::vector<Oracle> parts, NatEncoding enc) {
  Oracle o;
  o.name = "coproduct:";
  for (std::size_t i = 0; i < parts.size(); ++i) o.name += (i ? ";" : "") + parts[i].name;
  o.single_valued = std::all_of(parts.begin(), parts.end(), [](const Oracle& p) { return p.single_valued; });
  o.range_finite = std::all_of(parts.begin(), parts.end(), [](const Oracle& p) { return p.range_finite; });
  // Splits an input into (index, header, rest).
  auto split = [enc](const EvSeq& x) -> std::tuple<Symbol, std::vector<Symbol>, EvSeq> {
    if (enc == NatEncoding::Symbols) return {x.at(0), {x.at(0)}, x.drop(1)};
    if (x.tail() == 1 && x.prefix().empty()) throw DecodeError("coproduct index never terminates");
    auto [i, next] = read_unary(x, 0);
    return {i, encode_unary(i), x.drop(next)};
  };
  auto shared = std::make_shared<const std::vector<Oracle>>(std::move(parts));
  o.in_domain = [shared, split](const EvSeq& x) {
    try {
      auto [i, head, rest] = split(x);
      // An out-of-range index is reported by answers() as IndexOutOfRange.
      return i >= shared->size() || (*shared)[i].in_domain(rest);
    } catch (const DecodeError&) {
      return false;
    }
  };
  o.answers = [shared, split](const EvSeq& x) {
    auto [i, head, rest] = split(x);
    if (i >= shared->size()) {
      throw IndexOutOfRange("coproduct index " + std::to_string(i) + " with " + std::to_string(shared->size()) +
                            " components");
    }
    std::vector<EvSeq> out;
    for (const auto& y : (*shared)[i].answer(rest)) out.push_back(y.prepend(head));
    return out;
  };
  return o;
}

Oracle parallel_finite_oracle(const Oracle& base, std::size_t count) {
  Oracle o;
  o.name = "parfin:" + base.name + "*" + std::to_string(count);
  o.single_valued = base.single_valued;
  o.range_finite = base.range_finite;
  o.in_domain = [base, count](const EvSeq& x) {
    // A nonzero tail is reported by answers() as TailNotZero.
    if (x.tail() != 0) return true;
    for (const auto& c : lambda_unpack(x, count).components) {
      if (!base.in_domain(c)) return false;
    }
    return true;
  };
  o.answers = [base, count](const EvSeq& x) {
    std::vector<std::vector<EvSeq>> lists;
    for (const auto& c : lambda_unpack(x, count).components) lists.push_back(base.answer(c));
    std::vector<EvSeq> out;
    for (auto& t : cartesian(lists)) out.push_back(lambda_pack(SeqTuple{std::move(t)}));
    return out;
  };
  return o;
}

namespace {

class SpecParser {
 public:
  SpecParser(std::string_view s, std::uint64_t fuel) : s_(s), fuel_(fuel) {}

  Oracle parse() {
    Oracle o = oracle();
    if (pos_ != s_.size()) fail("trailing text");
    return o;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw UnknownName("oracle spec '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t number() {
    std::size_t n = 0, digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      n = n * 10 + static_cast<std::size_t>(s_[pos_++] - '0');
      ++digits;
    }
    if (digits == 0) fail("expected a number");
    return n;
  }

  std::string word() {
    const auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Oracle oracle() {
    const std::string w = word();
    if (w == "lpo") return lpo();
    if (w == "llpo") return llpo();
    if (w == "max") return max_oracle();
    if (w == "id") return identity_oracle();
    if (!eat(':')) fail("unknown oracle '" + w + "'");
    if (w == "machine") {
      const auto start = pos_;
      while (pos_ < s_.size() && std::string_view(",;^*").find(s_[pos_]) == std::string_view::npos) ++pos_;
      if (pos_ == start) fail("expected a file name");
      return computable_oracle(load_machine_file(std::string(s_.substr(start, pos_ - start))), fuel_);
    }
    if (w == "product") {
      Oracle a = oracle();
      if (!eat(',')) fail("expected ','");
      Oracle b = oracle();
      return product_oracle(a, b);
    }
    if (w == "power") {
      Oracle a = oracle();
      if (!eat('^')) fail("expected '^'");
      return power_oracle(a, number());
    }
    if (w == "parfin") {
      Oracle a = oracle();
      if (!eat('*')) fail("expected '*'");
      return parallel_finite_oracle(a, number());
    }
    if (w == "coproduct") {
      std::vector<Oracle> parts{oracle()};
      while (eat(';')) parts.push_back(oracle());
      return coproduct_oracle(std::move(parts));
    }
    fail("unknown oracle combinator '" + w + "'");
  }

  std::string_view s_;
  std::uint64_t fuel_;
  std::size_t pos_ = 0;
};

}  // namespace

Oracle parse_oracle_spec(const std::string& spec, std::uint64_t machine_fuel) {
  return SpecParser(spec, machine_fuel).parse();
}

std::size_t count_calls(const std::vector<CallRecord>& calls) {
  std::size_t n = 0;
  for (const auto& c : calls) n += 1 + count_calls(c.nested);
  return n;
}

std::size_t nesting_of(const std::vector<CallRecord>& calls) {
  std::size_t best = 0;
  for (const auto& c : calls) best = std::max(best, 1 + nesting_of(c.nested));
  return best;
}

OracleRunResult run_with_oracle(const Program& m, const Oracle* oracle, const EvSeq& input, unsigned depth,
                                std::uint64_t fuel, RunOptions options) {
  if (!input.is_binary()) throw NonBinaryInput("machine input must be binary, got " + input.to_string());
  return run_on_tape(m, oracle, std::make_shared<SeqTape>(input), depth, fuel, std::move(options));
}

OracleRunResult run_on_tape(const Program& m, const Oracle* oracle, std::shared_ptr<InputTape> input, unsigned depth,
                            std::uint64_t fuel, RunOptions options) {
  RunContext ctx(oracle, fuel, std::move(options));
  auto exec = m.start(std::move(input), depth, ctx, true);
  exec->run_to_end();
  OracleRunResult r;
  r.base = to_run_result(*exec);
  r.base.steps_used = fuel - ctx.fuel.remaining();
  r.depth = depth;
  r.calls = exec->take_calls();
  r.total_calls = count_calls(r.calls);
  r.max_nesting = nesting_of(r.calls);
  r.approximate = ctx.approximate;
  r.option_counts = std::move(ctx.option_counts);
  return r;
}

Outcome observe(const OracleRunResult& r, std::size_t prefix_len) {
  const auto& b = r.base;
  if (b.status == Status::Accepted) return {OutcomeKind::Output, b.output.take(prefix_len)};
  if (b.status == Status::FuelExhausted) {
    if (b.written >= prefix_len) return {OutcomeKind::Output, b.output.take(prefix_len)};
    return {OutcomeKind::Undetermined, b.output.take(b.written)};
  }
  return {OutcomeKind::NoOutput, {}};
}

std::string to_string(const Outcome& o) {
  std::string bits;
  for (Symbol s : o.prefix) bits += std::to_string(s);
  switch (o.kind) {
    case OutcomeKind::Output: return bits;
    case OutcomeKind::NoOutput: return "<none>";
    case OutcomeKind::Undetermined: return bits + "...?";
  }
  return bits;
}

OutcomeTable f_n_eval(const Program& m, const Oracle& o, std::span<const EvSeq> inputs, const EvalOptions& opts) {
  OutcomeTable table;
  for (const auto& x : inputs) {
    auto& outcomes = table[x];
    if (!opts.exhaustive) {
      outcomes.insert(observe(run_with_oracle(m, o, x, opts.depth, opts.fuel, opts.run), opts.prefix_len));
      continue;
    }
    // Odometer over answer choices; calls past the script take answer 0.
    std::vector<std::size_t> script;
    for (std::size_t runs = 0; runs < opts.max_runs; ++runs) {
      RunOptions ro = opts.run;
      ro.chooser = [&script](std::size_t call, std::size_t) { return call < script.size() ? script[call] : 0; };
      auto r = run_with_oracle(m, o, x, opts.depth, opts.fuel, ro);
      outcomes.insert(observe(r, opts.prefix_len));
      const auto& counts = r.option_counts;
      std::vector<std::size_t> taken(counts.size(), 0);
      for (std::size_t k = 0; k < taken.size() && k < script.size(); ++k) taken[k] = script[k];
      std::size_t k = taken.size();
      while (k > 0 && taken[k - 1] + 1 >= counts[k - 1]) --k;
      if (k == 0) break;
      taken[k - 1] += 1;
      taken.resize(k);
      script = std::move(taken);
    }
  }
  return table;
}

std::optional<unsigned> stabilization_check(const Program& m, const Oracle& o, std::span<const EvSeq> inputs,
                                            unsigned n_max, std::uint64_t fuel, std::size_t prefix_len) {
  EvalOptions opts;
  opts.fuel = fuel;
  opts.prefix_len = prefix_len;
  opts.exhaustive = !o.single_valued && o.range_finite;
  opts.depth = 0;
  auto previous = f_n_eval(m, o, inputs, opts);
  for (unsigned n0 = 0; n0 <= n_max; ++n0) {
    opts.depth = n0 + 1;
    auto next = f_n_eval(m, o, inputs, opts);
    if (next == previous) return n0;
    previous = std::move(next);
  }
  return std::nullopt;
}

}  // namespace t2m
