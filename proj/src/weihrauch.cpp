#include "t2m/weihrauch.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "t2m/transform.hpp"

namespace t2m {

namespace {

void push_unique(std::vector<EvSeq>& out, std::set<EvSeq>& seen, EvSeq s) {
  if (seen.insert(s).second) out.push_back(std::move(s));
}

std::vector<EvSeq> in_domain_only(const Oracle& o, std::vector<EvSeq> xs) {
  std::erase_if(xs, [&](const EvSeq& x) {
    if (o.in_domain && !o.in_domain(x)) return true;
    // Some malformed inputs pass in_domain and are only rejected by answers(),
    // as are inputs whose answers have no eventually constant encoding.
    try {
      (void)o.answer(x);
    } catch (const IndexOutOfRange&) {
      return true;
    } catch (const TailNotZero&) {
      return true;
    } catch (const TailMismatch&) {
      return true;
    }
    return false;
  });
  return xs;
}

std::map<Symbol, std::vector<EvSeq>> by_tail(const std::vector<EvSeq>& xs) {
  std::map<Symbol, std::vector<EvSeq>> out;
  for (const auto& x : xs) out[x.tail()].push_back(x);
  return out;
}

// `count` components drawn from one tail class.
std::vector<EvSeq> draw_tuple(std::mt19937_64& rng, const std::map<Symbol, std::vector<EvSeq>>& pools,
                              std::size_t count, bool zero_tail) {
  const std::vector<EvSeq>* pool = nullptr;
  if (zero_tail) {
    auto it = pools.find(0);
    if (it != pools.end()) pool = &it->second;
  } else {
    auto it = pools.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(rng() % pools.size()));
    pool = &it->second;
  }
  if (!pool || pool->empty()) return {};
  std::vector<EvSeq> t;
  for (std::size_t c = 0; c < count; ++c) t.push_back((*pool)[rng() % pool->size()]);
  return t;
}

Problem make_problem(std::string name, Oracle o, std::vector<EvSeq> samples) {
  Problem p{std::move(name), {}, std::move(o)};
  p.domain_samples = in_domain_only(p.map, std::move(samples));
  return p;
}

constexpr std::size_t kCombinedSamples = 32;

}  // namespace

std::vector<EvSeq> binary_samples(std::size_t count, std::uint64_t seed, std::size_t max_prefix,
                                  bool zero_tail_only) {
  std::vector<EvSeq> out;
  std::set<EvSeq> seen;
  const std::vector<std::string> fixed = {":0", "1:0", "01:0", "0001:0", ":1", "0:1", "10:1", "1101:0"};
  for (const auto& f : fixed) {
    if (out.size() >= count) break;
    EvSeq s = parse_seq(f);
    if (zero_tail_only && s.tail() != 0) continue;
    push_unique(out, seen, s);
  }
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 64; ++attempt) {
    const std::size_t len = rng() % (max_prefix + 1);
    std::vector<Symbol> p(len);
    for (auto& b : p) b = rng() & 1;
    const Symbol tail = zero_tail_only ? 0 : (rng() % 4 == 0 ? 1 : 0);
    push_unique(out, seen, EvSeq(std::move(p), tail));
  }
  return out;
}

std::vector<EvSeq> unary_samples(std::size_t count, std::uint64_t seed, Symbol bound, std::size_t max_len) {
  std::vector<EvSeq> out;
  std::set<EvSeq> seen;
  const std::vector<std::vector<Symbol>> fixed = {{}, {0}, {bound}, {0, bound}, {bound, 0, 1}};
  for (const auto& f : fixed) {
    if (out.size() >= count) break;
    push_unique(out, seen, encode_naturals(EvSeq(f, 0)));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; out.size() < count && attempt < count * 64; ++attempt) {
    const std::size_t len = rng() % (max_len + 1);
    std::vector<Symbol> p(len);
    for (auto& v : p) v = rng() % (bound + 1);
    push_unique(out, seen, encode_naturals(EvSeq(std::move(p), 0)));
  }
  return out;
}

Problem lpo_problem(std::vector<EvSeq> samples) {
  if (samples.empty()) samples = binary_samples(24, 11);
  return make_problem("lpo", lpo(), std::move(samples));
}

Problem llpo_problem(std::vector<EvSeq> samples) {
  if (samples.empty()) samples = binary_samples(24, 12);
  return make_problem("llpo", llpo(), std::move(samples));
}

Problem max_problem(std::vector<EvSeq> samples) {
  if (samples.empty()) samples = unary_samples(24, 13, 4);
  return make_problem("max", max_oracle(NatEncoding::Unary), std::move(samples));
}

Problem identity_problem(std::vector<EvSeq> samples) {
  if (samples.empty()) samples = binary_samples(24, 14);
  return make_problem("id", identity_oracle(), std::move(samples));
}

Problem catalog_problem(const std::string& name) {
  if (name == "lpo") return lpo_problem();
  if (name == "llpo") return llpo_problem();
  if (name == "max") return max_problem();
  if (name == "id") return identity_problem();
  auto samples = binary_samples(24, 15);
  auto extra = unary_samples(8, 16, 3);
  samples.insert(samples.end(), extra.begin(), extra.end());
  return make_problem(name, parse_oracle_spec(name), std::move(samples));
}

Problem product(const Problem& f, const Problem& g) {
  std::vector<EvSeq> all;
  for (const auto& x : f.domain_samples) {
    for (const auto& y : g.domain_samples) {
      if (x.tail() == y.tail()) all.push_back(interleave_pair(x, y));
    }
  }
  std::vector<EvSeq> samples;
  const std::size_t stride = std::max<std::size_t>(1, all.size() / kCombinedSamples);
  for (std::size_t i = 0; i < all.size() && samples.size() < kCombinedSamples; i += stride) samples.push_back(all[i]);
  return make_problem("product(" + f.name + "," + g.name + ")", product_oracle(f.map, g.map), std::move(samples));
}

Problem power(const Problem& f, std::size_t n) {
  std::vector<EvSeq> samples;
  std::set<EvSeq> seen;
  if (n == 0) {
    samples = {EvSeq::zeros(), EvSeq::one_then_zeros()};
  } else {
    const auto pools = by_tail(f.domain_samples);
    std::mt19937_64 rng(0x5eed + n);
    for (std::size_t i = 0; i < kCombinedSamples * 4 && samples.size() < kCombinedSamples && !pools.empty(); ++i) {
      auto t = draw_tuple(rng, pools, n, false);
      if (!t.empty()) push_unique(samples, seen, interleave(t));
    }
  }
  return make_problem("power(" + f.name + "," + std::to_string(n) + ")", power_oracle(f.map, n), std::move(samples));
}

Problem coproduct(const std::vector<Problem>& fs) {
  std::vector<Oracle> parts;
  std::vector<EvSeq> samples;
  std::string name = "coproduct(";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    parts.push_back(fs[i].map);
    name += (i ? ";" : "") + fs[i].name;
    const auto head = encode_unary(i);
    for (std::size_t k = 0; k < fs[i].domain_samples.size() && k < 8; ++k) {
      samples.push_back(fs[i].domain_samples[k].prepend(head));
    }
  }
  return make_problem(name + ")", coproduct_oracle(std::move(parts), NatEncoding::Unary), std::move(samples));
}

namespace {

Problem parallel_problem(const std::string& label, const Problem& f, std::size_t count) {
  std::vector<EvSeq> samples;
  std::set<EvSeq> seen;
  const auto pools = by_tail(f.domain_samples);
  std::mt19937_64 rng(0xfa11 + count);
  for (std::size_t i = 0; i < kCombinedSamples * 4 && samples.size() < kCombinedSamples; ++i) {
    auto t = draw_tuple(rng, pools, count, true);
    if (t.empty() && count > 0) break;
    push_unique(samples, seen, lambda_pack(SeqTuple{std::move(t)}));
  }
  return make_problem(label + "(" + f.name + "," + std::to_string(count) + ")",
                      parallel_finite_oracle(f.map, count), std::move(samples));
}

}  // namespace

Problem parallelize_finite(const Problem& f, std::size_t count) { return parallel_problem("parfin", f, count); }

Problem parallelize_truncated(const Problem& f, std::size_t count) { return parallel_problem("hat", f, count); }

// ---------------------------------------------------------------------------
// Relations

std::string Relation::to_string() const {
  switch (kind) {
    case RelationKind::W: return "W";
    case RelationKind::BC: return "bc:" + std::to_string(n);
    case RelationKind::BF: return "bf:" + std::to_string(n);
    case RelationKind::F: return "f:" + std::to_string(n);
    case RelationKind::Hat: return "hat:" + std::to_string(n);
  }
  return "W";
}

Relation parse_relation(const std::string& text) {
  if (text == "W" || text == "w") return {RelationKind::W, 1};
  if (text == "bf") return {RelationKind::BF, CheckOptions{}.bf_bound};
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("unknown relation '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string num = text.substr(colon + 1);
  if (num.empty() || !std::all_of(num.begin(), num.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("relation '" + text + "' needs a natural-number parameter");
  }
  const std::size_t n = std::stoull(num);
  if (kind == "bc") return {RelationKind::BC, n};
  if (kind == "bf") return {RelationKind::BF, n};
  if (kind == "f") return {RelationKind::F, n};
  if (kind == "hat") return {RelationKind::Hat, n};
  throw ParseError("unknown relation '" + text + "'");
}

namespace {

struct WitnessRun {
  Status status;
  EvSeq output;
  std::size_t written;
};

// Runs until the output has `prefix_len` cells or the run ends.
WitnessRun run_for_prefix(const Program& p, std::shared_ptr<InputTape> input, std::uint64_t fuel,
                          std::size_t prefix_len) {
  RunContext ctx(nullptr, fuel, {});
  auto exec = p.start(std::move(input), 0, ctx, true);
  while (exec->running() && exec->written() < prefix_len) exec->advance();
  return {exec->status(), exec->output(), exec->written()};
}

std::string bits_of(const std::vector<Symbol>& p) {
  std::string s;
  for (Symbol b : p) s += std::to_string(b);
  return s;
}

}  // namespace

CheckReport check_weihrauch(const Problem& f, const Problem& g, const ReductionWitness& w, const CheckOptions& opts) {
  CheckReport rep;
  rep.f_name = f.name;
  rep.g_name = g.name;
  rep.prefix_len = opts.prefix_len;
  rep.passed = true;
  for (const auto& x : f.domain_samples) {
    SampleCheck sc;
    sc.input = x;
    sc.expected = f.eval(x);

    auto gr = run_with_oracle(w.G, nullptr, x, 0, opts.query_fuel);
    if (gr.base.status == Status::Accepted) {
      sc.query = gr.base.output;
    } else if (gr.base.status == Status::FuelExhausted) {
      sc.query = EvSeq(gr.base.output.take(gr.base.written), 0);
      sc.approximate = true;
      rep.approximate = true;
    } else {
      throw WitnessDiverged("G on " + x.to_string() + ": " + to_string(gr.base.status));
    }

    std::vector<EvSeq> answers;
    try {
      answers = g.eval(sc.query);
    } catch (const Error& e) {
      sc.note = std::string("query not answerable: ") + e.what();
    }

    sc.pass = !answers.empty();
    for (const auto& b : answers) {
      auto tape = std::make_shared<InterleaveTape>(std::vector<std::shared_ptr<InputTape>>{
          std::make_shared<SeqTape>(x), std::make_shared<SeqTape>(b)});
      auto fr = run_for_prefix(w.F, tape, opts.fuel, opts.prefix_len);
      const bool complete = fr.written >= opts.prefix_len || fr.status == Status::Accepted;
      if (!complete && fr.status != Status::Running && fr.status != Status::FuelExhausted) {
        throw WitnessDiverged("F on " + x.to_string() + " with answer " + b.to_string() + ": " +
                              to_string(fr.status));
      }
      const auto prefix = fr.output.take(complete ? opts.prefix_len : fr.written);
      sc.produced.push_back(bits_of(prefix) + (complete ? "" : "...?"));
      if (!complete) {
        sc.pass = false;
        sc.note = "prefix not reached";
        continue;
      }
      const bool ok = std::any_of(sc.expected.begin(), sc.expected.end(),
                                  [&](const EvSeq& e) { return e.take(opts.prefix_len) == prefix; });
      if (!ok) {
        sc.pass = false;
        if (sc.note.empty()) sc.note = "answer " + b.to_string() + " gives a value outside f(x)";
      }
    }
    rep.passed = rep.passed && sc.pass;
    rep.per_sample.push_back(std::move(sc));
  }
  return rep;
}

CheckReport check_bc(const Problem& f, const Problem& g, std::size_t n, const ReductionWitness& w,
                     const CheckOptions& opts) {
  auto rep = check_weihrauch(f, power(g, n), w, opts);
  rep.relation = {RelationKind::BC, n};
  rep.g_name = g.name;
  return rep;
}

CheckReport check_bf(const Problem& f, const Problem& g, const ReductionWitness& w, const CheckOptions& opts) {
  std::vector<Problem> powers;
  for (std::size_t i = 0; i <= opts.bf_bound; ++i) powers.push_back(power(g, i));
  auto rep = check_weihrauch(f, coproduct(powers), w, opts);
  rep.relation = {RelationKind::BF, opts.bf_bound};
  rep.g_name = g.name;
  return rep;
}

CheckReport check_f(const Problem& f, const Problem& g, std::size_t count, const ReductionWitness& w,
                    const CheckOptions& opts) {
  auto rep = check_weihrauch(f, parallelize_finite(g, count), w, opts);
  rep.relation = {RelationKind::F, count};
  rep.g_name = g.name;
  return rep;
}

CheckReport check_hat(const Problem& f, const Problem& g, std::size_t count, const ReductionWitness& w,
                      const CheckOptions& opts) {
  auto rep = check_weihrauch(f, parallelize_truncated(g, count), w, opts);
  rep.relation = {RelationKind::Hat, count};
  rep.g_name = g.name;
  return rep;
}

CheckReport check_relation(const Relation& r, const Problem& f, const Problem& g, const ReductionWitness& w,
                           const CheckOptions& opts) {
  switch (r.kind) {
    case RelationKind::W: {
      auto rep = check_weihrauch(f, g, w, opts);
      rep.relation = r;
      return rep;
    }
    case RelationKind::BC: return check_bc(f, g, r.n, w, opts);
    case RelationKind::BF: {
      CheckOptions o = opts;
      o.bf_bound = r.n;
      return check_bf(f, g, w, o);
    }
    case RelationKind::F: return check_f(f, g, r.n, w, opts);
    case RelationKind::Hat: return check_hat(f, g, r.n, w, opts);
  }
  return check_weihrauch(f, g, w, opts);
}

// ---------------------------------------------------------------------------
// Witness machines

MachineGraph copy_machine() {
  return MachineBuilder("copy")
      .start("s0")
      .begin("s0", "c")
      .branch("c", 0, "z", "o")
      .write("z", 3, 0, "m")
      .write("o", 3, 1, "m")
      .right("m", 0, "c")
      .build();
}

MachineGraph odd_projection_machine() {
  return MachineBuilder("odd_projection")
      .start("s0")
      .begin("s0", "skip")
      .right("skip", 0, "c")
      .branch("c", 0, "z", "o")
      .write("z", 3, 0, "m1")
      .write("o", 3, 1, "m1")
      .right("m1", 0, "m2")
      .right("m2", 0, "c")
      .build();
}

ReductionWitness reflexivity_witness() { return {odd_projection_machine(), copy_machine()}; }

ReductionWitness lpo_to_max_witness() {
  auto G = MachineBuilder("bits_to_unary")
               .start("s0")
               .begin("s0", "c")
               .branch("c", 0, "z", "o")
               .write("z", 3, 0, "m")
               .write("o", 3, 1, "o2")
               .write("o2", 3, 0, "m")
               .right("m", 0, "c")
               .build();
  auto F = MachineBuilder("first_answer_bit")
               .start("s0")
               .begin("s0", "skip")
               .right("skip", 0, "c")
               .branch("c", 0, "z", "o")
               .write("z", 3, 0, "acc")
               .write("o", 3, 1, "acc")
               .accept("acc")
               .build();
  return {std::move(F), std::move(G)};
}

ReductionWitness max_threshold_witness(std::size_t bound) {
  MachineBuilder g("thresholds_" + std::to_string(bound));
  g.start("s0").begin("s0", "n0");
  // n<c>: c ones of the current natural read so far (saturating at bound).
  for (std::size_t c = 0; c <= bound; ++c) {
    const std::string cs = std::to_string(c);
    g.branch("n" + cs, 0, "e" + cs + "_0", "i" + cs);
    g.right("i" + cs, 0, "n" + std::to_string(std::min(c + 1, bound)));
    for (std::size_t j = 0; j < bound; ++j) {
      g.write("e" + cs + "_" + std::to_string(j), 3, c > j ? 1 : 0, "e" + cs + "_" + std::to_string(j + 1));
    }
    g.right("e" + cs + "_" + std::to_string(bound), 0, "n0");
  }

  MachineBuilder f("count_positive_" + std::to_string(bound));
  f.start("s0").begin("s0", "skip").right("skip", 0, "f0");
  // f<c>: head on the first answer bit of component c.
  for (std::size_t c = 0; c < bound; ++c) {
    const std::string cs = std::to_string(c);
    f.branch("f" + cs, 0, "z" + cs, "o" + cs);
    f.write("z" + cs, 3, 0, "acc");
    f.write("o" + cs, 3, 1, "a" + cs);
    f.right("a" + cs, 0, "b" + cs);
    f.right("b" + cs, 0, "f" + std::to_string(c + 1));
  }
  f.write("f" + std::to_string(bound), 3, 0, "acc");
  f.accept("acc");
  return {f.build(), g.build()};
}

ReductionWitness embedding_witness() {
  // Tape 1 holds a sentinel 0 followed by j ones; head 1 sits after them.
  auto G = MachineBuilder("embed_component0")
               .start("s0")
               .begin("s0", "init")
               .right("init", 1, "c")
               .branch("c", 0, "cz", "co")
               .write("cz", 3, 0, "adv")
               .write("co", 3, 1, "adv")
               .right("adv", 0, "pad")
               .write("pad", 3, 0, "lft")
               .left("lft", 1, "chk")
               .branch("chk", 1, "rgt", "one")
               .write("one", 3, 0, "lft")
               .right("rgt", 1, "rchk")
               .branch("rchk", 1, "inc", "rgt")
               .write("inc", 1, 1, "c")
               .build();
  auto F = MachineBuilder("read_component0")
               .start("s0")
               .begin("s0", "skip")
               .right("skip", 0, "init")
               .right("init", 1, "c")
               .branch("c", 0, "cz", "co")
               .write("cz", 3, 0, "m1")
               .write("co", 3, 1, "m1")
               .right("m1", 0, "m2")
               .right("m2", 0, "m3")
               .right("m3", 0, "m4")
               .right("m4", 0, "lft")
               .left("lft", 1, "chk")
               .branch("chk", 1, "rgt", "one")
               .right("one", 0, "one2")
               .right("one2", 0, "lft")
               .right("rgt", 1, "rchk")
               .branch("rchk", 1, "inc", "rgt")
               .write("inc", 1, 1, "c")
               .build();
  return {std::move(F), std::move(G)};
}

ReductionWitness coproduct_index1_witness() {
  auto G = MachineBuilder("tag_index1")
               .start("s0")
               .begin("s0", "h1")
               .write("h1", 3, 1, "h2")
               .write("h2", 3, 0, "c")
               .branch("c", 0, "z", "o")
               .write("z", 3, 0, "m")
               .write("o", 3, 1, "m")
               .right("m", 0, "c")
               .build();
  // Answer cells 0 and 1 are the index header; cell 2 sits at position 5.
  auto F = MachineBuilder("untag_index1")
               .start("s0")
               .begin("s0", "k1")
               .right("k1", 0, "k2")
               .right("k2", 0, "k3")
               .right("k3", 0, "k4")
               .right("k4", 0, "k5")
               .right("k5", 0, "c")
               .branch("c", 0, "z", "o")
               .write("z", 3, 0, "m1")
               .write("o", 3, 1, "m1")
               .right("m1", 0, "m2")
               .right("m2", 0, "c")
               .build();
  return {std::move(F), std::move(G)};
}

ReductionWitness lift_witness(const ReductionWitness& w, std::size_t n) {
  return {paired_parallel_program(std::vector<Program>(n, w.F)), parallel_program(std::vector<Program>(n, w.G))};
}

// ---------------------------------------------------------------------------
// Algebra

namespace {

using AnswerSet = std::set<std::vector<EvSeq>>;

std::string tuple_text(const std::vector<EvSeq>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + t[i].to_string();
  return s + ")";
}

LawResult nested_power_law(const Problem& h, std::size_t n, std::size_t m, std::size_t samples,
                           std::mt19937_64& rng) {
  LawResult law{"nested-power n=" + std::to_string(n) + " m=" + std::to_string(m), 0, true, {}};
  const Oracle nested = power_oracle(power_oracle(h.map, m), n);
  const Oracle flat = power_oracle(h.map, n * m);
  const auto pools = by_tail(h.domain_samples);
  for (std::size_t s = 0; s < samples; ++s) {
    // comp[a][b] is component (a, b); it sits at flat index n*b + a.
    const auto t = draw_tuple(rng, pools, n * m, false);
    std::vector<std::vector<EvSeq>> comp(n, std::vector<EvSeq>(m));
    std::vector<EvSeq> flat_parts(n * m);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        comp[a][b] = t[a * m + b];
        flat_parts[n * b + a] = comp[a][b];
      }
    }
    std::vector<EvSeq> outer;
    for (std::size_t a = 0; a < n; ++a) outer.push_back(interleave(comp[a]));
    const EvSeq nested_in = interleave(outer);
    const EvSeq flat_in = interleave(flat_parts);

    AnswerSet lhs, rhs;
    for (const auto& y : nested.answer(nested_in)) {
      std::vector<EvSeq> row(n * m);
      const auto outer_parts = deinterleave(y, n);
      for (std::size_t a = 0; a < n; ++a) {
        const auto inner = deinterleave(outer_parts[a], m);
        for (std::size_t b = 0; b < m; ++b) row[a * m + b] = inner[b];
      }
      lhs.insert(row);
    }
    for (const auto& y : flat.answer(flat_in)) {
      const auto parts = deinterleave(y, n * m);
      std::vector<EvSeq> row(n * m);
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < m; ++b) row[a * m + b] = parts[n * b + a];
      }
      rhs.insert(row);
    }
    ++law.samples;
    if (lhs != rhs) {
      law.passed = false;
      law.detail = "differs on " + tuple_text(t);
      break;
    }
  }
  return law;
}

LawResult distributivity_law(const Problem& h, std::size_t bound, std::size_t samples, std::mt19937_64& rng) {
  LawResult law{"distributivity bound=" + std::to_string(bound), 0, true, {}};
  std::vector<Oracle> left_parts, right_parts;
  for (std::size_t i = 0; i <= bound; ++i) {
    left_parts.push_back(power_oracle(h.map, i));
    right_parts.push_back(product_oracle(h.map, power_oracle(h.map, i)));
  }
  const Oracle left = product_oracle(h.map, coproduct_oracle(left_parts));
  const Oracle right = coproduct_oracle(right_parts);
  const auto pools = by_tail(h.domain_samples);

  // ⟨x, i·y⟩ ↦ i·⟨x, y⟩, on inputs and on answers alike.
  auto move_index = [](const EvSeq& s) {
    auto [x, rest] = split_pair(s);
    auto [i, next] = read_unary(rest, 0);
    return interleave_pair(x, rest.drop(next)).prepend(encode_unary(i));
  };

  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t i = s % (bound + 1);
    // The unit answer 0^ℕ only pairs with zero-tailed answers.
    const auto t = draw_tuple(rng, pools, i + 1, i == 0 && pools.count(0));
    const EvSeq& x = t[0];
    const EvSeq y = i == 0 ? EvSeq::constant(x.tail()) : interleave(std::span(t).subspan(1));
    const EvSeq left_in = interleave_pair(x, y.prepend(encode_unary(i)));
    ++law.samples;
    try {
      const EvSeq right_in = move_index(left_in);
      std::set<EvSeq> lhs, rhs;
      for (const auto& a : left.answer(left_in)) lhs.insert(move_index(a));
      for (const auto& a : right.answer(right_in)) rhs.insert(a);
      if (lhs != rhs) {
        law.passed = false;
        law.detail = "differs on " + left_in.to_string();
        break;
      }
    } catch (const Error& e) {
      law.passed = false;
      law.detail = left_in.to_string() + ": " + e.what();
      break;
    }
  }
  return law;
}

LawResult idempotence_law(const Problem& h, std::size_t k, std::size_t samples, std::mt19937_64& rng) {
  LawResult law{"parfin-idempotence k=" + std::to_string(k), 0, true, {}};
  const Oracle nested = parallel_finite_oracle(parallel_finite_oracle(h.map, k), k);
  const Oracle flat = parallel_finite_oracle(h.map, k * k);
  const auto pools = by_tail(h.domain_samples);
  if (!pools.count(0)) {
    law.passed = false;
    law.detail = "no samples with tail 0";
    return law;
  }
  for (std::size_t s = 0; s < samples; ++s) {
    const auto t = draw_tuple(rng, pools, k * k, true);
    std::vector<EvSeq> outer;
    for (std::size_t a = 0; a < k; ++a) {
      outer.push_back(lambda_pack(SeqTuple{std::vector<EvSeq>(t.begin() + a * k, t.begin() + (a + 1) * k)}));
    }
    AnswerSet lhs, rhs;
    for (const auto& y : nested.answer(lambda_pack(SeqTuple{outer}))) {
      std::vector<EvSeq> row;
      for (const auto& c : lambda_unpack(y, k).components) {
        for (auto& d : lambda_unpack(c, k).components) row.push_back(std::move(d));
      }
      lhs.insert(row);
    }
    for (const auto& y : flat.answer(lambda_pack(SeqTuple{t}))) rhs.insert(lambda_unpack(y, k * k).components);
    ++law.samples;
    if (lhs != rhs) {
      law.passed = false;
      law.detail = "differs on " + tuple_text(t);
      break;
    }
  }
  return law;
}

}  // namespace

AlgebraReport algebra_identity_suite(const Problem& h, std::size_t n, std::size_t m, std::size_t samples,
                                     std::size_t prefix_len, std::uint64_t seed) {
  AlgebraReport rep;
  std::mt19937_64 rng(seed);
  if (h.domain_samples.empty()) throw Error("algebra", "problem " + h.name + " has no domain samples");

  rep.laws.push_back(nested_power_law(h, n, m, samples, rng));
  rep.laws.push_back(distributivity_law(h, m, samples, rng));

  Problem sampled = h;
  while (sampled.domain_samples.size() < samples) {
    sampled.domain_samples.push_back(h.domain_samples[sampled.domain_samples.size() % h.domain_samples.size()]);
  }
  sampled.domain_samples.resize(samples);
  CheckOptions opts;
  opts.prefix_len = prefix_len;
  LawResult embed{"parfin-embedding k=" + std::to_string(n + 1), 0, true, {}};
  try {
    auto r = check_f(sampled, h, n + 1, embedding_witness(), opts);
    embed.samples = r.per_sample.size();
    embed.passed = r.passed;
    for (const auto& sc : r.per_sample) {
      if (!sc.pass) {
        embed.detail = "fails on " + sc.input.to_string() + ": " + sc.note;
        break;
      }
    }
  } catch (const Error& e) {
    embed.passed = false;
    embed.detail = e.what();
  }
  rep.laws.push_back(std::move(embed));
  rep.laws.push_back(idempotence_law(h, 2, samples, rng));

  for (const auto& l : rep.laws) rep.passed = rep.passed && l.passed;
  return rep;
}

}  // namespace t2m
