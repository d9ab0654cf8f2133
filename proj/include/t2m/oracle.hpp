#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "t2m/program.hpp"

namespace t2m {

/// A multi-valued map on sequences. `answers` returns the answer set of an
/// in-domain input; the set is normalized (sorted, duplicate-free) by answer().
struct Oracle {
  std::string name;
  std::function<bool(const EvSeq&)> in_domain;
  std::function<std::vector<EvSeq>(const EvSeq&)> answers;
  bool single_valued = true;
  bool range_finite = false;

  /// Sorted, duplicate-free, nonempty. Throws OracleDomainError outside the
  /// domain and OracleDivergence when the answer cannot be computed.
  std::vector<EvSeq> answer(const EvSeq& x) const;
  /// The least answer in length-lexicographic order.
  EvSeq select(const EvSeq& x) const { return answer(x).front(); }
};

/// How naturals are presented to an oracle: as unary blocks 1^k 0 on a binary
/// tape, or directly as sequence symbols.
enum class NatEncoding { Unary, Symbols };

Oracle lpo();
/// Lesser omniscience: 0^ℕ if the first 1 (if any) sits at an even position,
/// 10^ℕ if at an odd position; both when the input is 0^ℕ.
Oracle llpo();
Oracle max_oracle(NatEncoding enc = NatEncoding::Unary);
/// Runs `g` (query-free) with the given fuel; answer = its output on Accept.
Oracle computable_oracle(MachineGraph g, std::uint64_t fuel);
/// Always answers the input itself.
Oracle identity_oracle();

Oracle product_oracle(const Oracle& a, const Oracle& b);
/// Flat n-way interleaving; power 0 is the unit problem with answer 0^ℕ.
Oracle power_oracle(const Oracle& o, std::size_t n);
Oracle coproduct_oracle(std::vector<Oracle> parts, NatEncoding enc = NatEncoding::Unary);
Oracle parallel_finite_oracle(const Oracle& o, std::size_t count);

/// Resolves a CLI oracle name: lpo, llpo, max, id, machine:<file>,
/// product:<a>,<b>, power:<a>^<n>, coproduct:<a>;<b>;..., parfin:<a>*<n>.
Oracle parse_oracle_spec(const std::string& spec, std::uint64_t machine_fuel = 1000000);

struct OracleRunResult {
  RunResult base;
  unsigned depth = 0;
  std::vector<CallRecord> calls;
  std::size_t total_calls = 0;
  std::size_t max_nesting = 0;
  /// Some query was cut off by the per-query fuel limit.
  bool approximate = false;
  /// Answer-set sizes of the calls, in call order.
  std::vector<std::size_t> option_counts;
};

/// Runs `m` at the given depth with a shared step budget. `oracle` may be
/// null when no call can happen (depth 0).
OracleRunResult run_with_oracle(const Program& m, const Oracle* oracle, const EvSeq& input, unsigned depth,
                                std::uint64_t fuel, RunOptions options = {});
inline OracleRunResult run_with_oracle(const Program& m, const Oracle& oracle, const EvSeq& input, unsigned depth,
                                       std::uint64_t fuel, RunOptions options = {}) {
  return run_with_oracle(m, &oracle, input, depth, fuel, std::move(options));
}

/// As run_with_oracle, on an arbitrary input tape.
OracleRunResult run_on_tape(const Program& m, const Oracle* oracle, std::shared_ptr<InputTape> input, unsigned depth,
                            std::uint64_t fuel, RunOptions options = {});

std::size_t count_calls(const std::vector<CallRecord>& calls);
std::size_t nesting_of(const std::vector<CallRecord>& calls);

enum class OutcomeKind { Output, NoOutput, Undetermined };

/// What a run tells about F_n(x) at a fixed prefix length.
struct Outcome {
  OutcomeKind kind = OutcomeKind::NoOutput;
  std::vector<Symbol> prefix;

  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

Outcome observe(const OracleRunResult& r, std::size_t prefix_len);
std::string to_string(const Outcome& o);

struct EvalOptions {
  unsigned depth = 1;
  std::uint64_t fuel = 1000000;
  std::size_t prefix_len = 64;
  /// Enumerate every combination of answer choices instead of the select
  /// policy alone.
  bool exhaustive = false;
  std::size_t max_runs = 4096;
  RunOptions run;
};

using OutcomeTable = std::map<EvSeq, std::set<Outcome>>;

OutcomeTable f_n_eval(const Program& m, const Oracle& o, std::span<const EvSeq> inputs, const EvalOptions& opts);

/// Least n0 ≤ n_max with identical tables at n0 and n0 + 1 on the samples.
std::optional<unsigned> stabilization_check(const Program& m, const Oracle& o, std::span<const EvSeq> inputs,
                                            unsigned n_max, std::uint64_t fuel, std::size_t prefix_len);

}  // namespace t2m
