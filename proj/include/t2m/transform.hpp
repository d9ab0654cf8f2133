#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "t2m/oracle.hpp"

namespace t2m {

/// A graph whose every vertex carries a layer tag N(v) ≤ depth.
struct LayeredMachine {
  MachineGraph graph;
  unsigned depth = 0;
};

/// Copies of m without its start vertex, one per nesting level 0..n. The
/// start vertex stays outside the copies (tag 0) and enters copy 0. Query
/// vertices of copy i < n call into copy i + 1; those of copy n, which only
/// ever run at depth 0, become Reject. Copy vertices are named `v__i`.
LayeredMachine separate_layers(const MachineGraph& m, unsigned n);

/// Violations of the tag conditions: out-degree-1 vertices and branches keep
/// their tag, a query's cont keeps it and its query successor increments it,
/// no query sits at the last layer, every tag is ≤ depth.
std::vector<std::string> check_layer_conditions(const LayeredMachine& lm);

/// Runs m1 on the output of m0; m0 is advanced only as far as m1 reads.
Program compose_machines(Program m0, Program m1);

struct QueryCounts {
  std::size_t total = 0;
  std::size_t top_level = 0;

  friend bool operator==(const QueryCounts&, const QueryCounts&) = default;
};

QueryCounts count_queries(const OracleRunResult& r);

struct SplitResult {
  /// Outputs the query m poses on w, or 0^ℕ when m makes no call.
  Program G;
  /// Runs m on the first component of its input, answering the single call
  /// with the second component.
  Program F;
  std::vector<std::size_t> calls_per_sample;
};

/// Throws MultipleCalls if m calls the oracle more than once on a sample
/// (checked at depth 1).
SplitResult split_single_call(const MachineGraph& m, const Oracle& o, std::span<const EvSeq> samples,
                              std::uint64_t fuel, const RunOptions& options = {});

/// One call: the query computation is G on the shared input, the
/// continuation is F on interleave(input, answer). Built as a plain graph
/// when both are query-free graphs and F leaves tape 2 alone.
Program join_witness(const Program& F, const Program& G);
/// The graph form; F's head on tape 0 is simulated with two heads (tape 0 for
/// even positions, the answer on tape 2 for odd ones).
MachineGraph join_graph(const MachineGraph& F, const MachineGraph& G);

/// n independent copies: part c reads input positions n*i + c and writes
/// output positions n*i + c.
Program parallel_program(std::vector<Program> parts);
/// Like parallel_program for witnesses of the second kind: the input is
/// interleave(x, b) with x and b both n-way interleavings, and part c reads
/// interleave(x_c, b_c).
Program paired_parallel_program(std::vector<Program> parts);

struct InlineRow {
  EvSeq input;
  std::string direct_status;
  std::string inlined_status;
  Outcome direct;
  Outcome inlined;
  bool agree = false;
};

struct InlineReport {
  unsigned depth = 0;
  std::vector<InlineRow> rows;
  bool all_agree = true;
};

/// Compares m at `depth` with oracle computable_oracle(g) against m at
/// depth - 1 where every query reached at depth 0 runs its query computation
/// and then g directly.
InlineReport inline_computable_oracle(const MachineGraph& m, const MachineGraph& g, unsigned depth,
                                      std::span<const EvSeq> samples, std::uint64_t fuel,
                                      std::size_t prefix_len = 64);

}  // namespace t2m
