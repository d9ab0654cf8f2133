#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "t2m/oracle.hpp"

namespace t2m {

/// The revision symbol of a finitely revising output.
inline constexpr Symbol MARK = 2;

/// Output over {0, 1, MARK}; every MARK discards everything written before it.
struct RevisingStream {
  EvSeq symbols;
  std::size_t mark_count = 0;

  /// Counts the marks; throws DecodeError on symbols > MARK or a MARK tail.
  static RevisingStream from_symbols(EvSeq symbols);
};

/// The symbols strictly after the last MARK.
EvSeq revising_decode(const RevisingStream& s);

/// 2-bit blocks on a binary tape: 00 → 0, 01 → 1, 10 → MARK.
EvSeq encode_revising(const RevisingStream& s);
RevisingStream decode_revising_bits(const EvSeq& bits);

struct LoopStep {
  Symbol threshold;
  EvSeq query;
  EvSeq answer;
};

struct MaxLoopResult {
  Symbol value = 0;
  std::size_t calls_used = 0;
  std::vector<LoopStep> trace;
};

/// w^n(i) = 1 iff w(i) > n.
EvSeq threshold_stream(const EvSeq& w, Symbol n);

/// Asks LPO about w^0, w^1, ... until the answer is 0^ℕ. Throws
/// BudgetExceeded when more than `oracle_budget` calls would be needed.
MaxLoopResult max_by_lpo_loop(const EvSeq& w, std::size_t oracle_budget);

/// The rollback point of an optimistically answered call.
struct Checkpoint {
  Configuration snapshot;
  std::size_t pending_query_id = 0;
};

struct RevisingOptions {
  std::uint64_t fuel = 1000000;
  std::size_t call_budget = 64;
  /// The main computation pauses once this much output follows the last MARK.
  std::size_t prefix_len = 64;
};

struct RevisingRun {
  RevisingStream stream;
  /// Final status of the surviving main branch; Running when it was paused
  /// with prefix_len symbols of output.
  Status main_status = Status::Running;
  std::size_t calls = 0;
  /// Queries found to contain a 1, each answered 10^ℕ after a rollback.
  std::size_t revised_queries = 0;
  std::uint64_t steps = 0;
};

/// Runs m with every LPO call answered 0^ℕ at first while the query
/// computation is stepped alongside (one step each, round-robin). A query
/// that writes a 1 triggers a MARK and a rollback to its checkpoint, where
/// the call is answered 10^ℕ. Throws CallBudgetExceeded, and
/// QueryUndecidedWithinFuel when a query neither writes a 1 nor accepts.
RevisingRun simulate_lpo_by_revising(const MachineGraph& m, const EvSeq& input, const RevisingOptions& opts = {});

struct RevisingToMax {
  /// query(i) = largest position directly after a MARK at or before i, or 0.
  EvSeq query;
  /// Given MAX(query), the output: the stream with that many symbols dropped.
  std::function<EvSeq(Symbol)> answer_to_output;
};

RevisingToMax revising_to_max(const RevisingStream& s);

struct HaltingCertificate {
  enum class Kind { Halts, Loops };
  Kind kind = Kind::Loops;
  std::uint64_t step = 0;

  static HaltingCertificate halts(std::uint64_t step) { return {Kind::Halts, step}; }
  static HaltingCertificate loops() { return {Kind::Loops, 0}; }
};

/// halts:<n> or loops
HaltingCertificate parse_certificate(const std::string& text);

struct HaltingVerdict {
  bool halts = false;
  /// 0 per step without halting, 1 at the halting step.
  EvSeq query;
  EvSeq answer;
  std::uint64_t steps_run = 0;
};

/// Decides whether `subject` halts on `input` with one LPO call on its step
/// stream. Halts(step) is checked by running step steps (throws
/// CertificateUnverifiable if step > fuel, CertificateRefuted if it does not
/// halt by then). Loops is checked for fuel steps and then taken as 0^ℕ.
HaltingVerdict halting_demo(const MachineGraph& subject, const HaltingCertificate& certificate, std::uint64_t fuel,
                            const EvSeq& input = EvSeq::zeros());

}  // namespace t2m
