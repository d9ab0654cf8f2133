#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "t2m/oracle.hpp"

namespace t2m {

/// A multi-valued function given by an oracle, together with sample inputs
/// from its domain.
struct Problem {
  std::string name;
  std::vector<EvSeq> domain_samples;
  Oracle map;

  std::vector<EvSeq> eval(const EvSeq& x) const { return map.answer(x); }
  bool single_valued() const noexcept { return map.single_valued; }
  bool range_finite() const noexcept { return map.range_finite; }
};

/// Binary samples: boundary cases first, then seeded random ones.
std::vector<EvSeq> binary_samples(std::size_t count, std::uint64_t seed, std::size_t max_prefix = 12,
                                  bool zero_tail_only = false);
/// Unary encodings of ℕ-sequences with symbols ≤ bound.
std::vector<EvSeq> unary_samples(std::size_t count, std::uint64_t seed, Symbol bound, std::size_t max_len = 6);

Problem lpo_problem(std::vector<EvSeq> samples = {});
Problem llpo_problem(std::vector<EvSeq> samples = {});
/// MAX on unary-encoded inputs.
Problem max_problem(std::vector<EvSeq> samples = {});
Problem identity_problem(std::vector<EvSeq> samples = {});
/// lpo, llpo, max, id, or any oracle spec accepted by parse_oracle_spec.
Problem catalog_problem(const std::string& name);

/// Sample pairs are restricted to equal tails, so their interleavings stay
/// eventually constant.
Problem product(const Problem& f, const Problem& g);
Problem power(const Problem& f, std::size_t n);
Problem coproduct(const std::vector<Problem>& fs);
Problem parallelize_finite(const Problem& f, std::size_t count);
/// The same operator as parallelize_finite, read as the count-component
/// truncation of the full parallelization.
Problem parallelize_truncated(const Problem& f, std::size_t count);

/// G computes the query from the input; F reads interleave(input, answer).
struct ReductionWitness {
  Program F;
  Program G;
};

enum class RelationKind { W, BC, BF, F, Hat };

struct Relation {
  RelationKind kind = RelationKind::W;
  /// bc: power, bf: largest coproduct index, f / hat: component count.
  std::size_t n = 1;

  std::string to_string() const;
};

/// W, bc:<n>, bf, bf:<bound>, f:<k>, hat:<k>
Relation parse_relation(const std::string& text);

struct SampleCheck {
  EvSeq input;
  EvSeq query;
  std::vector<EvSeq> expected;
  /// One entry per answer choice.
  std::vector<std::string> produced;
  bool pass = false;
  bool approximate = false;
  std::string note;
};

struct CheckReport {
  Relation relation;
  std::string f_name;
  std::string g_name;
  std::size_t prefix_len = 0;
  std::vector<SampleCheck> per_sample;
  bool passed = false;
  /// Some query of G was cut off by its fuel and read as prefix + 0^ℕ.
  bool approximate = false;
};

struct CheckOptions {
  std::size_t prefix_len = 64;
  std::uint64_t fuel = 1000000;
  /// Steps granted to G; a G that is still running is read as its written
  /// prefix followed by zeros.
  std::uint64_t query_fuel = 20000;
  /// Largest coproduct index for bf.
  std::size_t bf_bound = 4;
};

/// Throws WitnessDiverged when G or F halts without usable output.
CheckReport check_weihrauch(const Problem& f, const Problem& g, const ReductionWitness& w,
                            const CheckOptions& opts = {});
CheckReport check_bc(const Problem& f, const Problem& g, std::size_t n, const ReductionWitness& w,
                     const CheckOptions& opts = {});
CheckReport check_bf(const Problem& f, const Problem& g, const ReductionWitness& w, const CheckOptions& opts = {});
CheckReport check_f(const Problem& f, const Problem& g, std::size_t count, const ReductionWitness& w,
                    const CheckOptions& opts = {});
CheckReport check_hat(const Problem& f, const Problem& g, std::size_t count, const ReductionWitness& w,
                      const CheckOptions& opts = {});
CheckReport check_relation(const Relation& r, const Problem& f, const Problem& g, const ReductionWitness& w,
                           const CheckOptions& opts = {});

// Witness machines.

MachineGraph copy_machine();
/// Copies the odd positions of the input.
MachineGraph odd_projection_machine();
/// F = odd projection, G = copy.
ReductionWitness reflexivity_witness();
/// LPO ≤ MAX: G writes each input bit b as the unary block of b, F reads the
/// first answer bit.
ReductionWitness lpo_to_max_witness();
/// MAX ≤ ⟨LPO⟩^bound on inputs with symbols ≤ bound: for every natural v,
/// G emits the bound thresholds [v > c]; F counts the positive answers.
ReductionWitness max_threshold_witness(std::size_t bound);
/// f ≤ f̂_{<∞}: the input goes to component 0, the answer is read back from it.
ReductionWitness embedding_witness();
/// f ≤ ⌈⟨f⟩^k⌉: the input is sent to index 1.
ReductionWitness coproduct_index1_witness();
/// (⟨F⟩^n, ⟨G⟩^n) built by interleaved re-indexing.
ReductionWitness lift_witness(const ReductionWitness& w, std::size_t n);

struct LawResult {
  std::string law;
  std::size_t samples = 0;
  bool passed = false;
  std::string detail;
};

struct AlgebraReport {
  std::vector<LawResult> laws;
  bool passed = true;
};

/// Sample-level checks of: ⟨⟨h⟩^m⟩^n ≡ ⟨h⟩^{nm} under the component
/// bijection (a, b) ↦ n·b + a; ⟨h, ⌈⟨h⟩^i⌉⟩ ≡ ⌈⟨h, ⟨h⟩^i⟩⌉ under moving
/// the index; h ≤ ĥ_{<∞} via the embedding witness; and
/// (ĥ_{<∞})^_{<∞} ≡ ĥ_{<∞} under (a, b) ↦ a·k + b.
AlgebraReport algebra_identity_suite(const Problem& h, std::size_t n, std::size_t m, std::size_t samples,
                                     std::size_t prefix_len = 64, std::uint64_t seed = 1);

}  // namespace t2m
