#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "t2m/oracle.hpp"

namespace t2m {

using NatSet = std::set<std::uint64_t>;

enum class GateKind { Const, Union, Intersect, Plus, TimesC, Test };

struct Gate {
  GateKind kind = GateKind::Const;
  std::string name;
  NatSet constant;
  std::size_t a = 0;
  std::size_t b = 0;
};

/// Gates in topological order: operands always precede the gate.
struct Circuit {
  std::vector<Gate> gates;
  std::vector<std::size_t> outputs;
};

/// Throws an Error of kind CircuitError on bad operand or output indices.
void validate_circuit(const Circuit& c);

/// Lines `g0 = const {1,2,5}`, `g2 = union|intersect|plus|times g0 g1`,
/// `g3 = test g2`, `output g3`; `#` starts a comment.
Circuit parse_circuit(std::string_view text);
std::string print_circuit(const Circuit& c);
Circuit load_circuit_file(const std::string& path);

NatSet plus_sets(const NatSet& a, const NatSet& b);
/// {a * b} ∪ {0}
NatSet times_sets(const NatSet& a, const NatSet& b);
/// ∅ ↦ ∅, anything else ↦ {0}
NatSet test_set(const NatSet& a);

/// `inputs` replaces the constants of the named Const gates (by index).
std::map<std::size_t, NatSet> eval_circuit(const Circuit& c, const std::map<std::size_t, NatSet>& inputs = {});

std::size_t count_test_gates(const Circuit& c);

/// Element k is 1^{k+1} 0; a set ends with an extra 0.
std::vector<Symbol> encode_set(const NatSet& s);
/// Decodes `count` consecutive encoded sets.
std::vector<NatSet> decode_sets(const EvSeq& bits, std::size_t count);

/// Query machine of a test gate: reads an encoded set and writes 1 when it
/// meets an element, accepting with an all-zero output on the empty set.
MachineGraph test_query_machine();

struct CompiledCircuit {
  /// Evaluates the gates in order; every test gate is one oracle call whose
  /// query computation runs test_query_machine on the encoded operand. The
  /// output is the encoded output sets, in order. The input is ignored.
  Program plan;
  std::size_t lpo_calls = 0;
  /// 2^lpo_calls
  std::uint64_t level_bound = 1;
};

CompiledCircuit compile_to_machine(const Circuit& c);

/// Random circuit with 1..max_gates gates and constants below max_element.
/// Products are replaced by unions when the largest possible element would
/// exceed max_value.
Circuit random_circuit(std::mt19937_64& rng, std::size_t max_gates, std::uint64_t max_element,
                       std::uint64_t max_value = 4096);

}  // namespace t2m
