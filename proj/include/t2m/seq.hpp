#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace t2m {

using Symbol = std::uint64_t;

/// An eventually-constant infinite sequence over natural-number symbols:
/// `prefix` followed by `tail` repeated forever. The prefix never ends with
/// the tail symbol, so equal sequences have identical representations.
class EvSeq {
 public:
  EvSeq() = default;
  EvSeq(std::vector<Symbol> prefix, Symbol tail);

  static EvSeq zeros() { return {}; }
  /// 10^ℕ, the non-zero answer of LPO.
  static EvSeq one_then_zeros() { return EvSeq({1}, 0); }
  static EvSeq constant(Symbol s) { return EvSeq({}, s); }

  Symbol at(std::size_t i) const noexcept { return i < prefix_.size() ? prefix_[i] : tail_; }
  const std::vector<Symbol>& prefix() const noexcept { return prefix_; }
  Symbol tail() const noexcept { return tail_; }

  /// Overwrites position `i`, keeping the canonical form.
  void set(std::size_t i, Symbol s);

  /// First `n` symbols.
  std::vector<Symbol> take(std::size_t n) const;
  /// The sequence with its first `n` symbols removed.
  EvSeq drop(std::size_t n) const;
  /// `head` followed by this sequence.
  EvSeq prepend(std::span<const Symbol> head) const;

  bool is_zero() const noexcept { return prefix_.empty() && tail_ == 0; }
  bool is_binary() const noexcept;
  Symbol max_symbol() const noexcept;

  std::string to_string() const;

  friend bool operator==(const EvSeq&, const EvSeq&) = default;
  /// Length-lexicographic order on canonical forms: prefix length, then
  /// prefix contents, then tail.
  friend std::strong_ordering operator<=>(const EvSeq& a, const EvSeq& b);

 private:
  void canonicalize();

  std::vector<Symbol> prefix_;
  Symbol tail_ = 0;
};

EvSeq make_seq(std::vector<Symbol> prefix, Symbol tail);

/// Parses the `prefix:tail` literal (`1101:0`, `3,1,2:0`, `:0`).
EvSeq parse_seq(std::string_view text);

/// A finitely supported element of a countable product of sequences.
/// Components at index >= components.size() read as 0^ℕ.
struct SeqTuple {
  std::vector<EvSeq> components;

  const EvSeq& component(std::size_t i) const;
  std::size_t size() const noexcept { return components.size(); }

  friend bool operator==(const SeqTuple& a, const SeqTuple& b);
};

std::uint64_t cantor_pair(std::uint64_t i, std::uint64_t j);
std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k);

/// result(cantor_pair(i, j)) = t.component(i).at(j). Every component must
/// have tail 0, otherwise the packed sequence is not eventually constant.
EvSeq lambda_pack(const SeqTuple& t);
/// First `count` components of a packed sequence with tail 0.
SeqTuple lambda_unpack(const EvSeq& s, std::size_t count);

/// result(2i) = x(i), result(2i+1) = y(i). Tails must agree.
EvSeq interleave_pair(const EvSeq& x, const EvSeq& y);
std::pair<EvSeq, EvSeq> split_pair(const EvSeq& s);

/// Round-robin interleaving: result(n*i + c) = parts[c](i). Tails must agree.
EvSeq interleave(std::span<const EvSeq> parts);
std::vector<EvSeq> deinterleave(const EvSeq& s, std::size_t n);

/// Unary-delimited encoding of naturals on binary tapes: k ↦ 1^k 0.
std::vector<Symbol> encode_unary(Symbol k);
/// Encodes an ℕ-sequence with tail 0 symbol by symbol.
EvSeq encode_naturals(const EvSeq& s);
/// Inverse of encode_naturals; the input must be binary with tail 0.
EvSeq decode_naturals(const EvSeq& bits);
/// Reads one unary-delimited natural starting at `pos`; returns the value and
/// the position after its delimiter.
std::pair<Symbol, std::size_t> read_unary(const EvSeq& bits, std::size_t pos);

}  // namespace t2m
