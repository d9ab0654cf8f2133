#include "t2m/seq.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "t2m/errors.hpp"

namespace t2m {

EvSeq::EvSeq(std::vector<Symbol> prefix, Symbol tail) : prefix_(std::move(prefix)), tail_(tail) { canonicalize(); }

void EvSeq::canonicalize() {
  while (!prefix_.empty() && prefix_.back() == tail_) prefix_.pop_back();
}

void EvSeq::set(std::size_t i, Symbol s) {
  if (i < prefix_.size()) {
    prefix_[i] = s;
    if (i + 1 == prefix_.size()) canonicalize();
    return;
  }
  if (s == tail_) return;
  prefix_.resize(i + 1, tail_);
  prefix_[i] = s;
}

std::vector<Symbol> EvSeq::take(std::size_t n) const {
  std::vector<Symbol> out(n, tail_);
  std::copy_n(prefix_.begin(), std::min(n, prefix_.size()), out.begin());
  return out;
}

EvSeq EvSeq::drop(std::size_t n) const {
  if (n >= prefix_.size()) return EvSeq({}, tail_);
  return EvSeq(std::vector<Symbol>(prefix_.begin() + static_cast<std::ptrdiff_t>(n), prefix_.end()), tail_);
}

EvSeq EvSeq::prepend(std::span<const Symbol> head) const {
  std::vector<Symbol> p(head.begin(), head.end());
  p.insert(p.end(), prefix_.begin(), prefix_.end());
  return EvSeq(std::move(p), tail_);
}

bool EvSeq::is_binary() const noexcept {
  return tail_ <= 1 && std::all_of(prefix_.begin(), prefix_.end(), [](Symbol s) { return s <= 1; });
}

Symbol EvSeq::max_symbol() const noexcept {
  Symbol m = tail_;
  for (Symbol s : prefix_) m = std::max(m, s);
  return m;
}

std::string EvSeq::to_string() const {
  std::ostringstream out;
  const bool digits = std::all_of(prefix_.begin(), prefix_.end(), [](Symbol s) { return s <= 9; });
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (!digits && i > 0) out << ',';
    out << prefix_[i];
  }
  out << ':' << tail_;
  return out.str();
}

std::strong_ordering operator<=>(const EvSeq& a, const EvSeq& b) {
  if (auto c = a.prefix_.size() <=> b.prefix_.size(); c != 0) return c;
  if (auto c = a.prefix_ <=> b.prefix_; c != 0) return c;
  return a.tail_ <=> b.tail_;
}

EvSeq make_seq(std::vector<Symbol> prefix, Symbol tail) { return EvSeq(std::move(prefix), tail); }

namespace {

Symbol parse_number(std::string_view text, std::string_view whole) {
  Symbol value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("invalid symbol '" + std::string(text) + "' in sequence literal '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

EvSeq parse_seq(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw ParseError("sequence literal '" + std::string(text) + "' lacks ':tail'");
  }
  const auto head = text.substr(0, colon);
  const Symbol tail = parse_number(text.substr(colon + 1), text);
  std::vector<Symbol> prefix;
  if (head.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= head.size()) {
      const auto comma = head.find(',', start);
      const auto end = comma == std::string_view::npos ? head.size() : comma;
      prefix.push_back(parse_number(head.substr(start, end - start), text));
      start = end + 1;
    }
  } else {
    for (char c : head) prefix.push_back(parse_number(std::string_view(&c, 1), text));
  }
  return EvSeq(std::move(prefix), tail);
}

const EvSeq& SeqTuple::component(std::size_t i) const {
  static const EvSeq zero;
  return i < components.size() ? components[i] : zero;
}

bool operator==(const SeqTuple& a, const SeqTuple& b) {
  const auto n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.component(i) != b.component(i)) return false;
  }
  return true;
}

std::uint64_t cantor_pair(std::uint64_t i, std::uint64_t j) {
  const std::uint64_t s = i + j;
  return s * (s + 1) / 2 + j;
}

std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t k) {
  // Largest s with s(s+1)/2 <= k; the floating estimate is corrected exactly.
  auto s = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(k) + 1.0) - 1.0) / 2.0);
  while (s * (s + 1) / 2 > k) --s;
  while ((s + 1) * (s + 2) / 2 <= k) ++s;
  const std::uint64_t j = k - s * (s + 1) / 2;
  return {s - j, j};
}

EvSeq lambda_pack(const SeqTuple& t) {
  std::size_t length = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& c = t.components[i];
    if (c.tail() != 0) {
      throw TailNotZero("component " + std::to_string(i) + " = " + c.to_string() + " has a non-zero tail");
    }
    if (!c.prefix().empty()) length = std::max<std::size_t>(length, cantor_pair(i, c.prefix().size() - 1) + 1);
  }
  std::vector<Symbol> out(length, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& p = t.components[i].prefix();
    for (std::size_t j = 0; j < p.size(); ++j) out[cantor_pair(i, j)] = p[j];
  }
  return EvSeq(std::move(out), 0);
}

SeqTuple lambda_unpack(const EvSeq& s, std::size_t count) {
  if (s.tail() != 0) throw TailNotZero("packed sequence " + s.to_string() + " has a non-zero tail");
  std::vector<std::vector<Symbol>> parts(count);
  for (std::size_t k = 0; k < s.prefix().size(); ++k) {
    const auto [i, j] = cantor_unpair(k);
    if (i >= count) continue;
    auto& p = parts[i];
    if (p.size() <= j) p.resize(j + 1, 0);
    p[j] = s.prefix()[k];
  }
  SeqTuple t;
  for (auto& p : parts) t.components.emplace_back(std::move(p), 0);
  return t;
}

EvSeq interleave_pair(const EvSeq& x, const EvSeq& y) {
  const EvSeq parts[] = {x, y};
  return interleave(parts);
}

std::pair<EvSeq, EvSeq> split_pair(const EvSeq& s) {
  auto parts = deinterleave(s, 2);
  return {std::move(parts[0]), std::move(parts[1])};
}

EvSeq interleave(std::span<const EvSeq> parts) {
  if (parts.empty()) return EvSeq();
  const Symbol tail = parts.front().tail();
  std::size_t longest = 0;
  for (const auto& p : parts) {
    if (p.tail() != tail) {
      throw TailMismatch("cannot interleave " + parts.front().to_string() + " with " + p.to_string() +
                         ": tails differ, result is not eventually constant");
    }
    longest = std::max(longest, p.prefix().size());
  }
  const std::size_t n = parts.size();
  std::vector<Symbol> out(longest * n, tail);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& p = parts[c].prefix();
    for (std::size_t i = 0; i < p.size(); ++i) out[n * i + c] = p[i];
  }
  return EvSeq(std::move(out), tail);
}

std::vector<EvSeq> deinterleave(const EvSeq& s, std::size_t n) {
  std::vector<std::vector<Symbol>> parts(n);
  const auto& p = s.prefix();
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto& part = parts[k % n];
    const std::size_t i = k / n;
    if (part.size() <= i) part.resize(i + 1, s.tail());
    part[i] = p[k];
  }
  std::vector<EvSeq> out;
  out.reserve(n);
  for (auto& part : parts) out.emplace_back(std::move(part), s.tail());
  return out;
}

std::vector<Symbol> encode_unary(Symbol k) {
  std::vector<Symbol> out(k, 1);
  out.push_back(0);
  return out;
}

EvSeq encode_naturals(const EvSeq& s) {
  if (s.tail() != 0) throw TailNotZero("unary encoding needs tail 0, got " + s.to_string());
  std::vector<Symbol> out;
  for (Symbol v : s.prefix()) {
    auto block = encode_unary(v);
    out.insert(out.end(), block.begin(), block.end());
  }
  return EvSeq(std::move(out), 0);
}

std::pair<Symbol, std::size_t> read_unary(const EvSeq& bits, std::size_t pos) {
  Symbol k = 0;
  while (true) {
    const Symbol b = bits.at(pos);
    if (b == 0) return {k, pos + 1};
    if (b != 1) throw DecodeError("non-binary symbol in unary encoding " + bits.to_string());
    if (pos >= bits.prefix().size()) throw DecodeError("unterminated unary block in " + bits.to_string());
    ++k;
    ++pos;
  }
}

EvSeq decode_naturals(const EvSeq& bits) {
  if (!bits.is_binary()) throw DecodeError("unary decoding needs a binary sequence, got " + bits.to_string());
  if (bits.tail() != 0) throw DecodeError("unary decoding needs tail 0, got " + bits.to_string());
  std::vector<Symbol> out;
  std::size_t pos = 0;
  while (pos < bits.prefix().size()) {
    auto [k, next] = read_unary(bits, pos);
    out.push_back(k);
    pos = next;
  }
  return EvSeq(std::move(out), 0);
}

}  // namespace t2m
