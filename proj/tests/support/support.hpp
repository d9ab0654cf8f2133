#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "t2m/circuits.hpp"
#include "t2m/dsl.hpp"
#include "t2m/machine.hpp"
#include "t2m/seq.hpp"

#ifndef T2M_CORPUS_DIR
#error "T2M_CORPUS_DIR must point at tests/corpus"
#endif

namespace t2m::testing {

inline std::filesystem::path corpus_dir() { return T2M_CORPUS_DIR; }

inline std::vector<std::filesystem::path> corpus_files() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir())) {
    if (e.is_regular_file() && e.path().extension() == ".t2m") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::map<std::string, MachineGraph> load_corpus() {
  std::map<std::string, MachineGraph> out;
  for (const auto& p : corpus_files()) out.emplace(p.stem().string(), load_machine_file(p.string()));
  return out;
}

inline MachineGraph corpus(const std::string& name) { return load_machine_file((corpus_dir() / (name + ".t2m")).string()); }

// ---------------------------------------------------------------------------
// Reference implementations, written without the library's helpers.

namespace ref {

/// Pairing by walking the diagonals: (0,0), (1,0), (0,1), (2,0), (1,1), ...
inline std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> pairing_table(std::uint64_t diagonals) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> t;
  std::uint64_t k = 0;
  for (std::uint64_t d = 0; d < diagonals; ++d) {
    for (std::uint64_t j = 0; j <= d; ++j) t[{d - j, j}] = k++;
  }
  return t;
}

/// Scans far enough to see the tail twice.
inline bool all_zero(const EvSeq& s) {
  for (std::size_t i = 0; i < s.prefix().size() + 2; ++i) {
    if (s.at(i) != 0) return false;
  }
  return true;
}

inline EvSeq lpo(const EvSeq& s) { return all_zero(s) ? EvSeq({}, 0) : EvSeq({1}, 0); }

inline Symbol max(const EvSeq& s) {
  Symbol m = 0;
  for (std::size_t i = 0; i < s.prefix().size() + 2; ++i) m = std::max(m, s.at(i));
  return m;
}

inline bool same_prefix(const EvSeq& a, const EvSeq& b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a.at(i) != b.at(i)) return false;
  }
  return true;
}

/// Circuit evaluation on membership vectors.
struct Bits {
  std::vector<bool> in;
  std::size_t top() const {
    for (std::size_t i = in.size(); i > 0; --i) {
      if (in[i - 1]) return i - 1;
    }
    return 0;
  }
  bool empty() const { return std::find(in.begin(), in.end(), true) == in.end(); }
};

inline Bits from_set(const NatSet& s) {
  Bits b;
  for (auto v : s) {
    if (b.in.size() <= v) b.in.resize(v + 1, false);
    b.in[v] = true;
  }
  return b;
}

inline NatSet to_set(const Bits& b) {
  NatSet s;
  for (std::size_t i = 0; i < b.in.size(); ++i) {
    if (b.in[i]) s.insert(i);
  }
  return s;
}

inline bool has(const Bits& b, std::size_t v) { return v < b.in.size() && b.in[v]; }

inline Bits eval_gate(GateKind kind, const Bits& a, const Bits& b) {
  Bits r;
  switch (kind) {
    case GateKind::Union:
    case GateKind::Intersect: {
      const std::size_t n = std::max(a.in.size(), b.in.size());
      r.in.assign(n, false);
      for (std::size_t v = 0; v < n; ++v) r.in[v] = kind == GateKind::Union ? (has(a, v) || has(b, v)) : (has(a, v) && has(b, v));
      break;
    }
    case GateKind::Plus: {
      if (a.empty() || b.empty()) break;
      const std::size_t n = a.top() + b.top() + 1;
      r.in.assign(n, false);
      // v ∈ A + B iff some split v = x + (v - x) lands in both.
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t x = 0; x <= std::min(v, a.top()) && !r.in[v]; ++x) r.in[v] = has(a, x) && has(b, v - x);
      }
      break;
    }
    case GateKind::TimesC: {
      const std::size_t n = (a.empty() || b.empty()) ? 1 : a.top() * b.top() + 1;
      r.in.assign(n, false);
      r.in[0] = true;
      // v ∈ A × B iff some divisor x ∈ A of v has v / x ∈ B.
      for (std::size_t v = 1; v < n; ++v) {
        for (std::size_t x = 1; x <= std::min(v, a.top()) && !r.in[v]; ++x) r.in[v] = v % x == 0 && has(a, x) && has(b, v / x);
      }
      break;
    }
    case GateKind::Test:
      if (!a.empty()) r.in.assign(1, true);
      break;
    case GateKind::Const:
      break;
  }
  return r;
}

inline std::map<std::size_t, NatSet> eval_circuit(const Circuit& c) {
  std::vector<Bits> vals;
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::Const) {
      vals.push_back(from_set(g.constant));
    } else {
      vals.push_back(eval_gate(g.kind, vals.at(g.a), g.kind == GateKind::Test ? Bits{} : vals.at(g.b)));
    }
  }
  std::map<std::size_t, NatSet> out;
  for (auto o : c.outputs) out[o] = to_set(vals.at(o));
  return out;
}

}  // namespace ref

// ---------------------------------------------------------------------------
// Generators.

inline EvSeq random_binary(std::mt19937_64& rng, std::size_t max_prefix, bool allow_tail_one = true) {
  std::uniform_int_distribution<std::size_t> len(0, max_prefix);
  std::vector<Symbol> p(len(rng));
  for (auto& v : p) v = rng() & 1;
  const Symbol tail = allow_tail_one ? (rng() % 4 == 0 ? 1 : 0) : 0;
  return EvSeq(std::move(p), tail);
}

inline EvSeq random_naturals(std::mt19937_64& rng, std::size_t max_prefix, Symbol max_symbol) {
  std::uniform_int_distribution<std::size_t> len(0, max_prefix);
  std::uniform_int_distribution<Symbol> sym(0, max_symbol);
  std::vector<Symbol> p(len(rng));
  for (auto& v : p) v = sym(rng);
  return EvSeq(std::move(p), sym(rng));
}

/// A valid machine with `size` non-start vertices and uniformly drawn labels.
inline MachineGraph random_machine(std::mt19937_64& rng, std::size_t size, bool with_queries = true,
                                   bool with_layers = false) {
  MachineBuilder b("gen" + std::to_string(rng() % 100000));
  auto name = [](std::size_t i) { return "v" + std::to_string(i); };
  auto pick = [&] { return name(rng() % size); };
  b.start("s0").begin("s0", name(0));
  for (std::size_t i = 0; i < size; ++i) {
    const unsigned tape = static_cast<unsigned>(rng() % 3);
    switch (rng() % (with_queries ? 8 : 7)) {
      case 0: b.branch(name(i), tape, pick(), pick()); break;
      case 1: b.left(name(i), tape, pick()); break;
      case 2: b.right(name(i), tape, pick()); break;
      case 3: b.write(name(i), tape + 1, static_cast<unsigned>(rng() & 1), pick()); break;
      case 4: b.accept(name(i)); break;
      case 5: b.reject(name(i)); break;
      case 6: b.write(name(i), 3, static_cast<unsigned>(rng() & 1), pick()); break;
      default: b.query(name(i), pick(), pick()); break;
    }
    if (with_layers) b.layer(name(i), static_cast<unsigned>(rng() % 4));
  }
  return b.build();
}

// ---------------------------------------------------------------------------

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace t2m::testing
