#include "t2m/circuits.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace t2m {

namespace {

[[noreturn]] void circuit_error(const std::string& msg) { throw Error("CircuitError", msg); }

bool binary_gate(GateKind k) {
  return k == GateKind::Union || k == GateKind::Intersect || k == GateKind::Plus || k == GateKind::TimesC;
}

const char* keyword(GateKind k) {
  switch (k) {
    case GateKind::Const: return "const";
    case GateKind::Union: return "union";
    case GateKind::Intersect: return "intersect";
    case GateKind::Plus: return "plus";
    case GateKind::TimesC: return "times";
    case GateKind::Test: return "test";
  }
  return "?";
}

}  // namespace

void validate_circuit(const Circuit& c) {
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    const bool unary = g.kind == GateKind::Test;
    if ((unary || binary_gate(g.kind)) && g.a >= i) circuit_error("gate " + std::to_string(i) + " reads a later gate");
    if (binary_gate(g.kind) && g.b >= i) circuit_error("gate " + std::to_string(i) + " reads a later gate");
  }
  for (auto o : c.outputs) {
    if (o >= c.gates.size()) circuit_error("output refers to missing gate " + std::to_string(o));
  }
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class CircuitParser {
 public:
  explicit CircuitParser(std::string_view text) : text_(text) {}

  Circuit parse() {
    Circuit c;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      auto end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      ++line_no;
      line(c, text_.substr(start, end - start), line_no);
      start = end + 1;
    }
    validate_circuit(c);
    return c;
  }

 private:
  struct Cursor {
    std::string_view s;
    std::size_t pos = 0;
    std::size_t line = 0;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool done() {
      skip_ws();
      return pos >= s.size();
    }
    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError({line, pos + 1}, what); }
    std::string word() {
      skip_ws();
      const auto b = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      if (b == pos) fail("expected a name");
      return std::string(s.substr(b, pos - b));
    }
    void expect(char c) {
      skip_ws();
      if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
      ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    std::uint64_t number() {
      skip_ws();
      const auto b = pos;
      std::uint64_t n = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) n = n * 10 + (s[pos++] - '0');
      if (b == pos) fail("expected a number");
      return n;
    }
  };

  std::size_t operand(Cursor& cur) {
    const auto name = cur.word();
    auto it = index_.find(name);
    if (it == index_.end()) cur.fail("unknown gate '" + name + "'");
    return it->second;
  }

  void line(Circuit& c, std::string_view raw, std::size_t line_no) {
    const auto hash = raw.find('#');
    Cursor cur{raw.substr(0, hash), 0, line_no};
    if (cur.done()) return;
    const auto name = cur.word();
    if (name == "output") {
      c.outputs.push_back(operand(cur));
      if (!cur.done()) cur.fail("trailing text");
      return;
    }
    if (index_.count(name)) cur.fail("gate '" + name + "' defined twice");
    cur.expect('=');
    Gate g;
    g.name = name;
    const auto op = cur.word();
    if (op == "const") {
      g.kind = GateKind::Const;
      cur.expect('{');
      if (!cur.eat('}')) {
        do g.constant.insert(cur.number());
        while (cur.eat(','));
        cur.expect('}');
      }
    } else if (op == "test") {
      g.kind = GateKind::Test;
      g.a = operand(cur);
    } else {
      if (op == "union") g.kind = GateKind::Union;
      else if (op == "intersect") g.kind = GateKind::Intersect;
      else if (op == "plus") g.kind = GateKind::Plus;
      else if (op == "times") g.kind = GateKind::TimesC;
      else cur.fail("unknown gate kind '" + op + "'");
      g.a = operand(cur);
      g.b = operand(cur);
    }
    if (!cur.done()) cur.fail("trailing text");
    index_[name] = c.gates.size();
    c.gates.push_back(std::move(g));
  }

  std::string_view text_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string gate_name(const Circuit& c, std::size_t i) {
  return c.gates[i].name.empty() ? "g" + std::to_string(i) : c.gates[i].name;
}

}  // namespace

Circuit parse_circuit(std::string_view text) { return CircuitParser(text).parse(); }

std::string print_circuit(const Circuit& c) {
  std::ostringstream out;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    out << gate_name(c, i) << " = " << keyword(g.kind);
    if (g.kind == GateKind::Const) {
      out << " {";
      bool first = true;
      for (auto v : g.constant) {
        out << (first ? "" : ",") << v;
        first = false;
      }
      out << "}";
    } else {
      out << " " << gate_name(c, g.a);
      if (binary_gate(g.kind)) out << " " << gate_name(c, g.b);
    }
    out << "\n";
  }
  for (auto o : c.outputs) out << "output " << gate_name(c, o) << "\n";
  return out.str();
}

Circuit load_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open circuit file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_circuit(buf.str());
}

// ---------------------------------------------------------------------------
// Evaluation

NatSet plus_sets(const NatSet& a, const NatSet& b) {
  NatSet out;
  for (auto x : a) {
    for (auto y : b) out.insert(x + y);
  }
  return out;
}

NatSet times_sets(const NatSet& a, const NatSet& b) {
  NatSet out{0};
  for (auto x : a) {
    for (auto y : b) out.insert(x * y);
  }
  return out;
}

NatSet test_set(const NatSet& a) { return a.empty() ? NatSet{} : NatSet{0}; }

namespace {

NatSet apply_gate(const Gate& g, const std::vector<NatSet>& values) {
  switch (g.kind) {
    case GateKind::Const: return g.constant;
    case GateKind::Union: {
      NatSet out = values[g.a];
      out.insert(values[g.b].begin(), values[g.b].end());
      return out;
    }
    case GateKind::Intersect: {
      NatSet out;
      for (auto x : values[g.a]) {
        if (values[g.b].count(x)) out.insert(x);
      }
      return out;
    }
    case GateKind::Plus: return plus_sets(values[g.a], values[g.b]);
    case GateKind::TimesC: return times_sets(values[g.a], values[g.b]);
    case GateKind::Test: return test_set(values[g.a]);
  }
  return {};
}

}  // namespace

std::map<std::size_t, NatSet> eval_circuit(const Circuit& c, const std::map<std::size_t, NatSet>& inputs) {
  validate_circuit(c);
  std::vector<NatSet> values;
  values.reserve(c.gates.size());
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    auto it = inputs.find(i);
    if (it != inputs.end() && c.gates[i].kind == GateKind::Const) {
      values.push_back(it->second);
    } else {
      values.push_back(apply_gate(c.gates[i], values));
    }
  }
  std::map<std::size_t, NatSet> out;
  for (auto o : c.outputs) out[o] = values[o];
  return out;
}

std::size_t count_test_gates(const Circuit& c) {
  std::size_t n = 0;
  for (const auto& g : c.gates) n += g.kind == GateKind::Test;
  return n;
}

std::vector<Symbol> encode_set(const NatSet& s) {
  std::vector<Symbol> out;
  for (auto v : s) {
    out.insert(out.end(), v + 1, 1);
    out.push_back(0);
  }
  out.push_back(0);
  return out;
}

std::vector<NatSet> decode_sets(const EvSeq& bits, std::size_t count) {
  if (!bits.is_binary() || bits.tail() != 0) throw DecodeError("encoded sets must be binary with tail 0");
  std::vector<NatSet> out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    NatSet s;
    while (true) {
      auto [k, next] = read_unary(bits, pos);
      pos = next;
      if (k == 0) break;
      s.insert(k - 1);
    }
    out.push_back(std::move(s));
  }
  return out;
}

MachineGraph test_query_machine() {
  return MachineBuilder("test_query")
      .start("s0")
      .begin("s0", "c")
      .branch("c", 0, "acc", "one")
      .write("one", 3, 1, "acc")
      .accept("acc")
      .build();
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

class CircuitExecution final : public Execution {
 public:
  CircuitExecution(std::shared_ptr<const Circuit> c, std::shared_ptr<const MachineGraph> query, unsigned depth,
                   RunContext& ctx)
      : circuit_(std::move(c)), query_(std::move(query)), depth_(depth), ctx_(ctx) {}

  void advance() override {
    if (next_ == circuit_->gates.size()) {
      std::vector<Symbol> bits;
      for (auto o : circuit_->outputs) {
        const auto e = encode_set(values_[o]);
        bits.insert(bits.end(), e.begin(), e.end());
      }
      written_ = bits.size();
      output_ = EvSeq(std::move(bits), 0);
      finish(Status::Accepted);
      return;
    }
    if (!ctx_.fuel.try_consume()) {
      finish(Status::FuelExhausted);
      return;
    }
    ++steps_;
    const auto& g = circuit_->gates[next_];
    if (g.kind != GateKind::Test) {
      values_.push_back(apply_gate(g, values_));
      ++next_;
      return;
    }
    if (depth_ == 0) {
      finish(Status::QueryEncountered, g.name);
      return;
    }
    const auto operand = EvSeq(encode_set(values_[g.a]), 0);
    GraphExecution q(query_, std::make_shared<SeqTape>(operand), depth_ - 1, ctx_,
                     initial_configuration(*query_, operand), false);
    auto out = perform_call(ctx_, depth_, q);
    if (out.status != Status::Running) {
      finish(out.status, g.name + ": " + out.detail);
      return;
    }
    calls_.push_back(std::move(out.record));
    values_.push_back(out.answer.is_zero() ? NatSet{} : NatSet{0});
    ++next_;
  }

  const EvSeq& output() const override { return output_; }
  std::size_t written() const override { return written_; }
  std::uint64_t steps() const override { return steps_; }
  std::vector<CallRecord> take_calls() override { return std::move(calls_); }

 private:
  std::shared_ptr<const Circuit> circuit_;
  std::shared_ptr<const MachineGraph> query_;
  unsigned depth_;
  RunContext& ctx_;
  std::vector<NatSet> values_;
  std::size_t next_ = 0;
  EvSeq output_;
  std::size_t written_ = 0;
  std::uint64_t steps_ = 0;
  std::vector<CallRecord> calls_;
};

class CircuitNode final : public ProgramNode {
 public:
  explicit CircuitNode(Circuit c)
      : circuit_(std::make_shared<const Circuit>(std::move(c))),
        query_(std::make_shared<const MachineGraph>(test_query_machine())) {}

  std::unique_ptr<Execution> start(std::shared_ptr<InputTape>, unsigned depth, RunContext& ctx,
                                   bool) const override {
    return std::make_unique<CircuitExecution>(circuit_, query_, depth, ctx);
  }
  std::string describe() const override {
    return "circuit(" + std::to_string(circuit_->gates.size()) + " gates)";
  }

 private:
  std::shared_ptr<const Circuit> circuit_;
  std::shared_ptr<const MachineGraph> query_;
};

}  // namespace

CompiledCircuit compile_to_machine(const Circuit& c) {
  validate_circuit(c);
  CompiledCircuit out{Program(std::make_shared<CircuitNode>(c)), count_test_gates(c), 1};
  out.level_bound = std::uint64_t{1} << out.lpo_calls;
  return out;
}

Circuit random_circuit(std::mt19937_64& rng, std::size_t max_gates, std::uint64_t max_element,
                       std::uint64_t max_value) {
  Circuit c;
  std::vector<std::uint64_t> bound;  // largest possible element per gate
  const std::size_t n = 1 + rng() % max_gates;
  for (std::size_t i = 0; i < n; ++i) {
    Gate g;
    g.name = "g" + std::to_string(i);
    const auto pick = i == 0 ? 0 : rng() % 6;
    g.kind = static_cast<GateKind>(pick);
    if (g.kind == GateKind::Const) {
      const auto size = rng() % 5;
      for (std::size_t k = 0; k < size; ++k) g.constant.insert(rng() % max_element);
    } else {
      g.a = rng() % i;
      g.b = rng() % i;
    }
    std::uint64_t b = 0;
    switch (g.kind) {
      case GateKind::Const: b = g.constant.empty() ? 0 : *g.constant.rbegin(); break;
      case GateKind::Union:
      case GateKind::Intersect: b = std::max(bound[g.a], bound[g.b]); break;
      case GateKind::Plus: b = bound[g.a] + bound[g.b]; break;
      case GateKind::TimesC: b = bound[g.a] * bound[g.b]; break;
      case GateKind::Test: b = 0; break;
    }
    if (b > max_value) {
      g.kind = GateKind::Union;
      b = std::max(bound[g.a], bound[g.b]);
    }
    if (g.kind == GateKind::Test) g.b = 0;
    bound.push_back(b);
    c.gates.push_back(std::move(g));
  }
  c.outputs.push_back(n - 1);
  if (n > 1 && rng() % 2) c.outputs.push_back(rng() % (n - 1));
  return c;
}

}  // namespace t2m
