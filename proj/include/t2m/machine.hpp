#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "t2m/errors.hpp"
#include "t2m/seq.hpp"

namespace t2m {

enum class LabelKind : std::uint8_t { Start, Branch, MoveLeft, MoveRight, Write, Accept, Reject, Query };

/// Vertex label. Tape indices are restricted to the machine's inventory:
/// branches and moves on tapes 0..2, writes on tapes 1..3.
class Label {
 public:
  static Label start() { return Label(LabelKind::Start, 0, 0); }
  static Label branch(unsigned tape);
  static Label move_left(unsigned tape);
  static Label move_right(unsigned tape);
  static Label write(unsigned tape, unsigned bit);
  static Label accept() { return Label(LabelKind::Accept, 0, 0); }
  static Label reject() { return Label(LabelKind::Reject, 0, 0); }
  static Label query() { return Label(LabelKind::Query, 0, 0); }

  LabelKind kind() const noexcept { return kind_; }
  unsigned tape() const noexcept { return tape_; }
  unsigned bit() const noexcept { return bit_; }
  /// 0, 1 or 2 successors.
  std::size_t out_degree() const noexcept;
  /// Textual form: s, t0, l1, r2, w3=1, accept, reject, ?
  std::string to_string() const;

  friend bool operator==(const Label&, const Label&) = default;

 private:
  Label(LabelKind kind, unsigned tape, unsigned bit)
      : kind_(kind), tape_(static_cast<std::uint8_t>(tape)), bit_(static_cast<std::uint8_t>(bit)) {}

  LabelKind kind_;
  std::uint8_t tape_;
  std::uint8_t bit_;
};

using VertexId = std::uint32_t;

struct Vertex {
  std::string name;
  Label label;
  /// Branch: [on 0, on 1]. Query: [cont, query].
  std::vector<VertexId> successors;
};

/// A labelled directed graph with a designated start vertex. Construction
/// does not enforce the structural conditions; see validate_graph.
class MachineGraph {
 public:
  MachineGraph() = default;
  explicit MachineGraph(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  VertexId add_vertex(std::string name, Label label);
  void set_successors(VertexId v, std::vector<VertexId> successors);
  void set_start(VertexId v) { start_ = v; }

  std::size_t size() const noexcept { return vertices_.size(); }
  const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  std::optional<VertexId> find(std::string_view name) const;
  std::optional<VertexId> start() const noexcept { return start_; }

  std::optional<unsigned> layer_tag(VertexId v) const;
  void set_layer_tag(VertexId v, unsigned layer);
  bool has_layer_tags() const noexcept { return !layer_tags_.empty(); }

  bool has_queries() const noexcept;
  /// True when some vertex reads, moves on, or writes the given tape.
  bool uses_tape(unsigned tape) const noexcept;

  /// Same names, labels, successor lists, start and layer tags.
  friend bool operator==(const MachineGraph& a, const MachineGraph& b);

 private:
  std::string name_;
  std::vector<Vertex> vertices_;
  std::unordered_map<std::string, VertexId> index_;
  std::optional<VertexId> start_;
  std::vector<std::optional<unsigned>> layer_tags_;
};

/// Name-based construction with forward references; build() resolves names.
class MachineBuilder {
 public:
  explicit MachineBuilder(std::string name) : name_(std::move(name)) {}

  MachineBuilder& start(std::string vertex_name);
  MachineBuilder& add(std::string name, Label label, std::vector<std::string> successors = {});

  MachineBuilder& begin(std::string name, std::string next) { return add(std::move(name), Label::start(), {std::move(next)}); }
  MachineBuilder& branch(std::string name, unsigned tape, std::string on0, std::string on1) {
    return add(std::move(name), Label::branch(tape), {std::move(on0), std::move(on1)});
  }
  MachineBuilder& left(std::string name, unsigned tape, std::string next) {
    return add(std::move(name), Label::move_left(tape), {std::move(next)});
  }
  MachineBuilder& right(std::string name, unsigned tape, std::string next) {
    return add(std::move(name), Label::move_right(tape), {std::move(next)});
  }
  MachineBuilder& write(std::string name, unsigned tape, unsigned bit, std::string next) {
    return add(std::move(name), Label::write(tape, bit), {std::move(next)});
  }
  MachineBuilder& accept(std::string name) { return add(std::move(name), Label::accept()); }
  MachineBuilder& reject(std::string name) { return add(std::move(name), Label::reject()); }
  MachineBuilder& query(std::string name, std::string cont, std::string query_entry) {
    return add(std::move(name), Label::query(), {std::move(cont), std::move(query_entry)});
  }
  MachineBuilder& layer(std::string name, unsigned tag);

  bool defines(const std::string& name) const;

  /// Resolves names. Throws ValidationError for duplicate or undefined
  /// vertices; structural conditions are left to validate_graph.
  MachineGraph build() const;

 private:
  struct Pending {
    std::string name;
    Label label;
    std::vector<std::string> successors;
  };
  std::string name_;
  std::string start_;
  std::vector<Pending> pending_;
  std::vector<std::pair<std::string, unsigned>> layers_;
};

/// Throws ValidationError unless: exactly one Start vertex, it is the
/// designated start and has no incoming edges, and every vertex has the
/// out-degree its label demands with successors inside the graph.
void validate_graph(const MachineGraph& m);

/// Tape indices: 0 input, 1 and 2 work, 3 output.
struct Configuration {
  VertexId vertex = 0;
  std::array<EvSeq, 4> tapes;
  std::array<std::size_t, 4> heads{};

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// (start, x, 0, 0^ℕ, 0, 0^ℕ, 0, 0^ℕ, 0)
Configuration initial_configuration(const MachineGraph& m, EvSeq input);

/// Raised by lazily produced input tapes when a cell can never be produced.
struct InputUnavailable {
  int status;  // a Status value
  std::string detail;
};

/// Read access to tape 0. Lazily produced tapes may throw InputUnavailable.
class InputTape {
 public:
  virtual ~InputTape() = default;
  virtual Symbol at(std::size_t pos) = 0;
  /// The whole sequence, when it is already determined.
  virtual std::optional<EvSeq> materialize() { return std::nullopt; }
};

class SeqTape final : public InputTape {
 public:
  explicit SeqTape(EvSeq s) : seq_(std::move(s)) {}
  Symbol at(std::size_t pos) override { return seq_.at(pos); }
  std::optional<EvSeq> materialize() override { return seq_; }

 private:
  EvSeq seq_;
};

struct WriteEvent {
  unsigned tape;
  std::size_t pos;
  Symbol bit;
};

enum class StepKind { Moved, Accept, Reject, Stuck, Query };

/// Applies one transition in place. Tape 0 is read through `input`. Accept,
/// Reject, Stuck and Query leave the configuration untouched.
StepKind step_in_place(const MachineGraph& m, Configuration& c, InputTape& input, WriteEvent* written = nullptr);

struct Halted {
  bool accepted;
  friend bool operator==(const Halted&, const Halted&) = default;
};
struct Stuck {
  friend bool operator==(const Stuck&, const Stuck&) = default;
};
struct QueryAt {
  VertexId vertex;
  friend bool operator==(const QueryAt&, const QueryAt&) = default;
};
using StepResult = std::variant<Configuration, Halted, Stuck, QueryAt>;

/// The single-step relation on configurations; tape 0 is c.tapes[0].
StepResult step(const MachineGraph& m, const Configuration& c);

/// The resumption half of an oracle transition: answer `y` on tape 2 with
/// head 0, control at the cont successor of the query vertex.
void apply_oracle_answer(const MachineGraph& m, Configuration& c, EvSeq y);

/// The configuration a query vertex spawns: control at the query successor,
/// tapes 0..2 and heads 0..2 copied, output tape erased.
Configuration spawn_query_configuration(const MachineGraph& m, const Configuration& c);

enum class Status {
  Running,
  Accepted,
  Rejected,
  Stuck,
  FuelExhausted,
  QueryEncountered,
  QueryDiverged,
  OracleDiverged,
  OracleDomainError,
  CallLimitExceeded,
};

const char* to_string(Status s);
/// Accepted and FuelExhausted may carry usable output; every other terminal
/// status means the run produced none.
bool produced_nothing(Status s);

struct RunResult {
  Status status = Status::Running;
  /// Accepted: the full tape-3 content. Otherwise: tape 3 as written so far,
  /// of which only the first `written` cells are meaningful.
  EvSeq output;
  std::size_t written = 0;
  std::uint64_t steps_used = 0;
  std::optional<Configuration> final;
  std::optional<std::string> query_vertex;
  std::string detail;
};

/// First k output symbols; for non-accepted results k must not exceed the
/// written prefix.
std::vector<Symbol> output_prefix(const RunResult& r, std::size_t k);
/// The longest determined prefix, capped at `limit` for accepted runs.
std::vector<Symbol> observed_prefix(const RunResult& r, std::size_t limit);

/// Shared step budget.
class FuelMeter {
 public:
  explicit FuelMeter(std::uint64_t fuel) : remaining_(fuel) {}
  bool try_consume() noexcept {
    if (remaining_ == 0) return false;
    --remaining_;
    return true;
  }
  std::uint64_t remaining() const noexcept { return remaining_; }
  void set_remaining(std::uint64_t r) noexcept { remaining_ = r; }

 private:
  std::uint64_t remaining_;
};

struct TraceEvent {
  std::uint64_t step;
  std::string vertex;
  std::string label;
  std::array<std::size_t, 4> heads;
  std::optional<WriteEvent> written;
};
using TraceSink = std::function<void(const TraceEvent&)>;

/// Answers a query met at `query_vertex`: either the oracle answer, or a
/// terminal status that ends the run.
using QueryHandler = std::function<std::variant<EvSeq, Status>(const Configuration&, VertexId query_vertex)>;

/// Runs from the initial configuration on `input`. Without a handler a Query
/// vertex ends the run with QueryEncountered.
RunResult run(const MachineGraph& m, const EvSeq& input, std::uint64_t fuel, const QueryHandler& handler = {},
              const TraceSink& trace = {});

}  // namespace t2m
