#include "t2m/machine.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace t2m {

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::NoStart: return "NoStart";
    case ValidationKind::MultipleStart: return "MultipleStart";
    case ValidationKind::StartHasIncoming: return "StartHasIncoming";
    case ValidationKind::BadOutDegree: return "BadOutDegree";
    case ValidationKind::DanglingSuccessor: return "DanglingSuccessor";
    case ValidationKind::DuplicateVertex: return "DuplicateVertex";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "Running";
    case Status::Accepted: return "Accepted";
    case Status::Rejected: return "Rejected";
    case Status::Stuck: return "Stuck";
    case Status::FuelExhausted: return "FuelExhausted";
    case Status::QueryEncountered: return "QueryEncountered";
    case Status::QueryDiverged: return "QueryDiverged";
    case Status::OracleDiverged: return "OracleDiverged";
    case Status::OracleDomainError: return "OracleDomainError";
    case Status::CallLimitExceeded: return "CallLimitExceeded";
  }
  return "?";
}

bool produced_nothing(Status s) { return s != Status::Accepted && s != Status::FuelExhausted && s != Status::Running; }

// ---------------------------------------------------------------------------
// Labels

namespace {

void check_tape(unsigned tape, unsigned lo, unsigned hi, const char* what) {
  if (tape < lo || tape > hi) {
    throw std::invalid_argument(std::string(what) + " label on tape " + std::to_string(tape) + " is not in the inventory");
  }
}

}  // namespace

Label Label::branch(unsigned tape) {
  check_tape(tape, 0, 2, "branch");
  return Label(LabelKind::Branch, tape, 0);
}

Label Label::move_left(unsigned tape) {
  check_tape(tape, 0, 2, "move-left");
  return Label(LabelKind::MoveLeft, tape, 0);
}

Label Label::move_right(unsigned tape) {
  check_tape(tape, 0, 2, "move-right");
  return Label(LabelKind::MoveRight, tape, 0);
}

Label Label::write(unsigned tape, unsigned bit) {
  check_tape(tape, 1, 3, "write");
  if (bit > 1) throw std::invalid_argument("write label needs a bit, got " + std::to_string(bit));
  return Label(LabelKind::Write, tape, bit);
}

std::size_t Label::out_degree() const noexcept {
  switch (kind_) {
    case LabelKind::Branch:
    case LabelKind::Query: return 2;
    case LabelKind::Accept:
    case LabelKind::Reject: return 0;
    default: return 1;
  }
}

std::string Label::to_string() const {
  const auto t = std::to_string(tape_);
  switch (kind_) {
    case LabelKind::Start: return "s";
    case LabelKind::Branch: return "t" + t;
    case LabelKind::MoveLeft: return "l" + t;
    case LabelKind::MoveRight: return "r" + t;
    case LabelKind::Write: return "w" + t + "=" + std::to_string(bit_);
    case LabelKind::Accept: return "accept";
    case LabelKind::Reject: return "reject";
    case LabelKind::Query: return "?";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Graph

VertexId MachineGraph::add_vertex(std::string name, Label label) {
  if (index_.count(name)) {
    throw ValidationError(ValidationKind::DuplicateVertex, name, "vertex defined twice");
  }
  const auto id = static_cast<VertexId>(vertices_.size());
  index_.emplace(name, id);
  vertices_.push_back(Vertex{std::move(name), label, {}});
  return id;
}

void MachineGraph::set_successors(VertexId v, std::vector<VertexId> successors) {
  vertices_.at(v).successors = std::move(successors);
}

std::optional<VertexId> MachineGraph::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<unsigned> MachineGraph::layer_tag(VertexId v) const {
  return v < layer_tags_.size() ? layer_tags_[v] : std::nullopt;
}

void MachineGraph::set_layer_tag(VertexId v, unsigned layer) {
  if (layer_tags_.size() < vertices_.size()) layer_tags_.resize(vertices_.size());
  layer_tags_.at(v) = layer;
}

bool MachineGraph::has_queries() const noexcept {
  return std::any_of(vertices_.begin(), vertices_.end(),
                     [](const Vertex& v) { return v.label.kind() == LabelKind::Query; });
}

bool MachineGraph::uses_tape(unsigned tape) const noexcept {
  return std::any_of(vertices_.begin(), vertices_.end(), [tape](const Vertex& v) {
    switch (v.label.kind()) {
      case LabelKind::Branch:
      case LabelKind::MoveLeft:
      case LabelKind::MoveRight:
      case LabelKind::Write: return v.label.tape() == tape;
      default: return false;
    }
  });
}

bool operator==(const MachineGraph& a, const MachineGraph& b) {
  if (a.size() != b.size() || a.name_ != b.name_) return false;
  auto name_of = [](const MachineGraph& g, std::optional<VertexId> v) -> std::string {
    return v ? g.vertex(*v).name : std::string();
  };
  if (name_of(a, a.start_) != name_of(b, b.start_)) return false;
  for (const auto& va : a.vertices_) {
    const auto idb = b.find(va.name);
    if (!idb) return false;
    const auto& vb = b.vertex(*idb);
    if (!(va.label == vb.label) || va.successors.size() != vb.successors.size()) return false;
    for (std::size_t k = 0; k < va.successors.size(); ++k) {
      if (a.vertex(va.successors[k]).name != b.vertex(vb.successors[k]).name) return false;
    }
    if (a.layer_tag(*a.find(va.name)) != b.layer_tag(*idb)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Builder

MachineBuilder& MachineBuilder::start(std::string vertex_name) {
  start_ = std::move(vertex_name);
  return *this;
}

MachineBuilder& MachineBuilder::add(std::string name, Label label, std::vector<std::string> successors) {
  pending_.push_back(Pending{std::move(name), label, std::move(successors)});
  return *this;
}

MachineBuilder& MachineBuilder::layer(std::string name, unsigned tag) {
  layers_.emplace_back(std::move(name), tag);
  return *this;
}

bool MachineBuilder::defines(const std::string& name) const {
  return std::any_of(pending_.begin(), pending_.end(), [&](const Pending& p) { return p.name == name; });
}

MachineGraph MachineBuilder::build() const {
  MachineGraph g(name_);
  for (const auto& p : pending_) g.add_vertex(p.name, p.label);
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    std::vector<VertexId> succ;
    for (const auto& s : pending_[i].successors) {
      auto id = g.find(s);
      if (!id) {
        throw ValidationError(ValidationKind::DanglingSuccessor, pending_[i].name,
                              "successor '" + s + "' is not defined");
      }
      succ.push_back(*id);
    }
    g.set_successors(static_cast<VertexId>(i), std::move(succ));
  }
  if (auto id = g.find(start_)) {
    g.set_start(*id);
  }
  for (const auto& [name, tag] : layers_) {
    if (auto id = g.find(name)) g.set_layer_tag(*id, tag);
  }
  return g;
}

void validate_graph(const MachineGraph& m) {
  const auto start = m.start();
  const std::string machine = m.name().empty() ? "<machine>" : m.name();
  if (!start) throw ValidationError(ValidationKind::NoStart, machine, "no start vertex is defined");
  if (m.vertex(*start).label.kind() != LabelKind::Start) {
    throw ValidationError(ValidationKind::NoStart, m.vertex(*start).name, "start vertex is not labelled s");
  }
  for (VertexId v = 0; v < m.size(); ++v) {
    const auto& vx = m.vertex(v);
    if (vx.label.kind() == LabelKind::Start && v != *start) {
      throw ValidationError(ValidationKind::MultipleStart, vx.name, "a second vertex is labelled s");
    }
    if (vx.successors.size() != vx.label.out_degree()) {
      throw ValidationError(ValidationKind::BadOutDegree, vx.name,
                            "label " + vx.label.to_string() + " needs " + std::to_string(vx.label.out_degree()) +
                                " successor(s), has " + std::to_string(vx.successors.size()));
    }
    for (VertexId s : vx.successors) {
      if (s >= m.size()) throw ValidationError(ValidationKind::DanglingSuccessor, vx.name, "successor out of range");
      if (s == *start) {
        throw ValidationError(ValidationKind::StartHasIncoming, m.vertex(*start).name,
                              "edge from '" + vx.name + "' enters the start vertex");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Stepping

Configuration initial_configuration(const MachineGraph& m, EvSeq input) {
  Configuration c;
  c.vertex = m.start().value_or(0);
  c.tapes[0] = std::move(input);
  return c;
}

StepKind step_in_place(const MachineGraph& m, Configuration& c, InputTape& input, WriteEvent* written) {
  const auto& v = m.vertex(c.vertex);
  const unsigned i = v.label.tape();
  switch (v.label.kind()) {
    case LabelKind::Start:
      c.vertex = v.successors[0];
      return StepKind::Moved;
    case LabelKind::Branch: {
      const Symbol s = i == 0 ? input.at(c.heads[0]) : c.tapes[i].at(c.heads[i]);
      if (s > 1) return StepKind::Stuck;
      c.vertex = v.successors[s];
      return StepKind::Moved;
    }
    case LabelKind::MoveLeft:
      if (c.heads[i] == 0) return StepKind::Stuck;
      --c.heads[i];
      c.vertex = v.successors[0];
      return StepKind::Moved;
    case LabelKind::MoveRight:
      ++c.heads[i];
      c.vertex = v.successors[0];
      return StepKind::Moved;
    case LabelKind::Write:
      if (written) *written = WriteEvent{i, c.heads[i], v.label.bit()};
      c.tapes[i].set(c.heads[i], v.label.bit());
      ++c.heads[i];
      c.vertex = v.successors[0];
      return StepKind::Moved;
    case LabelKind::Accept: return StepKind::Accept;
    case LabelKind::Reject: return StepKind::Reject;
    case LabelKind::Query: return StepKind::Query;
  }
  return StepKind::Stuck;
}

namespace {

// Reads tape 0 of a configuration without copying it.
class ConfigTape final : public InputTape {
 public:
  explicit ConfigTape(const EvSeq& s) : seq_(s) {}
  Symbol at(std::size_t pos) override { return seq_.at(pos); }

 private:
  const EvSeq& seq_;
};

}  // namespace

StepResult step(const MachineGraph& m, const Configuration& c) {
  Configuration next = c;
  ConfigTape tape(c.tapes[0]);
  switch (step_in_place(m, next, tape)) {
    case StepKind::Moved: return next;
    case StepKind::Accept: return Halted{true};
    case StepKind::Reject: return Halted{false};
    case StepKind::Stuck: return Stuck{};
    case StepKind::Query: return QueryAt{c.vertex};
  }
  return Stuck{};
}

void apply_oracle_answer(const MachineGraph& m, Configuration& c, EvSeq y) {
  const auto& v = m.vertex(c.vertex);
  c.tapes[2] = std::move(y);
  c.heads[2] = 0;
  c.vertex = v.successors[0];
}

Configuration spawn_query_configuration(const MachineGraph& m, const Configuration& c) {
  Configuration q = c;
  q.vertex = m.vertex(c.vertex).successors[1];
  q.tapes[3] = EvSeq();
  q.heads[3] = 0;
  return q;
}

std::vector<Symbol> output_prefix(const RunResult& r, std::size_t k) {
  if (r.status != Status::Accepted && k > r.written) {
    throw PrefixUnavailable("requested " + std::to_string(k) + " output symbols, only " + std::to_string(r.written) +
                            " are determined (status " + to_string(r.status) + ")");
  }
  return r.output.take(k);
}

std::vector<Symbol> observed_prefix(const RunResult& r, std::size_t limit) {
  if (r.status == Status::Accepted) return r.output.take(limit);
  if (produced_nothing(r.status)) return {};
  return r.output.take(std::min(limit, r.written));
}

RunResult run(const MachineGraph& m, const EvSeq& input, std::uint64_t fuel, const QueryHandler& handler,
              const TraceSink& trace) {
  validate_graph(m);
  if (!input.is_binary()) throw NonBinaryInput("machine input must be binary, got " + input.to_string());
  RunResult r;
  Configuration c = initial_configuration(m, input);
  ConfigTape tape(c.tapes[0]);
  while (true) {
    const auto& v = m.vertex(c.vertex);
    const auto kind = v.label.kind();
    if (kind == LabelKind::Accept) {
      r.status = Status::Accepted;
      break;
    }
    if (kind == LabelKind::Reject) {
      r.status = Status::Rejected;
      break;
    }
    if (kind == LabelKind::Query && !handler) {
      r.status = Status::QueryEncountered;
      r.query_vertex = v.name;
      break;
    }
    if (fuel == 0) {
      r.status = Status::FuelExhausted;
      break;
    }
    WriteEvent w{};
    std::optional<WriteEvent> wrote;
    const VertexId here = c.vertex;
    if (kind == LabelKind::Query) {
      auto outcome = handler(c, here);
      if (auto* failed = std::get_if<Status>(&outcome)) {
        r.status = *failed;
        r.query_vertex = v.name;
        break;
      }
      apply_oracle_answer(m, c, std::get<EvSeq>(std::move(outcome)));
    } else {
      const auto result = step_in_place(m, c, tape, &w);
      if (result == StepKind::Stuck) {
        r.status = Status::Stuck;
        break;
      }
      if (kind == LabelKind::Write) wrote = w;
    }
    --fuel;
    ++r.steps_used;
    if (trace) trace(TraceEvent{r.steps_used, m.vertex(here).name, v.label.to_string(), c.heads, wrote});
  }
  r.output = c.tapes[3];
  r.written = c.heads[3];
  r.final = std::move(c);
  return r;
}

}  // namespace t2m
