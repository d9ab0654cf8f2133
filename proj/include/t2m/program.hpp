#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "t2m/machine.hpp"

namespace t2m {

struct Oracle;

/// One answered oracle call. `nested` holds the calls made by the query
/// computation itself, each at a strictly smaller depth.
struct CallRecord {
  unsigned depth_at_call = 0;
  EvSeq query;
  EvSeq answer;
  std::uint64_t query_steps = 0;
  bool approximate_query = false;
  std::vector<CallRecord> nested;
};

enum class QueryMode {
  /// A query computation must Accept; otherwise the call does not exist.
  Exact,
  /// A query computation that has not accepted after `query_fuel` steps is
  /// taken as its written prefix followed by zeros. Results are flagged
  /// approximate.
  FueledLimit,
};

/// Picks an answer index for call number `call_index` out of
/// `option_count` answers listed in canonical order.
using AnswerChooser = std::function<std::size_t(std::size_t call_index, std::size_t option_count)>;

struct RunOptions {
  std::optional<std::size_t> call_limit;
  QueryMode query_mode = QueryMode::Exact;
  std::uint64_t query_fuel = 20000;
  AnswerChooser chooser;
  /// When set, a query met at depth 0 is not rejected: its query computation
  /// runs (query-free) and this machine is applied to the result in place of
  /// an oracle. Used to check depth reduction for computable oracles.
  std::shared_ptr<const MachineGraph> inline_oracle;
  TraceSink trace;
};

/// State shared by every execution of one run: the oracle, the step budget,
/// and per-run accounting.
struct RunContext {
  RunContext(const Oracle* o, std::uint64_t fuel, RunOptions opts)
      : oracle(o), fuel(fuel), options(std::move(opts)) {}

  const Oracle* oracle;
  FuelMeter fuel;
  RunOptions options;
  std::size_t calls_made = 0;
  std::vector<std::size_t> option_counts;
  bool approximate = false;
};

/// A resumable computation producing an output tape.
class Execution {
 public:
  virtual ~Execution() = default;

  /// Performs one unit of work; only valid while running().
  virtual void advance() = 0;
  virtual const EvSeq& output() const = 0;
  /// Number of determined output cells (n₃ for graph executions).
  virtual std::size_t written() const = 0;
  virtual std::uint64_t steps() const = 0;
  /// Moves out the records of calls made at this execution's top level.
  virtual std::vector<CallRecord> take_calls() = 0;
  virtual std::optional<Configuration> configuration() const { return std::nullopt; }

  Status status() const noexcept { return status_; }
  bool running() const noexcept { return status_ == Status::Running; }
  const std::string& detail() const noexcept { return detail_; }

  void run_to_end() {
    while (running()) advance();
  }

 protected:
  void finish(Status s, std::string detail = {}) {
    status_ = s;
    detail_ = std::move(detail);
  }

 private:
  Status status_ = Status::Running;
  std::string detail_;
};

class ProgramNode {
 public:
  virtual ~ProgramNode() = default;
  virtual std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                           bool top_level) const = 0;
  virtual std::string describe() const = 0;
};

/// Anything that runs like an oracle machine: a plain graph, or one of the
/// interpreter-backed constructions (composition, single-call join, ...).
class Program {
 public:
  Program(MachineGraph g);  // NOLINT(google-explicit-constructor)
  explicit Program(std::shared_ptr<const ProgramNode> node) : node_(std::move(node)) {}

  /// The underlying graph, when this program is one.
  const MachineGraph* graph() const noexcept;
  std::string describe() const { return node_->describe(); }

  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                   bool top_level = false) const {
    return node_->start(std::move(input), depth, ctx, top_level);
  }

 private:
  std::shared_ptr<const ProgramNode> node_;
};

/// Stepping of a graph from a given configuration, with the oracle
/// transition at query vertices.
class GraphExecution final : public Execution {
 public:
  GraphExecution(std::shared_ptr<const MachineGraph> graph, std::shared_ptr<InputTape> input, unsigned depth,
                 RunContext& ctx, Configuration start, bool inline_allowed = true, TraceSink trace = {});

  void advance() override;
  const EvSeq& output() const override { return config_.tapes[3]; }
  std::size_t written() const override { return config_.heads[3]; }
  std::uint64_t steps() const override { return steps_; }
  std::vector<CallRecord> take_calls() override { return std::move(calls_); }
  std::optional<Configuration> configuration() const override { return config_; }

  const MachineGraph& graph() const noexcept { return *graph_; }
  const Configuration& config() const noexcept { return config_; }
  unsigned depth() const noexcept { return depth_; }

  /// Replaces query handling for this execution; used by constructions that
  /// intercept the query of a machine (single-call splitting).
  using QueryHook = std::function<std::optional<EvSeq>(GraphExecution& self, VertexId query_vertex)>;
  void set_query_hook(QueryHook hook) { hook_ = std::move(hook); }
  void fail(Status s, std::string detail = {}) { finish(s, std::move(detail)); }

 private:
  void handle_query(VertexId q);
  void inline_query(VertexId q);

  std::shared_ptr<const MachineGraph> graph_;
  std::shared_ptr<InputTape> input_;
  unsigned depth_;
  RunContext& ctx_;
  Configuration config_;
  bool inline_allowed_;
  TraceSink trace_;
  QueryHook hook_;
  std::uint64_t steps_ = 0;
  std::vector<CallRecord> calls_;
};

struct CallOutcome {
  Status status = Status::Running;  // Running: the call succeeded
  EvSeq answer;
  CallRecord record;
  std::string detail;
};

/// The oracle transition minus the configuration update: runs the query
/// computation to completion, obtains the query, and selects an answer.
CallOutcome perform_call(RunContext& ctx, unsigned depth_at_call, Execution& query);

/// Tape 0 backed by another execution's output; cells are produced on demand.
class LazyOutputTape final : public InputTape {
 public:
  explicit LazyOutputTape(std::shared_ptr<Execution> producer) : producer_(std::move(producer)) {}
  Symbol at(std::size_t pos) override;
  std::optional<EvSeq> materialize() override;
  Execution& producer() { return *producer_; }

 private:
  std::shared_ptr<Execution> producer_;
};

/// at(p) = parts[p mod n].at(p div n)
class InterleaveTape final : public InputTape {
 public:
  explicit InterleaveTape(std::vector<std::shared_ptr<InputTape>> parts) : parts_(std::move(parts)) {}
  Symbol at(std::size_t pos) override { return parts_[pos % parts_.size()]->at(pos / parts_.size()); }
  std::optional<EvSeq> materialize() override;
  const std::vector<std::shared_ptr<InputTape>>& parts() const noexcept { return parts_; }

 private:
  std::vector<std::shared_ptr<InputTape>> parts_;
};

/// at(p) = source.at(stride * p + offset)
class SliceTape final : public InputTape {
 public:
  SliceTape(std::shared_ptr<InputTape> source, std::size_t stride, std::size_t offset)
      : source_(std::move(source)), stride_(stride), offset_(offset) {}
  Symbol at(std::size_t pos) override { return source_->at(stride_ * pos + offset_); }
  std::optional<EvSeq> materialize() override;

 private:
  std::shared_ptr<InputTape> source_;
  std::size_t stride_;
  std::size_t offset_;
};

/// Collects an execution's final state into a RunResult.
RunResult to_run_result(const Execution& e);

}  // namespace t2m
