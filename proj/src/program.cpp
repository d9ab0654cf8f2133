#include "t2m/program.hpp"

#include "t2m/oracle.hpp"

namespace t2m {

namespace {

class GraphNode final : public ProgramNode {
 public:
  explicit GraphNode(MachineGraph g) : graph_(std::make_shared<const MachineGraph>(std::move(g))) {
    validate_graph(*graph_);
  }

  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                   bool top_level) const override {
    Configuration init = initial_configuration(*graph_, input->materialize().value_or(EvSeq()));
    return std::make_unique<GraphExecution>(graph_, std::move(input), depth, ctx, std::move(init), true,
                                            top_level ? ctx.options.trace : TraceSink{});
  }

  std::string describe() const override { return "machine " + graph_->name(); }

  const MachineGraph& graph() const { return *graph_; }

 private:
  std::shared_ptr<const MachineGraph> graph_;
};

}  // namespace

Program::Program(MachineGraph g) : node_(std::make_shared<GraphNode>(std::move(g))) {}

const MachineGraph* Program::graph() const noexcept {
  if (auto* g = dynamic_cast<const GraphNode*>(node_.get())) return &g->graph();
  return nullptr;
}

GraphExecution::GraphExecution(std::shared_ptr<const MachineGraph> graph, std::shared_ptr<InputTape> input,
                               unsigned depth, RunContext& ctx, Configuration start, bool inline_allowed,
                               TraceSink trace)
    : graph_(std::move(graph)),
      input_(std::move(input)),
      depth_(depth),
      ctx_(ctx),
      config_(std::move(start)),
      inline_allowed_(inline_allowed),
      trace_(std::move(trace)) {}

void GraphExecution::advance() {
  const auto& v = graph_->vertex(config_.vertex);
  switch (v.label.kind()) {
    case LabelKind::Accept: finish(Status::Accepted); return;
    case LabelKind::Reject: finish(Status::Rejected); return;
    case LabelKind::Query: handle_query(config_.vertex); return;
    default: break;
  }
  if (!ctx_.fuel.try_consume()) {
    finish(Status::FuelExhausted);
    return;
  }
  const VertexId here = config_.vertex;
  WriteEvent w{};
  StepKind k;
  try {
    k = step_in_place(*graph_, config_, *input_, &w);
  } catch (const InputUnavailable& e) {
    finish(static_cast<Status>(e.status), e.detail);
    return;
  }
  if (k == StepKind::Stuck) {
    ctx_.fuel.set_remaining(ctx_.fuel.remaining() + 1);
    finish(Status::Stuck, v.name);
    return;
  }
  ++steps_;
  if (trace_) {
    std::optional<WriteEvent> wrote;
    if (v.label.kind() == LabelKind::Write) wrote = w;
    trace_(TraceEvent{steps_, graph_->vertex(here).name, v.label.to_string(), config_.heads, wrote});
  }
}

void GraphExecution::handle_query(VertexId q) {
  if (depth_ == 0 && !hook_) {
    if (inline_allowed_ && ctx_.options.inline_oracle) {
      inline_query(q);
    } else {
      finish(Status::QueryEncountered, graph_->vertex(q).name);
    }
    return;
  }
  if (!ctx_.fuel.try_consume()) {
    finish(Status::FuelExhausted);
    return;
  }
  EvSeq answer;
  if (hook_) {
    auto y = hook_(*this, q);
    if (!running()) return;
    if (!y) {
      finish(Status::QueryDiverged, graph_->vertex(q).name);
      return;
    }
    answer = std::move(*y);
  } else {
    GraphExecution sub(graph_, input_, depth_ - 1, ctx_, spawn_query_configuration(*graph_, config_),
                       inline_allowed_);
    auto out = perform_call(ctx_, depth_, sub);
    if (out.status != Status::Running) {
      finish(out.status, graph_->vertex(q).name + ": " + out.detail);
      return;
    }
    calls_.push_back(std::move(out.record));
    answer = std::move(out.answer);
  }
  apply_oracle_answer(*graph_, config_, std::move(answer));
  ++steps_;
  if (trace_) trace_(TraceEvent{steps_, graph_->vertex(q).name, "?", config_.heads, std::nullopt});
}

void GraphExecution::inline_query(VertexId q) {
  if (!ctx_.fuel.try_consume()) {
    finish(Status::FuelExhausted);
    return;
  }
  GraphExecution sub(graph_, input_, 0, ctx_, spawn_query_configuration(*graph_, config_), false);
  sub.run_to_end();
  if (sub.status() != Status::Accepted) {
    finish(Status::QueryDiverged, graph_->vertex(q).name + ": query computation " + to_string(sub.status()));
    return;
  }
  const auto& g = ctx_.options.inline_oracle;
  GraphExecution oracle_run(g, std::make_shared<SeqTape>(sub.output()), 0, ctx_,
                            initial_configuration(*g, sub.output()), false);
  oracle_run.run_to_end();
  if (oracle_run.status() != Status::Accepted) {
    finish(Status::OracleDiverged, graph_->vertex(q).name + ": inlined oracle " + to_string(oracle_run.status()));
    return;
  }
  apply_oracle_answer(*graph_, config_, oracle_run.output());
  ++steps_;
  if (trace_) trace_(TraceEvent{steps_, graph_->vertex(q).name, "?", config_.heads, std::nullopt});
}

CallOutcome perform_call(RunContext& ctx, unsigned depth_at_call, Execution& query) {
  CallOutcome out;
  if (ctx.options.call_limit && ctx.calls_made >= *ctx.options.call_limit) {
    out.status = Status::CallLimitExceeded;
    out.detail = "call limit " + std::to_string(*ctx.options.call_limit) + " reached";
    return out;
  }
  ++ctx.calls_made;
  const bool limited = ctx.options.query_mode == QueryMode::FueledLimit;
  std::uint64_t held_back = 0;
  if (limited && ctx.fuel.remaining() > ctx.options.query_fuel) {
    held_back = ctx.fuel.remaining() - ctx.options.query_fuel;
    ctx.fuel.set_remaining(ctx.options.query_fuel);
  }
  query.run_to_end();
  ctx.fuel.set_remaining(ctx.fuel.remaining() + held_back);

  out.record.depth_at_call = depth_at_call;
  out.record.query_steps = query.steps();
  out.record.nested = query.take_calls();
  EvSeq x;
  if (query.status() == Status::Accepted) {
    x = query.output();
  } else if (limited && query.status() == Status::FuelExhausted && held_back > 0) {
    x = EvSeq(query.output().take(query.written()), 0);
    out.record.approximate_query = true;
    ctx.approximate = true;
  } else if (query.status() == Status::CallLimitExceeded) {
    out.status = Status::CallLimitExceeded;
    out.detail = query.detail();
    return out;
  } else {
    out.status = Status::QueryDiverged;
    out.detail = std::string("query computation ") + to_string(query.status());
    return out;
  }
  if (ctx.oracle == nullptr) {
    out.status = Status::OracleDomainError;
    out.detail = "no oracle installed";
    return out;
  }
  std::vector<EvSeq> options;
  try {
    options = ctx.oracle->answer(x);
  } catch (const OracleDomainError& e) {
    out.status = Status::OracleDomainError;
    out.detail = e.what();
    return out;
  } catch (const OracleDivergence& e) {
    out.status = Status::OracleDiverged;
    out.detail = e.what();
    return out;
  } catch (const IndexOutOfRange& e) {
    out.status = Status::OracleDomainError;
    out.detail = e.what();
    return out;
  } catch (const TailNotZero& e) {
    out.status = Status::OracleDomainError;
    out.detail = e.what();
    return out;
  }
  std::size_t pick = 0;
  if (ctx.options.chooser) pick = ctx.options.chooser(ctx.option_counts.size(), options.size());
  if (pick >= options.size()) pick = options.size() - 1;
  ctx.option_counts.push_back(options.size());
  out.record.query = std::move(x);
  out.record.answer = options[pick];
  out.answer = options[pick];
  return out;
}

Symbol LazyOutputTape::at(std::size_t pos) {
  while (producer_->running() && producer_->written() <= pos) producer_->advance();
  if (producer_->status() == Status::Accepted || producer_->written() > pos) return producer_->output().at(pos);
  throw InputUnavailable{static_cast<int>(producer_->status()), "input stage " + std::string(to_string(producer_->status()))};
}

std::optional<EvSeq> LazyOutputTape::materialize() {
  if (producer_->status() == Status::Accepted) return producer_->output();
  return std::nullopt;
}

std::optional<EvSeq> InterleaveTape::materialize() {
  std::vector<EvSeq> parts;
  for (auto& p : parts_) {
    auto s = p->materialize();
    if (!s) return std::nullopt;
    parts.push_back(std::move(*s));
  }
  for (const auto& s : parts) {
    if (s.tail() != parts.front().tail()) return std::nullopt;
  }
  return interleave(parts);
}

std::optional<EvSeq> SliceTape::materialize() {
  if (auto* il = dynamic_cast<InterleaveTape*>(source_.get()); il && il->parts().size() == stride_) {
    return il->parts()[offset_]->materialize();
  }
  auto s = source_->materialize();
  if (!s) return std::nullopt;
  return deinterleave(*s, stride_)[offset_];
}

RunResult to_run_result(const Execution& e) {
  RunResult r;
  r.status = e.status();
  r.output = e.output();
  r.written = e.written();
  r.steps_used = e.steps();
  r.final = e.configuration();
  r.detail = e.detail();
  if (r.status == Status::QueryEncountered) r.query_vertex = e.detail();
  return r;
}

}  // namespace t2m
