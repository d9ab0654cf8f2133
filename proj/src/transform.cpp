#include "t2m/transform.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace t2m {

// ---------------------------------------------------------------------------
// Layer separation

LayeredMachine separate_layers(const MachineGraph& m, unsigned n) {
  validate_graph(m);
  const VertexId s = *m.start();
  std::string sep = "__";
  auto copy_name = [&](VertexId v, unsigned layer) { return m.vertex(v).name + sep + std::to_string(layer); };
  while (true) {
    std::unordered_set<std::string> names{m.vertex(s).name};
    bool clash = false;
    for (unsigned layer = 0; layer <= n && !clash; ++layer) {
      for (VertexId v = 0; v < m.size() && !clash; ++v) {
        if (v != s) clash = !names.insert(copy_name(v, layer)).second;
      }
    }
    if (!clash) break;
    sep += "_";
  }

  MachineBuilder b(m.name());
  b.start(m.vertex(s).name);
  b.begin(m.vertex(s).name, copy_name(m.vertex(s).successors[0], 0));
  b.layer(m.vertex(s).name, 0);
  for (unsigned layer = 0; layer <= n; ++layer) {
    for (VertexId v = 0; v < m.size(); ++v) {
      if (v == s) continue;
      const auto& vx = m.vertex(v);
      const std::string name = copy_name(v, layer);
      if (vx.label.kind() == LabelKind::Query) {
        if (layer == n) {
          b.reject(name);
        } else {
          b.query(name, copy_name(vx.successors[0], layer), copy_name(vx.successors[1], layer + 1));
        }
      } else {
        std::vector<std::string> succ;
        for (VertexId w : vx.successors) succ.push_back(copy_name(w, layer));
        b.add(name, vx.label, std::move(succ));
      }
      b.layer(name, layer);
    }
  }
  LayeredMachine out{b.build(), n};
  validate_graph(out.graph);
  return out;
}

std::vector<std::string> check_layer_conditions(const LayeredMachine& lm) {
  std::vector<std::string> bad;
  const auto& g = lm.graph;
  auto tag = [&](VertexId v) { return g.layer_tag(v); };
  for (VertexId v = 0; v < g.size(); ++v) {
    const auto& vx = g.vertex(v);
    const auto n = tag(v);
    if (!n) {
      bad.push_back(vx.name + ": no layer tag");
      continue;
    }
    if (*n > lm.depth) bad.push_back(vx.name + ": tag exceeds depth");
    auto expect = [&](VertexId w, unsigned want, const char* what) {
      if (tag(w) != want) bad.push_back(vx.name + ": " + what + " successor " + g.vertex(w).name + " has wrong tag");
    };
    switch (vx.label.kind()) {
      case LabelKind::Branch:
        expect(vx.successors[0], *n, "first");
        expect(vx.successors[1], *n, "second");
        break;
      case LabelKind::Query:
        if (*n == lm.depth) bad.push_back(vx.name + ": query at the last layer");
        expect(vx.successors[0], *n, "cont");
        expect(vx.successors[1], *n + 1, "query");
        break;
      case LabelKind::Accept:
      case LabelKind::Reject: break;
      default: expect(vx.successors[0], *n, "next"); break;
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Composition

namespace {

class ComposeExecution final : public Execution {
 public:
  ComposeExecution(std::shared_ptr<Execution> first, std::unique_ptr<Execution> second)
      : first_(std::move(first)), second_(std::move(second)) {}

  void advance() override {
    second_->advance();
    if (!second_->running()) finish(second_->status(), second_->detail());
  }
  const EvSeq& output() const override { return second_->output(); }
  std::size_t written() const override { return second_->written(); }
  std::uint64_t steps() const override { return first_->steps() + second_->steps(); }
  std::vector<CallRecord> take_calls() override {
    auto calls = first_->take_calls();
    for (auto& c : second_->take_calls()) calls.push_back(std::move(c));
    return calls;
  }

 private:
  std::shared_ptr<Execution> first_;
  std::unique_ptr<Execution> second_;
};

class ComposeNode final : public ProgramNode {
 public:
  ComposeNode(Program m0, Program m1) : m0_(std::move(m0)), m1_(std::move(m1)) {}

  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                   bool) const override {
    std::shared_ptr<Execution> first = m0_.start(std::move(input), depth, ctx);
    auto second = m1_.start(std::make_shared<LazyOutputTape>(first), depth, ctx);
    return std::make_unique<ComposeExecution>(std::move(first), std::move(second));
  }
  std::string describe() const override { return "compose(" + m0_.describe() + ", " + m1_.describe() + ")"; }

 private:
  Program m0_;
  Program m1_;
};

}  // namespace

Program compose_machines(Program m0, Program m1) {
  return Program(std::make_shared<ComposeNode>(std::move(m0), std::move(m1)));
}

QueryCounts count_queries(const OracleRunResult& r) {
  QueryCounts q;
  q.total = count_calls(r.calls);
  auto walk = [&](auto&& self, const std::vector<CallRecord>& calls) -> void {
    for (const auto& c : calls) {
      if (c.depth_at_call == r.depth) ++q.top_level;
      self(self, c.nested);
    }
  };
  walk(walk, r.calls);
  return q;
}

// ---------------------------------------------------------------------------
// Single-call splitting

namespace {

class SplitQueryExecution final : public Execution {
 public:
  SplitQueryExecution(std::shared_ptr<const MachineGraph> g, std::shared_ptr<InputTape> input, RunContext& ctx)
      : graph_(std::move(g)), input_(std::move(input)), ctx_(ctx) {
    main_ = std::make_unique<GraphExecution>(graph_, input_, 1, ctx_,
                                             initial_configuration(*graph_, input_->materialize().value_or(EvSeq())),
                                             false);
    main_->set_query_hook([this](GraphExecution& self, VertexId) -> std::optional<EvSeq> {
      sub_ = std::make_unique<GraphExecution>(graph_, input_, 0, ctx_,
                                              spawn_query_configuration(self.graph(), self.config()), false);
      self.fail(Status::Accepted, "query spawned");
      return std::nullopt;
    });
  }

  void advance() override {
    if (sub_) {
      sub_->advance();
      if (!sub_->running()) finish(sub_->status(), sub_->detail());
      return;
    }
    main_->advance();
    if (main_->running() || sub_) return;
    finish(main_->status(), main_->detail());
  }
  const EvSeq& output() const override { return sub_ ? sub_->output() : zeros_; }
  std::size_t written() const override { return sub_ ? sub_->written() : 0; }
  std::uint64_t steps() const override { return main_->steps() + (sub_ ? sub_->steps() : 0); }
  std::vector<CallRecord> take_calls() override { return {}; }

 private:
  std::shared_ptr<const MachineGraph> graph_;
  std::shared_ptr<InputTape> input_;
  RunContext& ctx_;
  std::unique_ptr<GraphExecution> main_;
  std::unique_ptr<GraphExecution> sub_;
  EvSeq zeros_;
};

class SplitContinueExecution final : public Execution {
 public:
  SplitContinueExecution(std::shared_ptr<const MachineGraph> g, std::shared_ptr<InputTape> input, RunContext& ctx) {
    auto w = std::make_shared<SliceTape>(input, 2, 0);
    auto y = std::make_shared<SliceTape>(input, 2, 1);
    main_ = std::make_unique<GraphExecution>(g, w, 1, ctx, initial_configuration(*g, w->materialize().value_or(EvSeq())),
                                             false);
    main_->set_query_hook([this, y](GraphExecution& self, VertexId) -> std::optional<EvSeq> {
      if (used_) {
        self.fail(Status::QueryDiverged, "second oracle call in a single-call continuation");
        return std::nullopt;
      }
      used_ = true;
      auto answer = y->materialize();
      if (!answer) self.fail(Status::QueryDiverged, "answer component is not available");
      return answer;
    });
  }

  void advance() override {
    main_->advance();
    if (!main_->running()) finish(main_->status(), main_->detail());
  }
  const EvSeq& output() const override { return main_->output(); }
  std::size_t written() const override { return main_->written(); }
  std::uint64_t steps() const override { return main_->steps(); }
  std::vector<CallRecord> take_calls() override { return {}; }
  std::optional<Configuration> configuration() const override { return main_->configuration(); }

 private:
  std::unique_ptr<GraphExecution> main_;
  bool used_ = false;
};

class SplitQueryNode final : public ProgramNode {
 public:
  explicit SplitQueryNode(std::shared_ptr<const MachineGraph> g) : g_(std::move(g)) {}
  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned, RunContext& ctx, bool) const override {
    return std::make_unique<SplitQueryExecution>(g_, std::move(input), ctx);
  }
  std::string describe() const override { return "query-of(" + g_->name() + ")"; }

 private:
  std::shared_ptr<const MachineGraph> g_;
};

class SplitContinueNode final : public ProgramNode {
 public:
  explicit SplitContinueNode(std::shared_ptr<const MachineGraph> g) : g_(std::move(g)) {}
  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned, RunContext& ctx, bool) const override {
    return std::make_unique<SplitContinueExecution>(g_, std::move(input), ctx);
  }
  std::string describe() const override { return "continuation-of(" + g_->name() + ")"; }

 private:
  std::shared_ptr<const MachineGraph> g_;
};

}  // namespace

SplitResult split_single_call(const MachineGraph& m, const Oracle& o, std::span<const EvSeq> samples,
                              std::uint64_t fuel, const RunOptions& options) {
  validate_graph(m);
  const Program p(m);
  std::vector<std::size_t> calls;
  for (const auto& x : samples) {
    auto r = run_with_oracle(p, o, x, 1, fuel, options);
    if (r.total_calls > 1) {
      throw MultipleCalls("machine " + m.name() + " makes " + std::to_string(r.total_calls) + " calls on " +
                          x.to_string());
    }
    calls.push_back(r.total_calls);
  }
  auto shared = std::make_shared<const MachineGraph>(m);
  return SplitResult{Program(std::make_shared<SplitQueryNode>(shared)),
                     Program(std::make_shared<SplitContinueNode>(shared)), std::move(calls)};
}

// ---------------------------------------------------------------------------
// Joining a witness pair

namespace {

class JoinExecution final : public Execution {
 public:
  JoinExecution(const Program& F, const Program& G, std::shared_ptr<InputTape> input, unsigned depth,
                RunContext& ctx)
      : F_(F), G_(G), input_(std::move(input)), depth_(depth), ctx_(ctx) {}

  void advance() override {
    if (f_) {
      f_->advance();
      if (!f_->running()) finish(f_->status(), f_->detail());
      return;
    }
    if (depth_ == 0) {
      finish(Status::QueryEncountered, "join");
      return;
    }
    if (!ctx_.fuel.try_consume()) {
      finish(Status::FuelExhausted);
      return;
    }
    auto q = G_.start(input_, depth_ - 1, ctx_);
    auto out = perform_call(ctx_, depth_, *q);
    if (out.status != Status::Running) {
      finish(out.status, out.detail);
      return;
    }
    calls_.push_back(std::move(out.record));
    ++own_steps_;
    std::vector<std::shared_ptr<InputTape>> parts{input_, std::make_shared<SeqTape>(std::move(out.answer))};
    f_ = F_.start(std::make_shared<InterleaveTape>(std::move(parts)), depth_, ctx_);
  }
  const EvSeq& output() const override { return f_ ? f_->output() : zeros_; }
  std::size_t written() const override { return f_ ? f_->written() : 0; }
  std::uint64_t steps() const override { return own_steps_ + (f_ ? f_->steps() : 0); }
  std::vector<CallRecord> take_calls() override {
    auto calls = std::move(calls_);
    if (f_) {
      for (auto& c : f_->take_calls()) calls.push_back(std::move(c));
    }
    return calls;
  }

 private:
  Program F_;
  Program G_;
  std::shared_ptr<InputTape> input_;
  unsigned depth_;
  RunContext& ctx_;
  std::unique_ptr<Execution> f_;
  std::vector<CallRecord> calls_;
  std::uint64_t own_steps_ = 0;
  EvSeq zeros_;
};

class JoinNode final : public ProgramNode {
 public:
  JoinNode(Program F, Program G) : F_(std::move(F)), G_(std::move(G)) {}
  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                   bool) const override {
    return std::make_unique<JoinExecution>(F_, G_, std::move(input), depth, ctx);
  }
  std::string describe() const override { return "join(" + F_.describe() + ", " + G_.describe() + ")"; }

 private:
  Program F_;
  Program G_;
};

}  // namespace

MachineGraph join_graph(const MachineGraph& F, const MachineGraph& G) {
  validate_graph(F);
  validate_graph(G);
  if (F.has_queries() || G.has_queries()) throw std::invalid_argument("join_graph needs query-free machines");
  if (F.uses_tape(2)) throw std::invalid_argument("join_graph needs F to leave tape 2 alone");
  const VertexId fs = *F.start();
  const VertexId gs = *G.start();
  auto fe = [&](VertexId v) { return "fe_" + F.vertex(v).name; };
  auto fo = [&](VertexId v) { return "fo_" + F.vertex(v).name; };
  auto gn = [&](VertexId v) { return "g_" + G.vertex(v).name; };

  MachineBuilder b("join_" + F.name() + "_" + G.name());
  b.start("s");
  b.begin("s", "q");
  b.query("q", fe(F.vertex(fs).successors[0]), gn(G.vertex(gs).successors[0]));
  for (VertexId v = 0; v < G.size(); ++v) {
    if (v == gs) continue;
    std::vector<std::string> succ;
    for (VertexId w : G.vertex(v).successors) succ.push_back(gn(w));
    b.add(gn(v), G.vertex(v).label, std::move(succ));
  }
  for (VertexId v = 0; v < F.size(); ++v) {
    if (v == fs) continue;
    const auto& vx = F.vertex(v);
    const auto& l = vx.label;
    const auto& sc = vx.successors;
    const bool tape0 = l.tape() == 0;
    switch (l.kind()) {
      case LabelKind::Branch:
        b.branch(fe(v), l.tape(), fe(sc[0]), fe(sc[1]));
        b.branch(fo(v), tape0 ? 2 : l.tape(), fo(sc[0]), fo(sc[1]));
        break;
      case LabelKind::MoveRight:
        if (tape0) {
          b.right(fe(v), 0, fo(sc[0]));
          b.right(fo(v), 2, fe(sc[0]));
        } else {
          b.right(fe(v), l.tape(), fe(sc[0]));
          b.right(fo(v), l.tape(), fo(sc[0]));
        }
        break;
      case LabelKind::MoveLeft:
        if (tape0) {
          b.left(fe(v), 2, fo(sc[0]));
          b.left(fo(v), 0, fe(sc[0]));
        } else {
          b.left(fe(v), l.tape(), fe(sc[0]));
          b.left(fo(v), l.tape(), fo(sc[0]));
        }
        break;
      case LabelKind::Write:
        b.write(fe(v), l.tape(), l.bit(), fe(sc[0]));
        b.write(fo(v), l.tape(), l.bit(), fo(sc[0]));
        break;
      case LabelKind::Accept:
        b.accept(fe(v));
        b.accept(fo(v));
        break;
      case LabelKind::Reject:
        b.reject(fe(v));
        b.reject(fo(v));
        break;
      default: throw std::invalid_argument("unexpected label in F");
    }
  }
  auto g = b.build();
  validate_graph(g);
  return g;
}

Program join_witness(const Program& F, const Program& G) {
  const auto* f = F.graph();
  const auto* g = G.graph();
  if (f && g && !f->has_queries() && !g->has_queries() && !f->uses_tape(2)) return Program(join_graph(*f, *g));
  return Program(std::make_shared<JoinNode>(F, G));
}

// ---------------------------------------------------------------------------
// Parallel copies

namespace {

class ParallelExecution final : public Execution {
 public:
  explicit ParallelExecution(std::vector<std::unique_ptr<Execution>> parts) : parts_(std::move(parts)) {}

  void advance() override {
    const std::size_t n = parts_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (next_ + k) % n;
      auto& p = *parts_[i];
      if (!p.running()) continue;
      p.advance();
      next_ = i + 1;
      if (!p.running() && p.status() != Status::Accepted) finish(p.status(), p.detail());
      return;
    }
    finish(Status::Accepted);
  }

  const EvSeq& output() const override {
    std::vector<EvSeq> outs;
    for (const auto& p : parts_) outs.push_back(p->output());
    cache_ = outs.empty() ? EvSeq() : interleave(outs);
    return cache_;
  }

  std::size_t written() const override {
    const std::size_t n = parts_.size();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t longest = 0;
    for (std::size_t c = 0; c < n; ++c) {
      const auto& p = *parts_[c];
      longest = std::max(longest, p.written());
      if (p.status() != Status::Accepted) best = std::min(best, n * p.written() + c);
    }
    return best == std::numeric_limits<std::size_t>::max() ? n * longest : best;
  }

  std::uint64_t steps() const override {
    std::uint64_t s = 0;
    for (const auto& p : parts_) s += p->steps();
    return s;
  }

  std::vector<CallRecord> take_calls() override {
    std::vector<CallRecord> calls;
    for (auto& p : parts_) {
      for (auto& c : p->take_calls()) calls.push_back(std::move(c));
    }
    return calls;
  }

 private:
  std::vector<std::unique_ptr<Execution>> parts_;
  std::size_t next_ = 0;
  mutable EvSeq cache_;
};

class ParallelNode final : public ProgramNode {
 public:
  ParallelNode(std::vector<Program> parts, bool paired) : parts_(std::move(parts)), paired_(paired) {}

  std::unique_ptr<Execution> start(std::shared_ptr<InputTape> input, unsigned depth, RunContext& ctx,
                                   bool) const override {
    const std::size_t n = parts_.size();
    std::vector<std::unique_ptr<Execution>> execs;
    for (std::size_t c = 0; c < n; ++c) {
      std::shared_ptr<InputTape> part_input;
      if (paired_) {
        auto x = std::make_shared<SliceTape>(std::make_shared<SliceTape>(input, 2, 0), n, c);
        auto b = std::make_shared<SliceTape>(std::make_shared<SliceTape>(input, 2, 1), n, c);
        part_input = std::make_shared<InterleaveTape>(std::vector<std::shared_ptr<InputTape>>{x, b});
      } else {
        part_input = std::make_shared<SliceTape>(input, n, c);
      }
      execs.push_back(parts_[c].start(std::move(part_input), depth, ctx));
    }
    return std::make_unique<ParallelExecution>(std::move(execs));
  }

  std::string describe() const override {
    std::string s = paired_ ? "paired-parallel(" : "parallel(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? ", " : "") + parts_[i].describe();
    return s + ")";
  }

 private:
  std::vector<Program> parts_;
  bool paired_;
};

}  // namespace

Program parallel_program(std::vector<Program> parts) {
  if (parts.empty()) throw std::invalid_argument("parallel_program needs at least one part");
  return Program(std::make_shared<ParallelNode>(std::move(parts), false));
}

Program paired_parallel_program(std::vector<Program> parts) {
  if (parts.empty()) throw std::invalid_argument("paired_parallel_program needs at least one part");
  return Program(std::make_shared<ParallelNode>(std::move(parts), true));
}

// ---------------------------------------------------------------------------
// Inlining a computable oracle

InlineReport inline_computable_oracle(const MachineGraph& m, const MachineGraph& g, unsigned depth,
                                      std::span<const EvSeq> samples, std::uint64_t fuel, std::size_t prefix_len) {
  if (depth == 0) throw std::invalid_argument("inline_computable_oracle needs depth >= 1");
  if (g.has_queries()) throw std::invalid_argument("the computable oracle must be query-free");
  const Program p(m);
  const Oracle o = computable_oracle(g, fuel);
  InlineReport report;
  report.depth = depth;
  for (const auto& x : samples) {
    InlineRow row;
    row.input = x;
    auto direct = run_with_oracle(p, o, x, depth, fuel);
    RunOptions opts;
    opts.inline_oracle = std::make_shared<const MachineGraph>(g);
    // The inlined oracle runs on the shared budget, so grant it the oracle's share too.
    auto inlined = run_with_oracle(p, o, x, depth - 1, 2 * fuel, opts);
    row.direct_status = to_string(direct.base.status);
    row.inlined_status = to_string(inlined.base.status);
    row.direct = observe(direct, prefix_len);
    row.inlined = observe(inlined, prefix_len);
    row.agree = row.direct == row.inlined &&
                (row.direct.kind != OutcomeKind::NoOutput || row.direct_status == row.inlined_status);
    report.all_agree = report.all_agree && row.agree;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace t2m
