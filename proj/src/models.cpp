#include "t2m/models.hpp"

#include <algorithm>
#include <list>

namespace t2m {

RevisingStream RevisingStream::from_symbols(EvSeq symbols) {
  if (symbols.tail() >= MARK) throw DecodeError("revising stream tail must be 0 or 1, got " + symbols.to_string());
  RevisingStream s;
  for (Symbol v : symbols.prefix()) {
    if (v > MARK) throw DecodeError("revising stream symbol " + std::to_string(v) + " is not 0, 1 or MARK");
    if (v == MARK) ++s.mark_count;
  }
  s.symbols = std::move(symbols);
  return s;
}

namespace {

std::size_t after_last_mark(const RevisingStream& s) {
  const auto& p = s.symbols.prefix();
  for (std::size_t i = p.size(); i > 0; --i) {
    if (p[i - 1] == MARK) return i;
  }
  return 0;
}

}  // namespace

EvSeq revising_decode(const RevisingStream& s) { return s.symbols.drop(after_last_mark(s)); }

EvSeq encode_revising(const RevisingStream& s) {
  std::vector<Symbol> bits;
  for (Symbol v : s.symbols.prefix()) {
    bits.push_back(v == MARK ? 1 : 0);
    bits.push_back(v == 1 ? 1 : 0);
  }
  if (s.symbols.tail() != 0) throw TailNotZero("only revising streams with tail 0 have a binary encoding");
  return EvSeq(std::move(bits), 0);
}

RevisingStream decode_revising_bits(const EvSeq& bits) {
  if (!bits.is_binary() || bits.tail() != 0) throw DecodeError("revising encoding must be binary with tail 0");
  std::vector<Symbol> out;
  const std::size_t n = (bits.prefix().size() + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol hi = bits.at(2 * i), lo = bits.at(2 * i + 1);
    if (hi == 1 && lo == 1) throw DecodeError("block 11 at symbol " + std::to_string(i));
    out.push_back(hi == 1 ? MARK : lo);
  }
  return RevisingStream::from_symbols(EvSeq(std::move(out), 0));
}

EvSeq threshold_stream(const EvSeq& w, Symbol n) {
  std::vector<Symbol> p;
  p.reserve(w.prefix().size());
  for (Symbol v : w.prefix()) p.push_back(v > n ? 1 : 0);
  return EvSeq(std::move(p), w.tail() > n ? 1 : 0);
}

MaxLoopResult max_by_lpo_loop(const EvSeq& w, std::size_t oracle_budget) {
  const Oracle o = lpo();
  MaxLoopResult r;
  for (Symbol n = 0;; ++n) {
    if (r.calls_used == oracle_budget) {
      throw BudgetExceeded("no zero answer within " + std::to_string(oracle_budget) + " LPO calls");
    }
    EvSeq q = threshold_stream(w, n);
    EvSeq a = o.select(q);
    ++r.calls_used;
    const bool zero = a.is_zero();
    r.trace.push_back({n, std::move(q), std::move(a)});
    if (zero) {
      r.value = n;
      return r;
    }
  }
}

// ---------------------------------------------------------------------------
// Optimistic simulation

namespace {

struct PendingQuery {
  std::size_t id;
  Checkpoint checkpoint;
  Configuration config;
};

}  // namespace

RevisingRun simulate_lpo_by_revising(const MachineGraph& m, const EvSeq& input, const RevisingOptions& opts) {
  validate_graph(m);
  if (!input.is_binary()) throw NonBinaryInput("machine input must be binary, got " + input.to_string());
  SeqTape tape(input);
  RevisingRun run;
  std::vector<Symbol> stream;
  std::size_t emitted = 0;  // main output cells already in the stream
  Configuration main = initial_configuration(m, input);
  bool main_live = true;
  std::list<PendingQuery> pending;
  std::size_t next_id = 0;
  std::uint64_t fuel = opts.fuel;

  auto emit_main_output = [&] {
    for (; emitted < main.heads[3]; ++emitted) stream.push_back(main.tapes[3].at(emitted));
  };

  auto step_main = [&] {
    const auto& v = m.vertex(main.vertex);
    switch (v.label.kind()) {
      case LabelKind::Accept:
        run.main_status = Status::Accepted;
        main_live = false;
        return;
      case LabelKind::Reject:
        run.main_status = Status::Rejected;
        main_live = false;
        return;
      case LabelKind::Query: {
        if (run.calls == opts.call_budget) {
          throw CallBudgetExceeded("more than " + std::to_string(opts.call_budget) + " oracle calls");
        }
        ++run.calls;
        PendingQuery q{next_id++, {main, 0}, spawn_query_configuration(m, main)};
        q.checkpoint.pending_query_id = q.id;
        pending.push_back(std::move(q));
        apply_oracle_answer(m, main, EvSeq::zeros());
        break;
      }
      default:
        if (step_in_place(m, main, tape) == StepKind::Stuck) {
          run.main_status = Status::Stuck;
          main_live = false;
          return;
        }
    }
    emit_main_output();
  };

  // Steps one query; returns true when it has written a 1.
  auto step_query = [&](std::list<PendingQuery>::iterator it, bool& resolved) {
    const auto& v = m.vertex(it->config.vertex);
    const auto kind = v.label.kind();
    if (kind == LabelKind::Accept) {
      resolved = true;
      return false;
    }
    if (kind == LabelKind::Reject || kind == LabelKind::Query) {
      throw QueryUndecidedWithinFuel("query computation at '" + v.name + "' halted without writing a 1 or accepting");
    }
    WriteEvent w{};
    if (step_in_place(m, it->config, tape, &w) == StepKind::Stuck) {
      throw QueryUndecidedWithinFuel("query computation stuck at '" + v.name + "'");
    }
    return kind == LabelKind::Write && w.tape == 3 && w.bit == 1;
  };

  while (true) {
    const bool main_active = main_live && emitted < opts.prefix_len;
    if (!main_active && pending.empty()) break;
    if (fuel == 0) {
      if (!pending.empty()) {
        throw QueryUndecidedWithinFuel(std::to_string(pending.size()) + " query computation(s) undecided after " +
                                       std::to_string(opts.fuel) + " steps");
      }
      run.main_status = Status::FuelExhausted;
      break;
    }
    if (main_active) {
      step_main();
      --fuel;
      ++run.steps;
    }
    for (auto it = pending.begin(); it != pending.end() && fuel > 0;) {
      bool resolved = false;
      const bool wrote_one = step_query(it, resolved);
      if (resolved) {
        it = pending.erase(it);
        continue;
      }
      --fuel;
      ++run.steps;
      if (!wrote_one) {
        ++it;
        continue;
      }
      ++run.revised_queries;
      stream.push_back(MARK);
      main = it->checkpoint.snapshot;
      apply_oracle_answer(m, main, EvSeq::one_then_zeros());
      main_live = true;
      run.main_status = Status::Running;
      emitted = 0;
      emit_main_output();
      // Calls made after this one belong to the discarded branch.
      pending.erase(it, pending.end());
      break;
    }
  }
  run.stream = RevisingStream::from_symbols(EvSeq(std::move(stream), 0));
  return run;
}

RevisingToMax revising_to_max(const RevisingStream& s) {
  std::vector<Symbol> q;
  Symbol best = 0;
  for (std::size_t i = 0; i < s.symbols.prefix().size(); ++i) {
    if (s.symbols.prefix()[i] == MARK) best = std::max<Symbol>(best, i + 1);
    q.push_back(best);
  }
  const EvSeq symbols = s.symbols;
  return {EvSeq(std::move(q), best), [symbols](Symbol n) { return symbols.drop(n); }};
}

HaltingCertificate parse_certificate(const std::string& text) {
  if (text == "loops") return HaltingCertificate::loops();
  const std::string head = "halts:";
  if (text.rfind(head, 0) == 0 && text.size() > head.size() &&
      std::all_of(text.begin() + head.size(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return HaltingCertificate::halts(std::stoull(text.substr(head.size())));
  }
  throw ParseError("certificate must be 'halts:<steps>' or 'loops', got '" + text + "'");
}

HaltingVerdict halting_demo(const MachineGraph& subject, const HaltingCertificate& certificate, std::uint64_t fuel,
                            const EvSeq& input) {
  const bool claims_halt = certificate.kind == HaltingCertificate::Kind::Halts;
  if (claims_halt && certificate.step > fuel) {
    throw CertificateUnverifiable("halting step " + std::to_string(certificate.step) + " exceeds fuel " +
                                  std::to_string(fuel));
  }
  const auto r = run(subject, input, claims_halt ? certificate.step : fuel);
  const bool halted = r.status != Status::FuelExhausted;
  HaltingVerdict v;
  v.steps_run = r.steps_used;
  if (claims_halt) {
    if (!halted) {
      throw CertificateRefuted("subject still running after " + std::to_string(certificate.step) + " steps");
    }
    std::vector<Symbol> q(r.steps_used == 0 ? 1 : r.steps_used, 0);
    q.back() = 1;
    v.query = EvSeq(std::move(q), 0);
  } else {
    if (halted) {
      throw CertificateRefuted("subject halted (" + std::string(to_string(r.status)) + ") after " +
                               std::to_string(r.steps_used) + " steps");
    }
    v.query = EvSeq::zeros();
  }
  v.answer = lpo().select(v.query);
  v.halts = !v.answer.is_zero();
  return v;
}

}  // namespace t2m
