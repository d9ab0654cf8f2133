// t2m: command-line front end.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "t2m/circuits.hpp"
#include "t2m/dsl.hpp"
#include "t2m/models.hpp"
#include "t2m/oracle.hpp"
#include "t2m/transform.hpp"
#include "t2m/weihrauch.hpp"

using json = nlohmann::json;
using namespace t2m;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kDiverged = 3 };

struct Config {
  std::uint64_t fuel = 1000000;
  unsigned depth = 1;
  std::size_t prefix = 64;
  std::optional<std::size_t> call_limit;
  bool trace = false;
  bool json = false;
  std::string query_mode = "exact";
  std::uint64_t query_fuel = 20000;
};

std::string bits(const std::vector<Symbol>& p) {
  std::string s;
  for (auto b : p) s += std::to_string(b);
  return s;
}

std::string set_text(const NatSet& s) {
  std::string out = "{";
  bool first = true;
  for (auto v : s) {
    out += (first ? "" : ",") + std::to_string(v);
    first = false;
  }
  return out + "}";
}

void emit(const Config& cfg, const json& j, const std::string& human) {
  if (cfg.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

json call_json(const CallRecord& c) {
  json j = {{"depth_at_call", c.depth_at_call},
            {"query", c.query.to_string()},
            {"answer", c.answer.to_string()},
            {"query_steps", c.query_steps},
            {"approximate_query", c.approximate_query}};
  json nested = json::array();
  for (const auto& n : c.nested) nested.push_back(call_json(n));
  j["nested"] = nested;
  return j;
}

std::vector<EvSeq> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file '" + path + "'");
  std::vector<EvSeq> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(parse_seq(line.substr(b, e - b + 1)));
  }
  return out;
}

MachineGraph load_one(const std::string& path, const std::string& name) {
  if (name.empty()) return load_machine_file(path);
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open machine file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  for (auto& m : parse_machines(buf.str())) {
    if (m.name() == name) return m;
  }
  throw UnknownName("no machine named '" + name + "' in " + path);
}

// ---------------------------------------------------------------------------

int cmd_validate(const Config& cfg, const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open machine file '" + file + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  auto ms = parse_machines(buf.str());
  json arr = json::array();
  std::string human;
  for (const auto& m : ms) {
    validate_graph(m);
    arr.push_back({{"name", m.name()}, {"vertices", m.size()}, {"has_queries", m.has_queries()}});
    human += "ok " + m.name() + " (" + std::to_string(m.size()) + " vertices)\n";
  }
  emit(cfg, {{"valid", true}, {"machines", arr}}, human);
  return kOk;
}

int cmd_run(const Config& cfg, const std::string& file, const std::string& machine, const std::string& input,
            const std::string& oracle_spec) {
  const auto m = load_one(file, machine);
  const auto x = parse_seq(input);
  std::optional<Oracle> oracle;
  if (cfg.depth > 0) oracle = parse_oracle_spec(oracle_spec, cfg.fuel);
  RunOptions ro;
  ro.call_limit = cfg.call_limit;
  ro.query_fuel = cfg.query_fuel;
  if (cfg.query_mode == "fueled") ro.query_mode = QueryMode::FueledLimit;
  else if (cfg.query_mode != "exact") throw ParseError("query mode must be 'exact' or 'fueled'");
  if (cfg.trace) {
    ro.trace = [](const TraceEvent& e) {
      json j = {{"step", e.step}, {"vertex", e.vertex}, {"label", e.label}, {"heads", e.heads}};
      if (e.written) j["written"] = {{"tape", e.written->tape}, {"pos", e.written->pos}, {"bit", e.written->bit}};
      std::cerr << j.dump() << "\n";
    };
  }
  const auto r = run_with_oracle(Program(m), oracle ? &*oracle : nullptr, x, cfg.depth, cfg.fuel, ro);
  const auto o = observe(r, cfg.prefix);
  json calls = json::array();
  for (const auto& c : r.calls) calls.push_back(call_json(c));
  json j = {{"machine", m.name()},
            {"input", x.to_string()},
            {"oracle", cfg.depth > 0 ? oracle->name : ""},
            {"depth", r.depth},
            {"status", to_string(r.base.status)},
            {"outcome", o.kind == OutcomeKind::Output ? "output"
                        : o.kind == OutcomeKind::NoOutput ? "none"
                                                          : "undetermined"},
            {"output_prefix", bits(o.prefix)},
            {"written", r.base.written},
            {"steps_used", r.base.steps_used},
            {"total_calls", r.total_calls},
            {"max_nesting", r.max_nesting},
            {"approximate", r.approximate},
            {"calls", calls}};
  if (r.base.query_vertex) j["query_vertex"] = *r.base.query_vertex;
  if (!r.base.detail.empty()) j["detail"] = r.base.detail;
  std::string human = o.kind == OutcomeKind::NoOutput ? "" : bits(o.prefix) + "\n";
  emit(cfg, j, human);
  if (!cfg.json) std::cerr << "status: " << to_string(r.base.status) << ", calls: " << r.total_calls << "\n";
  return o.kind == OutcomeKind::Output ? kOk : kDiverged;
}

int cmd_separate_layers(const Config& cfg, const std::string& file, const std::string& machine, unsigned n,
                        const std::string& out_path) {
  const auto m = load_one(file, machine);
  const auto lm = separate_layers(m, n);
  const auto violations = check_layer_conditions(lm);
  const auto text = print_machine(lm.graph);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write '" + out_path + "'");
    out << text;
  }
  json j = {{"machine", m.name()},
            {"depth", n},
            {"original_vertices", m.size()},
            {"vertices", lm.graph.size()},
            {"violations", violations}};
  if (out_path.empty()) j["text"] = text;
  std::string human = out_path.empty() ? text : "";
  for (const auto& v : violations) human += "violation: " + v + "\n";
  emit(cfg, j, human);
  return violations.empty() ? kOk : kCheckFailed;
}

ReductionWitness builtin_witness(const std::string& name) {
  if (name == "reflexivity") return reflexivity_witness();
  if (name == "lpo-max") return lpo_to_max_witness();
  if (name == "embedding") return embedding_witness();
  if (name == "index1") return coproduct_index1_witness();
  const std::string th = "threshold:";
  if (name.rfind(th, 0) == 0) return max_threshold_witness(std::stoull(name.substr(th.size())));
  throw UnknownName("unknown builtin witness '" + name + "'");
}

int cmd_check(const Config& cfg, const std::string& relation, const std::string& f_spec, const std::string& g_spec,
              const std::string& witness, const std::string& builtin, const std::string& samples_file) {
  const auto rel = parse_relation(relation);
  auto f = catalog_problem(f_spec);
  const auto g = catalog_problem(g_spec);
  if (!samples_file.empty()) f.domain_samples = read_samples(samples_file);
  std::optional<ReductionWitness> w;
  if (!builtin.empty()) {
    w = builtin_witness(builtin);
  } else {
    const auto comma = witness.find(',');
    if (comma == std::string::npos) throw ParseError("--witness expects F.t2m,G.t2m");
    w = ReductionWitness{load_machine_file(witness.substr(0, comma)), load_machine_file(witness.substr(comma + 1))};
  }
  CheckOptions opts;
  opts.prefix_len = cfg.prefix;
  opts.fuel = cfg.fuel;
  opts.query_fuel = cfg.query_fuel;
  const auto rep = check_relation(rel, f, g, *w, opts);
  json samples = json::array();
  std::string human;
  for (const auto& s : rep.per_sample) {
    json e = {{"input", s.input.to_string()},
              {"query", s.query.to_string()},
              {"pass", s.pass},
              {"approximate", s.approximate},
              {"produced", s.produced}};
    json expected = json::array();
    for (const auto& v : s.expected) expected.push_back(v.to_string());
    e["expected"] = expected;
    if (!s.note.empty()) e["note"] = s.note;
    samples.push_back(e);
    if (!s.pass) human += "fail " + s.input.to_string() + ": " + s.note + "\n";
  }
  json j = {{"relation", rep.relation.to_string()},
            {"f", rep.f_name},
            {"g", rep.g_name},
            {"prefix_len", rep.prefix_len},
            {"passed", rep.passed},
            {"approximate", rep.approximate},
            {"samples", samples}};
  human += std::string(rep.passed ? "PASS" : "FAIL") + " " + rep.f_name + " <=" + rep.relation.to_string() + " " +
           rep.g_name + " on " + std::to_string(rep.per_sample.size()) + " samples" +
           (rep.approximate ? " (approximate queries)" : "") + "\n";
  emit(cfg, j, human);
  return rep.passed ? kOk : kCheckFailed;
}

int cmd_demo_max(const Config& cfg, const std::string& input, std::size_t budget) {
  const auto w = parse_seq(input);
  const auto r = max_by_lpo_loop(w, budget);
  json trace = json::array();
  std::string human;
  for (const auto& s : r.trace) {
    trace.push_back({{"threshold", s.threshold}, {"query", s.query.to_string()}, {"answer", s.answer.to_string()}});
    human += "w^" + std::to_string(s.threshold) + " = " + s.query.to_string() + " -> " + s.answer.to_string() + "\n";
  }
  human += "max = " + std::to_string(r.value) + " after " + std::to_string(r.calls_used) + " LPO calls\n";
  emit(cfg, {{"input", w.to_string()}, {"value", r.value}, {"calls_used", r.calls_used}, {"trace", trace}}, human);
  return kOk;
}

int cmd_demo_revising(const Config& cfg, const std::string& file, const std::string& machine,
                      const std::string& input) {
  const auto m = load_one(file, machine);
  const auto x = parse_seq(input);
  RevisingOptions ro;
  ro.fuel = cfg.fuel;
  ro.prefix_len = cfg.prefix;
  if (cfg.call_limit) ro.call_budget = *cfg.call_limit;
  const auto rv = simulate_lpo_by_revising(m, x, ro);
  const auto decoded = revising_decode(rv.stream);
  const auto tm = revising_to_max(rv.stream);
  const auto n = max_oracle(NatEncoding::Symbols).select(tm.query).at(0);
  std::string stream_text;
  for (std::size_t i = 0; i < rv.stream.symbols.prefix().size(); ++i) {
    const auto s = rv.stream.symbols.prefix()[i];
    stream_text += s == MARK ? std::string("|") : std::to_string(s);
  }
  json j = {{"machine", m.name()},
            {"input", x.to_string()},
            {"stream", stream_text},
            {"marks", rv.stream.mark_count},
            {"calls", rv.calls},
            {"revised_queries", rv.revised_queries},
            {"main_status", to_string(rv.main_status)},
            {"decoded_prefix", bits(decoded.take(cfg.prefix))},
            {"max_query", tm.query.to_string()},
            {"max_answer", n},
            {"output_via_max_prefix", bits(tm.answer_to_output(n).take(cfg.prefix))}};
  std::string human = "stream: " + stream_text + "\nmarks: " + std::to_string(rv.stream.mark_count) +
                      "\ndecoded: " + bits(decoded.take(cfg.prefix)) + "\n";
  emit(cfg, j, human);
  return kOk;
}

int cmd_demo_halting(const Config& cfg, const std::string& file, const std::string& machine,
                     const std::string& certificate, const std::string& input) {
  const auto m = load_one(file, machine);
  const auto cert = parse_certificate(certificate);
  const auto v = halting_demo(m, cert, cfg.fuel, parse_seq(input));
  json j = {{"machine", m.name()},
            {"certificate", certificate},
            {"verdict", v.halts ? "halts" : "loops"},
            {"query", v.query.to_string()},
            {"answer", v.answer.to_string()},
            {"steps_run", v.steps_run}};
  emit(cfg, j, std::string(v.halts ? "halts" : "loops") + "\n");
  return kOk;
}

int cmd_circuit(const Config& cfg, const std::string& kind, const std::string& file) {
  const auto c = load_circuit_file(file);
  json outputs = json::array();
  std::string human;
  if (kind == "eval") {
    for (const auto& [gate, set] : eval_circuit(c)) {
      outputs.push_back({{"gate", c.gates[gate].name}, {"set", std::vector<std::uint64_t>(set.begin(), set.end())}});
      human += c.gates[gate].name + " = " + set_text(set) + "\n";
    }
    emit(cfg, {{"outputs", outputs}, {"test_gates", count_test_gates(c)}}, human);
    return kOk;
  }
  const auto cc = compile_to_machine(c);
  const auto o = lpo();
  const auto r = run_with_oracle(cc.plan, &o, EvSeq::zeros(), cfg.depth, cfg.fuel);
  if (r.base.status != Status::Accepted) {
    emit(cfg, {{"status", to_string(r.base.status)}}, std::string("status: ") + to_string(r.base.status) + "\n");
    return kDiverged;
  }
  const auto sets = decode_sets(r.base.output, c.outputs.size());
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const auto& name = c.gates[c.outputs[k]].name;
    outputs.push_back({{"gate", name}, {"set", std::vector<std::uint64_t>(sets[k].begin(), sets[k].end())}});
    human += name + " = " + set_text(sets[k]) + "\n";
  }
  human += "lpo calls: " + std::to_string(r.total_calls) + ", level bound: " + std::to_string(cc.level_bound) + "\n";
  emit(cfg,
       {{"outputs", outputs},
        {"lpo_calls", cc.lpo_calls},
        {"recorded_calls", r.total_calls},
        {"level_bound", cc.level_bound},
        {"status", to_string(r.base.status)}},
       human);
  return kOk;
}

int cmd_algebra(const Config& cfg, const std::string& h, std::size_t n, std::size_t m, std::size_t samples) {
  const auto rep = algebra_identity_suite(catalog_problem(h), n, m, samples, cfg.prefix);
  json laws = json::array();
  std::string human;
  for (const auto& l : rep.laws) {
    laws.push_back({{"law", l.law}, {"samples", l.samples}, {"passed", l.passed}, {"detail", l.detail}});
    human += std::string(l.passed ? "PASS " : "FAIL ") + l.law + " (" + std::to_string(l.samples) + " samples)" +
             (l.detail.empty() ? "" : ": " + l.detail) + "\n";
  }
  emit(cfg, {{"problem", h}, {"passed", rep.passed}, {"laws", laws}}, human);
  return rep.passed ? kOk : kCheckFailed;
}

int exit_code_for(const Error& e) {
  const auto& k = e.kind();
  if (k == "SyntaxError" || k == "ValidationError" || k == "ParseError" || k == "UnknownName" || k == "DecodeError" ||
      k == "NonBinaryInput" || k == "CircuitError" || k == "TailNotZero" || k == "TailMismatch") {
    return kUsage;
  }
  if (k == "WitnessDiverged" || k == "QueryUndecidedWithinFuel" || k == "OracleDivergence" ||
      k == "CertificateUnverifiable" || k == "BudgetExceeded" || k == "CallBudgetExceeded") {
    return kDiverged;
  }
  return kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oracle Type-2 machine simulator"};
  app.require_subcommand(1);
  Config cfg;
  app.add_flag("--json", cfg.json, "JSON output");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--fuel", cfg.fuel, "step budget")->capture_default_str();
    sub->add_option("--depth", cfg.depth, "query depth")->capture_default_str();
    sub->add_option("--prefix", cfg.prefix, "output prefix length")->capture_default_str();
    sub->add_flag("--json", cfg.json, "JSON output");
  };

  std::string file, machine, input = ":0", oracle = "lpo", out_path, relation = "W", f_spec, g_spec, witness,
                                builtin, samples_file, certificate, kind, h = "lpo";
  std::size_t budget = 1000, n = 1, m = 1, law_samples = 20;
  unsigned layers = 1;

  auto* validate = app.add_subcommand("validate", "parse and validate a machine file");
  validate->add_option("file", file)->required();
  validate->add_flag("--json", cfg.json, "JSON output");

  auto* run = app.add_subcommand("run", "run a machine with an oracle");
  run->add_option("file", file)->required();
  run->add_option("--machine", machine, "machine name within the file");
  run->add_option("--input", input, "input sequence literal")->capture_default_str();
  run->add_option("--oracle", oracle, "oracle spec")->capture_default_str();
  run->add_option("--call-limit", cfg.call_limit, "maximum number of oracle calls");
  run->add_option("--query-mode", cfg.query_mode, "exact or fueled")->capture_default_str();
  run->add_option("--query-fuel", cfg.query_fuel, "steps per query in fueled mode")->capture_default_str();
  run->add_flag("--trace", cfg.trace, "JSON-lines step trace on stderr");
  add_common(run);

  auto* transform = app.add_subcommand("transform", "machine transformations");
  transform->require_subcommand(1);
  auto* sep = transform->add_subcommand("separate-layers", "separate query layers");
  sep->add_option("file", file)->required();
  sep->add_option("--machine", machine, "machine name within the file");
  sep->add_option("-n,--n,--layers", layers, "number of query layers")->capture_default_str();
  sep->add_option("-o,--out", out_path, "write the layered machine here");
  sep->add_flag("--json", cfg.json, "JSON output");

  auto* check = app.add_subcommand("check-reduction", "check a reduction witness on samples");
  check->add_option("--relation", relation, "W, bc:n, bf, bf:k, f:k or hat:k")->capture_default_str();
  check->add_option("--f", f_spec, "reduced problem")->required();
  check->add_option("--g", g_spec, "target problem")->required();
  auto* wopt = check->add_option("--witness", witness, "F.t2m,G.t2m");
  auto* bopt = check->add_option("--builtin", builtin, "reflexivity, lpo-max, threshold:B, embedding, index1");
  wopt->excludes(bopt);
  check->add_option("--samples", samples_file, "one sequence literal per line");
  check->add_option("--query-fuel", cfg.query_fuel, "steps granted to G")->capture_default_str();
  add_common(check);

  auto* demo = app.add_subcommand("demo", "model demonstrations");
  demo->require_subcommand(1);
  auto* dmax = demo->add_subcommand("max-by-lpo", "MAX from LPO calls");
  dmax->add_option("--input", input, "sequence over naturals")->required();
  dmax->add_option("--budget", budget, "LPO call budget")->capture_default_str();
  dmax->add_flag("--json", cfg.json, "JSON output");
  auto* drev = demo->add_subcommand("revising", "LPO calls as a finitely revising computation");
  drev->add_option("--machine", file, "machine file")->required();
  drev->add_option("--name", machine, "machine name within the file");
  drev->add_option("--input", input, "input sequence literal")->capture_default_str();
  drev->add_option("--call-limit", cfg.call_limit, "call budget");
  add_common(drev);
  auto* dhalt = demo->add_subcommand("halting", "halting problem with one LPO call");
  dhalt->add_option("--machine", file, "subject machine file")->required();
  dhalt->add_option("--name", machine, "machine name within the file");
  dhalt->add_option("--certificate", certificate, "halts:<steps> or loops")->required();
  dhalt->add_option("--input", input, "subject input")->capture_default_str();
  add_common(dhalt);

  auto* circuit = app.add_subcommand("circuit", "arithmetic circuits");
  circuit->require_subcommand(1);
  auto* ceval = circuit->add_subcommand("eval", "evaluate directly");
  ceval->add_option("file", file)->required();
  ceval->add_flag("--json", cfg.json, "JSON output");
  auto* ccomp = circuit->add_subcommand("compile", "compile to an LPO-calling plan and run it");
  ccomp->add_option("file", file)->required();
  add_common(ccomp);

  auto* alg = app.add_subcommand("algebra", "operator identities on samples");
  alg->add_option("--problem", h, "problem")->capture_default_str();
  alg->add_option("-n", n, "outer power")->capture_default_str();
  alg->add_option("-m", m, "inner power")->capture_default_str();
  alg->add_option("--samples", law_samples, "samples per law")->capture_default_str();
  add_common(alg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(cfg, file);
    if (*run) return cmd_run(cfg, file, machine, input, oracle);
    if (*sep) return cmd_separate_layers(cfg, file, machine, layers, out_path);
    if (*check) return cmd_check(cfg, relation, f_spec, g_spec, witness, builtin, samples_file);
    if (*dmax) return cmd_demo_max(cfg, input, budget);
    if (*drev) return cmd_demo_revising(cfg, file, machine, input);
    if (*dhalt) return cmd_demo_halting(cfg, file, machine, certificate, input);
    if (*ceval) return cmd_circuit(cfg, "eval", file);
    if (*ccomp) return cmd_circuit(cfg, "compile", file);
    if (*alg) return cmd_algebra(cfg, h, n, m, law_samples);
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    if (cfg.json) std::cout << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump(2) << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
