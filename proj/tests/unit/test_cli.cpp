#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "support/support.hpp"

#ifndef T2M_CLI_PATH
#error "T2M_CLI_PATH must point at the t2m binary"
#endif

using namespace t2m::testing;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Invocation cli(const std::string& args) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() / ("t2m_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto out = dir / ("out" + std::to_string(counter));
  const auto err = dir / ("err" + std::to_string(counter++));
  const std::string cmd = std::string(T2M_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string corpus_file(const std::string& name) { return (corpus_dir() / (name + ".t2m")).string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run prints the output prefix") {
    const auto r = cli("run " + corpus_file("id_copy") + " --input 1101:0 --fuel 1000 --prefix 4");
    CHECK(r.code == 0);
    CHECK(r.out == "1101\n");
  }

  TEST_CASE("run reports divergence with exit 3") {
    const auto r = cli("run " + corpus_file("diverging_query") + " --input :0 --fuel 1000");
    CHECK(r.code == 3);
    CHECK(r.err.find("QueryDiverged") != std::string::npos);
  }

  TEST_CASE("validate") {
    CHECK(cli("validate " + corpus_file("lpo4")).code == 0);
    const auto bad = cli("validate " + (corpus_dir() / "invalid" / "two_starts.t2m").string());
    CHECK(bad.code == 2);
    CHECK(bad.err.find("ValidationError") != std::string::npos);
    const auto syn = cli("validate " + (corpus_dir() / "invalid" / "duplicate_vertex.t2m").string());
    CHECK(syn.code == 2);
    CHECK(syn.err.find("SyntaxError") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    CHECK(cli("").code == 2);
    CHECK(cli("run").code == 2);
    CHECK(cli("run " + corpus_file("lpo4") + " --input nonsense").code == 2);
    const auto unknown = cli("run " + corpus_file("lpo4") + " --oracle nope");
    CHECK(unknown.code != 0);
    CHECK(unknown.err.find("UnknownName") != std::string::npos);
  }

  TEST_CASE("json output is deterministic") {
    const std::vector<std::string> commands = {
        "run " + corpus_file("two_calls") + " --input 0011:0 --json",
        "check-reduction --relation W --f lpo --g max --builtin lpo-max --json",
        "demo max-by-lpo --input 2,0,1:0 --json",
        "algebra --problem lpo -n 2 -m 2 --samples 20 --json",
    };
    for (const auto& c : commands) {
      const auto a = cli(c), b = cli(c);
      INFO(c);
      CHECK(a.code == 0);
      CHECK(a.out == b.out);
      CHECK(nlohmann::json::accept(a.out));
    }
  }

  TEST_CASE("run json mirrors the run result") {
    const auto r = cli("run " + corpus_file("two_calls") + " --input 0011:0 --json --prefix 8");
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "Accepted");
    CHECK(j["total_calls"] == 2);
    CHECK(j["calls"].size() == 2);
    CHECK(j["output_prefix"] == "10000000");
  }

  TEST_CASE("trace lines") {
    const auto r = cli("run " + corpus_file("copy16") + " --input 1:0 --fuel 3 --trace");
    std::istringstream lines(r.err);
    std::string first;
    std::getline(lines, first);
    const auto j = nlohmann::json::parse(first);
    for (const char* k : {"step", "vertex", "label", "heads"}) CHECK(j.contains(k));
    CHECK(j["heads"].size() == 4);
    std::string line;
    bool saw_write = false;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] != '{') continue;
      const auto e = nlohmann::json::parse(line);
      if (e.contains("written")) {
        saw_write = true;
        CHECK(e["written"]["tape"] == 3);
      }
    }
    CHECK(saw_write);
  }

  TEST_CASE("check-reduction exit codes") {
    CHECK(cli("check-reduction --relation W --f lpo --g lpo --builtin reflexivity").code == 0);
    CHECK(cli("check-reduction --relation W --f lpo --g id --builtin reflexivity").code == 1);
    CHECK(cli("check-reduction --relation bc:4 --f max --g lpo --builtin threshold:4").code == 0);
    const auto files = (corpus_dir() / "odd_projection.t2m").string() + "," + (corpus_dir() / "id_copy.t2m").string();
    CHECK(cli("check-reduction --relation W --f lpo --g lpo --witness " + files).code == 0);
  }

  TEST_CASE("samples file") {
    const auto path = std::filesystem::temp_directory_path() / "t2m_cli_samples.txt";
    std::ofstream(path) << ":0\n1:0\n0001:1\n";
    const auto r = cli("check-reduction --relation W --f lpo --g lpo --builtin reflexivity --json --samples " +
                       path.string());
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["samples"].size() == 3);
  }

  TEST_CASE("transform separate-layers") {
    const auto path = std::filesystem::temp_directory_path() / "t2m_cli_layers.t2m";
    const auto r = cli("transform separate-layers " + corpus_file("lpo4") + " -n 2 --out " + path.string());
    CHECK(r.code == 0);
    const auto text = slurp(path);
    CHECK(text.find("# layer: 2") != std::string::npos);
    CHECK(cli("validate " + path.string()).code == 0);
  }

  TEST_CASE("demos") {
    const auto m = cli("demo max-by-lpo --input 2,0,1:0 --json");
    const auto j = nlohmann::json::parse(m.out);
    CHECK(j["value"] == 2);
    CHECK(j["calls_used"] == 3);
    CHECK(cli("demo revising --machine " + corpus_file("late_hit") + " --input 1101:0").code == 0);
    CHECK(cli("demo halting --machine " + corpus_file("accept_now") + " --certificate halts:1").code == 0);
    CHECK(cli("demo halting --machine " + corpus_file("loop") + " --certificate loops").code == 0);
    const auto u = cli("demo halting --machine " + corpus_file("accept_now") + " --certificate halts:1000000000");
    CHECK(u.code == 3);
    CHECK(u.err.find("CertificateUnverifiable") != std::string::npos);
  }

  TEST_CASE("circuits") {
    const auto path = std::filesystem::temp_directory_path() / "t2m_cli_circuit.txt";
    std::ofstream(path) << "g0 = const {1,2}\ng1 = const {3}\ng2 = times g0 g1\ng3 = test g2\noutput g2\noutput g3\n";
    const auto e = cli("circuit eval " + path.string() + " --json");
    CHECK(e.code == 0);
    const auto j = nlohmann::json::parse(e.out);
    CHECK(j["outputs"][0]["set"] == nlohmann::json::array({0, 3, 6}));
    CHECK(j["outputs"][1]["set"] == nlohmann::json::array({0}));
    CHECK(j["test_gates"] == 1);
    const auto c = cli("circuit compile " + path.string());
    CHECK(c.code == 0);
  }
}
