#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "corpus.hpp"
#include "doctest.h"
#include "egw/errors.hpp"
#include "egw/json_io.hpp"
#include "json.hpp"

using namespace egw;

namespace {

std::string data_path(const std::string& name) {
  return std::string(EGW_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef EGW_BIN_PATH
struct CliResult {
  int exit_code = -1;
  std::string out;
};

// Runs the tool with stderr dropped; stdout captured byte-for-byte.
CliResult run_cli(const std::string& args) {
  const std::string tmp = "/tmp/egw_cli_out.txt";
  const std::string cmd =
      std::string(EGW_BIN_PATH) + " " + args + " > " + tmp + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(tmp);
  return r;
}
#endif

}  // namespace

TEST_SUITE_BEGIN("io_cli");

TEST_CASE("pmf json round trip") {
  const JointPmf p = corpus::asym22();
  const JointPmf q = pmf_from_json_text(pmf_to_json(p));
  REQUIRE(q.nx() == p.nx());
  REQUIRE(q.ny() == p.ny());
  for (int x = 0; x < p.nx(); ++x)
    for (int y = 0; y < p.ny(); ++y)
      CHECK(q.at(x, y) == doctest::Approx(p.at(x, y)).epsilon(1e-15));
  CHECK(q.x_labels == p.x_labels);
}

TEST_CASE("fixture files parse and match the in-code corpus") {
  const JointPmf file = pmf_from_file(data_path("pentagon.json"));
  const JointPmf code = corpus::pentagon();
  REQUIRE(file.nx() == code.nx());
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      CHECK(std::abs(file.at(x, y) - code.at(x, y)) <= 1e-15);
}

TEST_CASE("malformed documents raise ParseError; bad numerics keep their code") {
  const auto code_of = [](const std::string& text) {
    try {
      pmf_from_json_text(text);
    } catch (const Error& e) {
      return e.code();
    }
    return errc::none;
  };
  CHECK(code_of("{ not json") == errc::parse_error);
  CHECK(code_of("[1,2,3]") == errc::parse_error);
  CHECK(code_of("{\"x_alphabet\":[\"a\"],\"y_alphabet\":[\"b\"]}") ==
        errc::parse_error);
  CHECK(code_of("{\"x_alphabet\":[\"a\",\"b\"],\"y_alphabet\":[\"a\",\"b\"],"
                "\"pmf\":[[0.5,0.5],[0.5,-0.5]]}") == errc::negative_entry);
  CHECK(code_of("{\"x_alphabet\":[\"a\",\"b\"],\"y_alphabet\":[\"a\",\"b\"],"
                "\"pmf\":[[0.5,0.5],[0.5,0.5]]}") == errc::mass_deviation);
}

TEST_CASE("channel json round trip") {
  const Channel c = corpus::random_channel(3, 2, 2, 3);
  const Channel d = channel_from_json_text(channel_to_json(c));
  REQUIRE(d.u_size == 3);
  for (size_t i = 0; i < c.q.size(); ++i)
    CHECK(d.q[i] == doctest::Approx(c.q[i]).epsilon(1e-15));
}

TEST_CASE("serializers are stable under repeated calls") {
  RunManifest m;
  m.command = "quantities";
  m.input = "x.json";
  CHECK(manifest_to_json(m) == manifest_to_json(m));
  const std::string s = pmf_to_json(corpus::dsbs01());
  CHECK(s == pmf_to_json(corpus::dsbs01()));
  CHECK(s.back() == '\n');
}

#ifdef EGW_BIN_PATH

TEST_CASE("cli: quantities json is well formed and deterministic") {
  const std::string args =
      "quantities " + data_path("p_ind.json") + " --only wyner_ci,gacs_korner_ci";
  const CliResult a = run_cli(args);
  REQUIRE(a.exit_code == 0);
  const CliResult b = run_cli(args);
  CHECK(a.out == b.out);  // byte-identical rerun

  const nlohmann::json doc = nlohmann::json::parse(a.out);
  CHECK(doc.contains("manifest"));
  CHECK(doc["manifest"]["tool_version"] == std::string(k_tool_version));
  REQUIRE(doc.contains("quantities"));
  bool saw_wyner = false;
  for (const auto& q : doc["quantities"]) {
    if (q["name"] == "wyner_ci") {
      saw_wyner = true;
      CHECK(std::abs(q["value_bits"].get<double>()) <= 1e-6);
    }
  }
  CHECK(saw_wyner);
}

TEST_CASE("cli: witness channels re-evaluate to their reported point") {
  const CliResult r =
      run_cli("witness " + data_path("uniform33.json") + " --kind bvn");
  REQUIRE(r.exit_code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  const Channel c = channel_from_json_text(doc["channel"].dump());
  const TriplePmf t = extend(corpus::uniform33(), c);
  CHECK(std::abs(t.ixyu() - doc["mi_point"]["vxy"].get<double>()) <= 1e-10);
  CHECK(t.ixu() <= 1e-9);
}

TEST_CASE("cli: exit codes by failure class") {
  CHECK(run_cli("quantities /nonexistent.json").exit_code == 2);
  const std::string bad = "/tmp/egw_bad_fixture.json";
  {
    std::ofstream out(bad);
    out << "{\"x_alphabet\":[\"a\",\"b\"],\"y_alphabet\":[\"a\",\"b\"],"
           "\"pmf\":[[0.5,0.5],[0.5,-0.5]]}";
  }
  CHECK(run_cli("quantities " + bad).exit_code == 3);
  // No alternating cycle in an L-shaped support: condition not met.
  const CliResult cyc =
      run_cli("witness " + data_path("p_l.json") + " --kind cycle");
  CHECK(cyc.exit_code == 4);
  CHECK(run_cli("region " + data_path("p_ind.json")).exit_code == 2);  // no mode
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli: curve csv carries the manifest and cleanup column") {
  const CliResult r = run_cli("curve " + data_path("p_eq.json") +
                              " --kind ib --t-grid 0:0.5:1 --csv");
  REQUIRE(r.exit_code == 0);
  std::istringstream in(r.out);
  std::string line1, line2;
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(line1.rfind("# manifest ", 0) == 0);
  CHECK(line2 == "t,value_bits,raw_value_bits,cleanup,feasible");
}

#endif  // EGW_BIN_PATH

TEST_SUITE_END();
