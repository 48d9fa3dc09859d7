#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "haarpush/cli.hpp"
#include "haarpush/config.hpp"
#include "haarpush/report.hpp"

using namespace haarpush;

namespace {

const char* kFullConfig = R"cfg(
# full-surface configuration
[run]
chains = my-plane, my-exact
checks = main2, weil
seed = 4242
random-functions = 3
format = csv
out = somewhere.csv

[integrator]
kind = gauss
order = 10
panels = 2
mc-samples = 50000
mc-seed = 99

[fiber-integrator]
kind = gauss
order = 8
panels = 1
mc-samples = 50000
mc-seed = 99

[tolerance]
rel = 2e-6
floor = 1e-13

[group.plane4]
product = r2, r2

[density.blob]
kind = bump
center = 0.1, -0.2, 0.0, 0.3
radius = 0.5, 0.5, 0.4, 0.4
amplitude = 1.5, -0.25

[density.sheet]
kind = product
center = 0.0, 0.0
radius = 0.6, 0.6
amplitude = 0.8

[chain.my-plane]
group = plane4
h-coords = 0, 1
n-coords = 0
window = -1:1, -1:1, -1:1, -1:1
densities = blob, sheet

[chain.my-exact]
group = s4
h = a4
n = v4
)cfg";

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out);
  out << text;
}

// JSON with the per-run volatile fields (run id, wall times) cleared.
std::string stable_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  j["run_id"] = "";
  for (auto& r : j["reports"]) r["wall_ms"] = 0.0;
  return j.dump(2);
}

}  // namespace

TEST_CASE("config round-trips through dump_config") {
  const RunConfig a = parse_config(kFullConfig);
  CHECK(a.chains == std::vector<std::string>{"my-plane", "my-exact"});
  CHECK(a.checks == std::vector<std::string>{"main2", "weil"});
  CHECK(a.seed == 4242);
  CHECK(a.seed_from_file);
  CHECK(a.n_random_fns == 3);
  CHECK(a.format == "csv");
  CHECK(a.integ.order == 10);
  CHECK(a.integ.panels == 2);
  CHECK(a.fiber_integ.order == 8);
  CHECK(a.tol.rel_tol == doctest::Approx(2e-6));
  REQUIRE(a.groups.size() == 1);
  REQUIRE(a.densities.size() == 2);
  REQUIRE(a.chain_defs.size() == 2);
  CHECK(a.chain_defs[0].window.size() == 4);
  CHECK(a.chain_defs[1].is_finite());

  const std::string dumped = dump_config(a);
  const RunConfig b = parse_config(dumped);
  CHECK(a == b);
  // And a second round for canonical-form stability.
  CHECK(dump_config(b) == dumped);
}

TEST_CASE("missing fiber integrator section falls back to the outer one") {
  const RunConfig c = parse_config("[integrator]\norder = 6\n");
  CHECK(c.integ.order == 6);
  CHECK(c.fiber_integ.order == 6);
}

TEST_CASE("parse errors carry line numbers and field paths") {
  auto error_of = [](const std::string& text) {
    try {
      parse_config(text);
      return std::string("NO ERROR");
    } catch (const Error& e) {
      return std::string(e.what());
    }
  };
  CHECK(error_of("[nope]\n").find("unknown section") != std::string::npos);
  CHECK(error_of("[run]\nbogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(error_of("[run]\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("[run\n").find("unterminated") != std::string::npos);
  CHECK(error_of("seed = 1\n").find("outside any section") != std::string::npos);
  CHECK(error_of("[integrator]\norder = two\n").find("integrator.order") !=
        std::string::npos);
  CHECK(error_of("[integrator]\nkind = simpson\n").find("gauss or mc") != std::string::npos);
  CHECK(error_of("[tolerance]\nrel = -1\n").find("tolerance.rel") != std::string::npos);
  CHECK(error_of("[chain.x]\ngroup = r2\nwindow = 1:0\n").find("empty") != std::string::npos);
  CHECK(error_of("[chain.x]\nh = a4\n").find("missing its group") != std::string::npos);
  CHECK(error_of("[chain.x]\ngroup = s4\nh = a4\n").find("both h and n") != std::string::npos);
  CHECK(error_of("[chain.x]\ngroup = r2\ndensities = ghost\n").find("unknown density") !=
        std::string::npos);
  CHECK(error_of("[density.d]\nkind = bump\n").find("center and radius") != std::string::npos);
  CHECK(error_of("[run]\n[run]\n").find("duplicate section") != std::string::npos);
}

TEST_CASE("config-declared chain on a custom product group verifies") {
  RunConfig c = parse_config(kFullConfig);
  Chain chain = chain_from_config(c, "my-plane");
  REQUIRE(!chain.finite);
  REQUIRE(chain.lie);
  CHECK(chain.lie->G->dim == 4);
  CHECK(chain.lie->densities.size() == 2);  // blob + sheet, replacing defaults
  CHECK(chain.cfg.integ.order == 10);
  CHECK(chain.cfg.seed == 4242);
  CHECK(chain.lie->window.iv[0].lo == doctest::Approx(-1.0));

  const auto reports = run_checks(chain, {"main2", "modular"});
  for (const auto& r : reports) {
    INFO(r.check << ": " << r.detail);
    CHECK(r.pass);
  }

  Chain exact = chain_from_config(c, "my-exact");
  CHECK(exact.finite);
  const auto er = run_checks(exact, {"main2"});
  CHECK(er.at(0).pass);
  CHECK(er.at(0).max_abs == 0.0);

  CHECK_THROWS_WITH_AS(chain_from_config(c, "ghost-chain"),
                       doctest::Contains("unknown chain"), Error);
}

TEST_CASE("cli: catalog lists, filters and emits JSON") {
  std::string out;
  CHECK(cli({"catalog"}, &out) == 0);
  for (const char* token : {"aff1", "heis3", "borel3", "R^n", "s4-a4-v4", "z8-z4-z2"})
    CHECK(out.find(token) != std::string::npos);

  CHECK(cli({"catalog", "zzz-no-such"}, &out) == 0);
  CHECK(out.empty());

  CHECK(cli({"catalog", "--json"}, &out) == 0);
  const auto j = nlohmann::json::parse(out);
  CHECK(j.at("chains").size() == 7);
  CHECK(j.at("chains").at(0).at("checks").size() == 11);
}

TEST_CASE("cli: modular prints the determinant ratio") {
  std::string out, err;
  CHECK(cli({"modular", "--group", "aff1", "--element", "2,0"}, &out) == 0);
  CHECK(out.find("|det d(R_h)|_e| = 2") != std::string::npos);
  CHECK(out.find("|det d(L_h)|_e| = 4") != std::string::npos);
  CHECK(out.find("Delta(h)        = 0.5") != std::string::npos);

  CHECK(cli({"modular", "--group", "heis3", "--element", "0.3,-0.7,2"}, &out) == 0);
  CHECK(out.find("Delta(h)        = 1") != std::string::npos);

  CHECK(cli({"modular", "--group", "aff1", "--element", "-1,0"}, &out, &err) == 1);
  CHECK(err.find("outside the domain") != std::string::npos);
  CHECK(cli({"modular", "--group", "aff1", "--element", "1,2,3"}, &out, &err) == 1);
  CHECK(err.find("2 coordinates") != std::string::npos);
  CHECK(cli({"modular", "--group", "nothere", "--element", "1"}, &out, &err) == 1);
  CHECK(err.find("unknown group") != std::string::npos);
}

TEST_CASE("cli: verify runs chains, writes reports and sets exit codes") {
  std::string out, err;
  CHECK(cli({"verify", "--chain", "z8-z4-z2"}, &out) == 0);
  const RunReport run = parse_report_json(out);
  CHECK(run.seed == 11);
  CHECK(run.reports.size() == 11);
  CHECK(run.all_pass());

  // Impossible tolerance (and no absolute floor) => honest failure => exit 2.
  spit("/tmp/haarpush_strict.cfg",
       "[run]\nchains = heis3-center\nchecks = main2, weil\n"
       "[tolerance]\nrel = 1e-18\nfloor = 0\n");
  CHECK(cli({"verify", "--config", "/tmp/haarpush_strict.cfg"}, &out, &err) == 2);
  CHECK(err.find("FAILED") != std::string::npos);

  // Unknown check => configuration error => exit code 1.
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--checks", "bogus"}, &out, &err) == 1);
  CHECK(err.find("unknown check") != std::string::npos);

  // No chains selected => configuration error.
  CHECK(cli({"verify"}, &out, &err) == 1);
  CHECK(err.find("no chains selected") != std::string::npos);

  // Reports written to a file, markdown rows = record count.
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--checks", "main1,main2,weil", "--format",
             "md", "--out", "/tmp/haarpush_cli_test.md"},
            &out) == 0);
  const std::string md = slurp("/tmp/haarpush_cli_test.md");
  int rows = 0;
  std::istringstream lines(md);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind("| z8-z4-z2 |", 0) == 0) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("cli: config file drives verify and dump-config round-trips") {
  const std::string path = "/tmp/haarpush_cli_test.cfg";
  spit(path,
       "[run]\nchains = z8-z4-z2\nchecks = main2, compose\nseed = 31\n"
       "[tolerance]\nrel = 1e-6\n");
  std::string out;
  CHECK(cli({"verify", "--config", path}, &out) == 0);
  const RunReport run = parse_report_json(out);
  CHECK(run.seed == 31);
  CHECK(run.reports.size() == 2);

  // --dump-config prints the merged config; flags win over the file.
  CHECK(cli({"verify", "--config", path, "--seed", "77", "--checks", "weil",
             "--dump-config"},
            &out) == 0);
  const RunConfig merged = parse_config(out);
  CHECK(merged.seed == 77);
  CHECK(merged.checks == std::vector<std::string>{"weil"});
  CHECK(merged.chains == std::vector<std::string>{"z8-z4-z2"});
  CHECK(merged.tol.rel_tol == doctest::Approx(1e-6));

  // Malformed config file => exit 1 with the line number.
  spit(path, "[run]\nchains Z\n");
  std::string err;
  CHECK(cli({"verify", "--config", path}, &out, &err) == 1);
  CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("cli: seed precedence is flag, file, environment") {
  const std::string path = "/tmp/haarpush_seed_test.cfg";
  ::setenv("HAARPUSH_SEED", "555", 1);
  std::string out;

  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--checks", "main1", "--dump-config"}, &out) ==
        0);
  CHECK(parse_config(out).seed == 555);

  spit(path, "[run]\nseed = 66\n");
  CHECK(cli({"verify", "--config", path, "--chain", "z8-z4-z2", "--dump-config"}, &out) == 0);
  CHECK(parse_config(out).seed == 66);

  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--seed", "9", "--dump-config"}, &out) == 0);
  CHECK(parse_config(out).seed == 9);

  ::setenv("HAARPUSH_SEED", "notanumber", 1);
  std::string err;
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--dump-config"}, &out, &err) == 1);
  CHECK(err.find("HAARPUSH_SEED") != std::string::npos);
  ::unsetenv("HAARPUSH_SEED");
}

TEST_CASE("cli: report-convert re-renders JSON reports") {
  const std::string jpath = "/tmp/haarpush_convert_test.json";
  std::string out;
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--checks", "weil,compose", "--out", jpath},
            &out) == 0);

  CHECK(cli({"report-convert", jpath, "--format", "csv"}, &out) == 0);
  int rows = -1;  // don't count the header
  std::istringstream lines(out);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 2);

  CHECK(cli({"report-convert", jpath, "--format", "json"}, &out) == 0);
  CHECK(stable_json(out) == stable_json(slurp(jpath)));

  std::string err;
  CHECK(cli({"report-convert", "/tmp/no_such_file.json"}, &out, &err) == 1);
  spit("/tmp/haarpush_bad.json", "{not json");
  CHECK(cli({"report-convert", "/tmp/haarpush_bad.json"}, &out, &err) == 1);
  CHECK(err.find("malformed") != std::string::npos);
}

TEST_CASE("cli: verification output is deterministic modulo run id and timings") {
  std::string a, b;
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--seed", "123"}, &a) == 0);
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--seed", "123"}, &b) == 0);
  CHECK(a != b);  // fresh run ids
  CHECK(stable_json(a) == stable_json(b));

  std::string c;
  CHECK(cli({"verify", "--chain", "z8-z4-z2", "--seed", "124"}, &c) == 0);
  CHECK(stable_json(a) != stable_json(c));
}

TEST_CASE("cli: weil subcommand reports the normalization") {
  std::string out;
  CHECK(cli({"weil", "--chain", "heis3-center"}, &out) == 0);
  CHECK(out.find("Weil normalization scale = 1 ") != std::string::npos);
  CHECK(out.find("weil check passed") != std::string::npos);

  CHECK(cli({"weil", "--chain", "s4-a4-v4"}, &out) == 0);
  CHECK(out.find("exact backend") != std::string::npos);

  std::string err;
  CHECK(cli({"weil", "--chain", "missing"}, &out, &err) == 1);
}

TEST_CASE("cli: help and usage errors") {
  std::string out, err;
  CHECK(cli({"--help"}, &out, &err) == 0);
  CHECK(out.find("catalog") != std::string::npos);
  CHECK(cli({}, &out, &err) == 1);
  CHECK(cli({"frobnicate"}, &out, &err) == 1);
}
