#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rsg/cli.hpp"
#include "rsg/examples.hpp"
#include "rsg/game.hpp"
#include "rsg/ocssg.hpp"
#include "support/test_support.hpp"

using namespace rsg;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors exit with 2 and print the synopsis") {
  CliResult r = run({});
  CHECK(r.code == 2);
  CHECK(r.err.find("usage:") != std::string::npos);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"solve"}).code == 2);
  CHECK(run({"threshold", "-", "s", "0.5", "xx"}).code == 2);
  CHECK(run({"solve", "-", "--format", "yaml"}).code == 2);
}

TEST_CASE("domain errors exit with 1") {
  CHECK(run({"solve", "/nonexistent/path"}).code == 1);
  CHECK(run({"solve", "-"}, "state a rand\n").code == 1);  // no successor
  CHECK(run({"threshold", "-", "zz", "0.5", "ge"},
            "state t rand target\nedge t t 1\n")
            .code == 1);  // unknown state
}

TEST_CASE("solve reports zeros when there is no target") {
  CliResult r = run({"solve", "-"}, "state a rand\nstate b rand\nedge a b 1\nedge b a 1\n");
  CHECK(r.code == 0);
  CHECK(r.out == "a\t0\t0\nb\t0\t0\n");
}

TEST_CASE("emitted examples parse back to the same model") {
  CliResult fig1 = run({"examples", "emit", "fig1", "--depth", "3"});
  CHECK(fig1.code == 0);
  CHECK(testsupport::game_from(fig1.out) == examples::fig1_game(3));

  CliResult fig2 = run({"examples", "emit", "fig2"});
  CHECK(fig2.code == 0);
  CHECK(testsupport::oc_from(fig2.out) == examples::fig2_automaton());

  CliResult solvency = run({"examples", "emit", "solvency"});
  CHECK(solvency.code == 0);
  CHECK(testsupport::oc_from(solvency.out).num_controls() >= 3);
}

TEST_CASE("piped fig2 check refutes the all-or-nothing limit condition") {
  CliResult fig2 = run({"examples", "emit", "fig2"});
  CliResult check = run({"oc", "check", "-", "--cap", "64", "--tolerance", "1e-3"}, fig2.out);
  CHECK(check.code == 0);
  CHECK(check.out.find("corollary\tfalse") != std::string::npos);

  // same refutation at the default stabilization tolerance: the one-shot
  // gamble control pins its limit at exactly 1/2
  CliResult strict = run({"oc", "check", "-", "--cap", "64"}, fig2.out);
  CHECK(strict.code == 0);
  CHECK(strict.out.find("corollary\tfalse") != std::string::npos);
}

TEST_CASE("threshold on the ladder at the exact value") {
  CliResult fig1 = run({"examples", "emit", "fig1", "--depth", "8"});
  CliResult ge = run({"threshold", "-", "s_3", "0.875", "ge"}, fig1.out);
  CHECK(ge.code == 0);
  CHECK(ge.out.find("winner=max") == 0);
  CliResult gt = run({"threshold", "-", "s_3", "0.875", "gt"}, fig1.out);
  CHECK(gt.code == 0);
  CHECK(gt.out.find("winner=min") == 0);
  CHECK(gt.out.find("ambiguous=true") != std::string::npos);
}

TEST_CASE("qualitative lists safe states") {
  CliResult r = run({"qualitative", "-"},
                    "state t rand target\nstate d rand\nstate s rand\n"
                    "edge t t 1\nedge d d 1\nedge s t 1/2\nedge s d 1/2\n");
  CHECK(r.code == 0);
  CHECK(r.out == "d\n");
}

TEST_CASE("strategy output feeds back into evaluate and simulate") {
  CliResult fig1 = run({"examples", "emit", "fig1", "--depth", "4"});
  std::string game_text = fig1.out;

  CliResult max_strat = run({"strategy", "max", "-"}, game_text);
  CHECK(max_strat.code == 0);
  CHECK(max_strat.out.find("stage ") == 0);

  CliResult min_strat = run({"strategy", "min", "-"}, game_text);
  CHECK(min_strat.code == 0);
  CHECK(min_strat.out.empty());  // the ladder has no Min states

  // write inputs to files so all three paths can be passed at once
  std::string dir = "cli_roundtrip_tmp";
  std::filesystem::create_directory(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir + "/" + name);
    f << text;
    return dir + "/" + name;
  };
  std::string game_path = put("game.txt", game_text);
  std::string sigma_path = put("sigma.txt", max_strat.out);
  std::string pi_path = put("pi.txt", min_strat.out);

  CliResult eval = run({"evaluate", game_path, sigma_path, pi_path, "r_0"});
  CHECK(eval.code == 0);
  CHECK(eval.out.find("r_0\t15/16\t") == 0);

  CliResult sim = run({"simulate", game_path, sigma_path, pi_path, "r_0", "--replicas", "2000",
                       "--seed", "7"});
  CHECK(sim.code == 0);
  double estimate = std::stod(sim.out.substr(0, sim.out.find('\t')));
  CHECK(estimate > 0.85);
  CHECK(estimate <= 1.0);

  std::filesystem::remove_all(dir);
}

TEST_CASE("oc solve prints bounds rows") {
  CliResult r = run({"oc", "solve", "-", "--cap", "4"},
                    "control c rand\nrule c -1 c 1\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("c\t0\t1\t1\n") == 0);
  CHECK(r.out.find("c\t4\t") != std::string::npos);
}

TEST_CASE("lines format emits key=value pairs") {
  CliResult r = run({"solve", "-", "--format", "lines"},
                    "state t rand target\nedge t t 1\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("value.t=1\n") != std::string::npos);
  CHECK(r.out.find("converged=true\n") != std::string::npos);

  CliResult sim = run({"oc", "limits", "-", "--cap", "16", "--format", "lines"},
                      "control c rand\nrule c -1 c 1\n");
  CHECK(sim.code == 0);
  CHECK(sim.out.find("limit.c=1\n") != std::string::npos);
  CHECK(sim.out.find("stabilized.c=true\n") != std::string::npos);
}
