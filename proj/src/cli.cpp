#include "rsg/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsg/bellman.hpp"
#include "rsg/examples.hpp"
#include "rsg/game.hpp"
#include "rsg/ocssg.hpp"
#include "rsg/qualitative.hpp"
#include "rsg/simulate.hpp"
#include "rsg/strategy.hpp"

namespace rsg {

namespace {

const char* kSynopsis = R"(usage: rsg <command> [options]

commands:
  solve <game>                          per-state values (value iteration)
  qualitative <game>                    safe states, one name per line
  strategy min|max <game>               optimal strategy for one player
  evaluate <game> <sigma> <pi> <state>  exact reach probability of a pair
  simulate <game> <sigma> <pi> <state>  Monte Carlo estimate of a pair
  threshold <game> <state> <nu> ge|gt   winner of the threshold comparison
  oc solve|limits|check <automaton>     counter-truncation analyses
  examples emit fig1|fig2|solvency      write a built-in model

options:
  --tolerance <t>       solver tolerance (default 1e-12); for `oc limits` and
                        `oc check` this is the stabilization tolerance
  --max-iterations <k>  value-iteration cap (default 10^7)
  --cap <n>             counter truncation cap (default 32)
  --depth <n>           fig1 depth (default 8)
  --replicas <r> --seed <s> --max-steps <m> --confidence <c>
                        simulation parameters
  --normalize-targets   force declared targets absorbing instead of rejecting
  --exact               exact chain solve (all player choices forced)
  --format tsv|lines    report style (default tsv)

model paths accept '-' for standard input.
)";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> positional;
  double tolerance = 1e-12;
  long max_iterations = 10'000'000;
  int cap = 32;
  int depth = 8;
  long replicas = 10'000;
  uint64_t seed = 0;
  long max_steps = 1'000'000;
  double confidence = 0.99;
  bool normalize_targets = false;
  bool exact = false;
  bool lines = false;
};

double parse_double(const std::string& flag, const std::string& value) {
  try {
    size_t pos = 0;
    double d = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw UsageError("bad value for " + flag + ": '" + value + "'");
  }
}

long parse_long(const std::string& flag, const std::string& value) {
  try {
    size_t pos = 0;
    long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad value for " + flag + ": '" + value + "'");
  }
}

Options parse_options(const std::vector<std::string>& args, size_t from) {
  Options o;
  for (size_t i = from; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      o.positional.push_back(a);
      continue;
    }
    auto value = [&]() -> const std::string& {
      if (i + 1 >= args.size()) throw UsageError("missing value for " + a);
      return args[++i];
    };
    if (a == "--tolerance")
      o.tolerance = parse_double(a, value());
    else if (a == "--max-iterations")
      o.max_iterations = parse_long(a, value());
    else if (a == "--cap")
      o.cap = static_cast<int>(parse_long(a, value()));
    else if (a == "--depth")
      o.depth = static_cast<int>(parse_long(a, value()));
    else if (a == "--replicas")
      o.replicas = parse_long(a, value());
    else if (a == "--seed")
      o.seed = static_cast<uint64_t>(parse_long(a, value()));
    else if (a == "--max-steps")
      o.max_steps = parse_long(a, value());
    else if (a == "--confidence")
      o.confidence = parse_double(a, value());
    else if (a == "--normalize-targets")
      o.normalize_targets = true;
    else if (a == "--exact")
      o.exact = true;
    else if (a == "--format") {
      const std::string& f = value();
      if (f == "lines")
        o.lines = true;
      else if (f != "tsv")
        throw UsageError("unknown format '" + f + "'");
    } else {
      throw UsageError("unknown option " + a);
    }
  }
  return o;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string slurp(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

GameGraph load_game(const std::string& path, std::istream& in, bool normalize) {
  std::istringstream text(slurp(path, in));
  return validate_game(parse_game(text), normalize);
}

OCAutomaton load_oc(const std::string& path, std::istream& in) {
  std::istringstream text(slurp(path, in));
  return validate_oc(parse_oc(text));
}

ParsedStrategy load_strategy(const GameGraph& g, Owner player, const std::string& path,
                             std::istream& in) {
  std::istringstream text(slurp(path, in));
  return parse_strategy(g, player, text);
}

SolveConfig solve_config(const Options& o) {
  SolveConfig cfg;
  cfg.tolerance = o.tolerance;
  cfg.max_iterations = o.max_iterations;
  if (o.exact) cfg.mode = SolveConfig::Mode::ExactChain;
  return cfg;
}

int cmd_solve(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 1) throw UsageError("solve expects one game path");
  GameGraph g = load_game(o.positional[0], in, o.normalize_targets);
  SolveResult r = value_iterate(g, solve_config(o));
  if (o.lines) {
    for (StateId s = 0; s < g.num_states(); ++s) {
      out << "value." << g.name(s) << '=';
      if (r.exact)
        out << rational_to_string((*r.exact)[s]);
      else
        out << fmt17(r.valuation[s]);
      out << '\n';
    }
    out << "residual=" << fmt17(r.residual) << '\n';
    out << "iterations=" << r.iterations << '\n';
    out << "converged=" << (r.converged ? "true" : "false") << '\n';
  } else {
    write_solve_result(g, r, out);
  }
  return r.converged ? 0 : 1;
}

int cmd_qualitative(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 1) throw UsageError("qualitative expects one game path");
  GameGraph g = load_game(o.positional[0], in, o.normalize_targets);
  StateSet safe = safe_states(g);
  for (StateId s = 0; s < g.num_states(); ++s)
    if (safe[s]) out << g.name(s) << '\n';
  return 0;
}

int cmd_strategy(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 2 || (o.positional[0] != "min" && o.positional[0] != "max"))
    throw UsageError("strategy expects: strategy min|max <game>");
  GameGraph g = load_game(o.positional[1], in, o.normalize_targets);
  if (o.positional[0] == "min") {
    SolveResult r = value_iterate(g, solve_config(o));
    if (!r.converged) throw Error("value iteration did not converge");
    write_strategy(g, extract_min_optimal(g, r.valuation), out);
  } else {
    write_strategy(g, synthesize_max_optimal(g, solve_config(o)), out);
  }
  return 0;
}

int cmd_evaluate(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 4)
    throw UsageError("evaluate expects: evaluate <game> <sigma> <pi> <state>");
  GameGraph g = load_game(o.positional[0], in, o.normalize_targets);
  ParsedStrategy sigma = load_strategy(g, Owner::Max, o.positional[1], in);
  ParsedStrategy pi = load_strategy(g, Owner::Min, o.positional[2], in);
  StateId s = g.id_of(o.positional[3]);
  Rational value = sigma.stage ? evaluate_strategy_pair(g, *sigma.stage, pi.memoryless, s)
                               : evaluate_strategy_pair(g, sigma.memoryless, pi.memoryless, s);
  if (o.lines) {
    out << "state=" << g.name(s) << '\n';
    out << "value=" << rational_to_string(value) << '\n';
    out << "value_double=" << fmt17(to_double(value)) << '\n';
  } else {
    out << g.name(s) << '\t' << rational_to_string(value) << '\t' << fmt17(to_double(value))
        << '\n';
  }
  return 0;
}

int cmd_simulate(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 4)
    throw UsageError("simulate expects: simulate <game> <sigma> <pi> <state>");
  GameGraph g = load_game(o.positional[0], in, o.normalize_targets);
  ParsedStrategy sigma = load_strategy(g, Owner::Max, o.positional[1], in);
  ParsedStrategy pi = load_strategy(g, Owner::Min, o.positional[2], in);
  StateId s = g.id_of(o.positional[3]);
  SimConfig cfg;
  cfg.replicas = o.replicas;
  cfg.max_steps = o.max_steps;
  cfg.seed = o.seed;
  cfg.confidence = o.confidence;
  EstimateResult r = sigma.stage ? estimate_reach(g, *sigma.stage, pi.memoryless, s, cfg)
                                 : estimate_reach(g, sigma.memoryless, pi.memoryless, s, cfg);
  if (o.lines) {
    out << "estimate=" << fmt17(r.estimate) << '\n';
    out << "half_width=" << fmt17(r.half_width) << '\n';
    out << "replicas=" << r.replicas << '\n';
    out << "truncated_fraction=" << fmt17(r.truncated_fraction) << '\n';
  } else {
    out << fmt17(r.estimate) << '\t' << fmt17(r.half_width) << '\t' << r.replicas << '\t'
        << fmt17(r.truncated_fraction) << '\n';
  }
  return 0;
}

int cmd_threshold(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 4)
    throw UsageError("threshold expects: threshold <game> <state> <nu> ge|gt");
  ThresholdQuery q;
  q.nu = parse_double("nu", o.positional[2]);
  if (q.nu < 0 || q.nu > 1) throw UsageError("nu must lie in [0,1]");
  if (o.positional[3] == "ge")
    q.rel = Relation::GreaterEqual;
  else if (o.positional[3] == "gt")
    q.rel = Relation::Greater;
  else
    throw UsageError("relation must be ge or gt");
  GameGraph g = load_game(o.positional[0], in, o.normalize_targets);
  q.state = g.id_of(o.positional[1]);
  ThresholdVerdict v = threshold_winner(g, q, solve_config(o));
  const char* winner = v.winner == Winner::Max ? "max" : "min";
  const char* rel = q.rel == Relation::GreaterEqual ? "ge" : "gt";
  if (o.lines) {
    out << "winner=" << winner << '\n';
    out << "value=" << fmt17(v.value) << '\n';
    out << "nu=" << fmt17(q.nu) << '\n';
    out << "rel=" << rel << '\n';
    if (v.ambiguous) out << "ambiguous=true\n";
  } else {
    out << "winner=" << winner << " value=" << fmt17(v.value) << " nu=" << fmt17(q.nu)
        << " rel=" << rel;
    if (v.ambiguous) out << " ambiguous=true";
    out << '\n';
  }
  return 0;
}

void print_limit_rows(const LimitReport& report, bool lines, std::ostream& out) {
  for (const auto& pc : report.controls) {
    if (lines) {
      out << "limit." << pc.control << '=' << fmt17(pc.limit) << '\n';
      out << "stabilized." << pc.control << '=' << (pc.stabilized ? "true" : "false") << '\n';
    } else {
      out << pc.control << '\t' << fmt17(pc.limit) << '\t' << (pc.stabilized ? "true" : "false")
          << '\n';
    }
  }
}

int cmd_oc(const Options& o, std::istream& in, std::ostream& out) {
  if (o.positional.size() != 2 ||
      (o.positional[0] != "solve" && o.positional[0] != "limits" && o.positional[0] != "check"))
    throw UsageError("oc expects: oc solve|limits|check <automaton>");
  OCAutomaton a = load_oc(o.positional[1], in);
  if (o.positional[0] == "solve") {
    SolveConfig cfg;
    cfg.tolerance = o.tolerance;
    cfg.max_iterations = o.max_iterations;
    TerminationBounds b = termination_bounds(a, o.cap, cfg);
    for (int q = 0; q < a.num_controls(); ++q)
      for (int n = 0; n <= b.cap; ++n) {
        if (o.lines) {
          out << "lower." << a.name(q) << '.' << n << '=' << fmt17(b.lower_at(q, n)) << '\n';
          out << "upper." << a.name(q) << '.' << n << '=' << fmt17(b.upper_at(q, n)) << '\n';
        } else {
          out << a.name(q) << '\t' << n << '\t' << fmt17(b.lower_at(q, n)) << '\t'
              << fmt17(b.upper_at(q, n)) << '\n';
        }
      }
    return b.lower_converged && b.upper_converged ? 0 : 1;
  }
  if (o.positional[0] == "limits") {
    LimitReport report = limit_values(a, o.tolerance, o.cap);
    print_limit_rows(report, o.lines, out);
    return 0;
  }
  CorollaryVerdict v = check_corollary_oc(a, o.tolerance, o.cap);
  print_limit_rows(v.report, o.lines, out);
  if (o.lines) {
    out << "corollary=" << (v.holds ? "true" : "false") << '\n';
    if (v.inconclusive) out << "inconclusive=true\n";
  } else {
    out << "corollary\t" << (v.holds ? "true" : "false") << '\n';
    if (v.inconclusive) out << "inconclusive\ttrue\n";
  }
  return 0;
}

int cmd_examples(const Options& o, std::ostream& out) {
  if (o.positional.size() != 2 || o.positional[0] != "emit")
    throw UsageError("examples expects: examples emit fig1|fig2|solvency");
  const std::string& id = o.positional[1];
  if (id == "fig1") {
    write_game(examples::fig1_game(o.depth), out);
  } else if (id == "fig2") {
    write_oc(examples::fig2_automaton(), out);
  } else if (id == "solvency") {
    // the canonical two-action gambler: one favourable unit bet, one pump
    std::vector<examples::SolvencyAction> actions{
        {{{-1, Rational(2, 3)}, {+1, Rational(1, 3)}}},
        {{{+1, Rational(1)}}},
    };
    write_oc(examples::solvency_automaton(actions), out);
  } else {
    throw UsageError("unknown example '" + id + "'");
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  try {
    if (args.empty()) throw UsageError("missing command");
    const std::string& cmd = args[0];
    Options o = parse_options(args, 1);
    if (cmd == "solve") return cmd_solve(o, in, out);
    if (cmd == "qualitative") return cmd_qualitative(o, in, out);
    if (cmd == "strategy") return cmd_strategy(o, in, out);
    if (cmd == "evaluate") return cmd_evaluate(o, in, out);
    if (cmd == "simulate") return cmd_simulate(o, in, out);
    if (cmd == "threshold") return cmd_threshold(o, in, out);
    if (cmd == "oc") return cmd_oc(o, in, out);
    if (cmd == "examples") return cmd_examples(o, out);
    throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << kSynopsis;
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rsg
