#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rsg/bellman.hpp"
#include "rsg/examples.hpp"
#include "rsg/ocssg.hpp"
#include "rsg/qualitative.hpp"
#include "rsg/strategy.hpp"
#include "support/test_support.hpp"

using namespace rsg;
using testsupport::game_from;

namespace {

// two Max states pointing at each other plus a target exit; the plain greedy
// strategy cycles on the value-preserving a<->b edges and never arrives
const char* kGreedyTrap =
    "state a max\n"
    "state b max\n"
    "state t rand target\n"
    "edge a b\n"
    "edge a t\n"
    "edge b a\n"
    "edge t t 1\n";

MemorylessStrategy empty_min(const GameGraph& g) {
  MemorylessStrategy pi;
  pi.player = Owner::Min;
  pi.choice.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.owner(s) == Owner::Min) pi.choice[s] = {{g.successors(s)[0], Rational(1)}};
  return pi;
}

// worst case over all deterministic memoryless Min responses, per state
ExactValuation worst_case_over_min(const GameGraph& g, const StageSwitchingStrategy& sigma) {
  ExactValuation worst(g.num_states(), Rational(1));
  for (const auto& pi : enumerate_pure_strategies(g, Owner::Min)) {
    ExactValuation v = solve_chain_exact(g, sigma, pi);
    for (StateId s = 0; s < g.num_states(); ++s)
      if (v[s] < worst[s]) worst[s] = v[s];
  }
  return worst;
}

}  // namespace

TEST_CASE("extract_min_optimal picks minimizing successors") {
  GameGraph g = game_from(
      "state n min\nstate h rand\nstate l rand\nstate t rand target\nstate d rand\n"
      "edge n h\nedge n l\n"
      "edge h t 3/4\nedge h d 1/4\n"
      "edge l t 1/2\nedge l d 1/2\n"
      "edge t t 1\nedge d d 1\n");
  SolveResult r = value_iterate(g);
  MemorylessStrategy pi = extract_min_optimal(g, r.valuation);
  CHECK(pi.picked(g.id_of("n")) == g.id_of("l"));

  GameGraph h = game_from(
      "state n min\nstate t rand target\nstate d rand\n"
      "edge n t\nedge n d\nedge t t 1\nedge d d 1\n");
  MemorylessStrategy pi2 = extract_min_optimal(h, value_iterate(h).valuation);
  CHECK(pi2.picked(h.id_of("n")) == h.id_of("d"));
}

TEST_CASE("extract_min_optimal rejects non-fixed-points") {
  GameGraph g = game_from("state t rand target\nedge t t 1\n");
  CHECK_THROWS_AS(extract_min_optimal(g, Valuation{0.25}), NotFixedPoint);
}

TEST_CASE("extracted Min strategy is optimal against exhaustive Max play") {
  for (uint64_t seed = 800; seed < 815; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    ExactValuation exact = brute_force_value(g);
    MemorylessStrategy pi = extract_min_optimal(g, value_iterate(g).valuation);
    ExactValuation best(g.num_states(), Rational(0));
    for (const auto& sigma : enumerate_pure_strategies(g, Owner::Max)) {
      ExactValuation v = solve_chain_exact(g, sigma, pi);
      for (StateId s = 0; s < g.num_states(); ++s)
        if (v[s] > best[s]) best[s] = v[s];
    }
    CHECK(best == exact);
  }
}

TEST_CASE("greedy Max extraction") {
  GameGraph g = game_from(
      "state m max\nstate t rand target\nstate d rand\n"
      "edge m d\nedge m t\nedge t t 1\nedge d d 1\n");
  GreedyMaxResult greedy = extract_max_greedy(g, value_iterate(g).valuation, 1e-9);
  CHECK(greedy.strategy.picked(g.id_of("m")) == g.id_of("t"));
  CHECK(greedy.attains_value);
}

TEST_CASE("greedy climbs the ladder before dropping in") {
  GameGraph g = examples::fig1_game(6);
  SolveResult r = value_iterate(g);
  GreedyMaxResult greedy = extract_max_greedy(g, r.valuation, 1e-9);
  for (int i = 0; i < 6; ++i)
    CHECK(greedy.strategy.picked(g.id_of("r_" + std::to_string(i))) ==
          g.id_of("r_" + std::to_string(i + 1)));
  CHECK(greedy.strategy.picked(g.id_of("r_6")) == g.id_of("s_6"));
  CHECK(greedy.attains_value);
}

TEST_CASE("greedy can cycle forever on value-preserving edges") {
  GameGraph g = game_from(kGreedyTrap);
  SolveResult r = value_iterate(g);
  CHECK(r.valuation[g.id_of("a")] == doctest::Approx(1.0));
  GreedyMaxResult greedy = extract_max_greedy(g, r.valuation, 1e-9);
  CHECK(greedy.strategy.picked(g.id_of("a")) == g.id_of("b"));  // first argmax in order
  CHECK(!greedy.attains_value);
  CHECK(greedy.achieved[g.id_of("a")] == doctest::Approx(0.0));
  CHECK(evaluate_strategy_pair(g, greedy.strategy, empty_min(g), g.id_of("a")) == 0);
}

TEST_CASE("value-preserving subgame") {
  GameGraph g = examples::fig1_game(5);
  SolveResult r = value_iterate(g);
  GameGraph h = build_value_preserving_subgame(g, r.valuation);
  for (int i = 0; i < 5; ++i)
    CHECK(h.successors(h.id_of("r_" + std::to_string(i))) ==
          std::vector<StateId>{h.id_of("r_" + std::to_string(i + 1))});
  CHECK(h.successors(h.id_of("r_5")) == std::vector<StateId>{h.id_of("s_5")});
  // random states keep all their edges, value-0 states become self-loops
  CHECK(h.successors(h.id_of("s_3")).size() == 2);
  CHECK(h.successors(h.id_of("s_0")) == std::vector<StateId>{h.id_of("s_0")});
  CHECK(h.successors(h.id_of("t_0")) == std::vector<StateId>{h.id_of("t_0")});
}

TEST_CASE("value-preserving subgame rejects junk valuations") {
  GameGraph g = game_from("state a max\nstate t rand target\nedge a t\nedge t t 1\n");
  CHECK_THROWS_AS(build_value_preserving_subgame(g, Valuation{0.5, 1.0}), NoValuePreservingEdge);
}

TEST_CASE("exact value-preserving subgame carries the martingale") {
  SplitMix64 rng{20250810};
  for (uint64_t seed = 900; seed < 915; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    ExactValuation v = brute_force_value(g);
    GameGraph h = build_value_preserving_subgame(g, v);
    for (int pair = 0; pair < 3; ++pair) {
      MemorylessStrategy sigma = testsupport::random_mixed_strategy(h, Owner::Max, rng);
      MemorylessStrategy pi = testsupport::random_mixed_strategy(h, Owner::Min, rng);
      Chain chain = induced_chain(h, sigma, pi);
      // E[v(X_k)] stays exactly v(X_0) for every horizon
      ExactValuation expect = v;
      for (int k = 1; k <= 12; ++k) {
        ExactValuation next(h.num_states(), Rational(0));
        for (int x = 0; x < chain.size(); ++x)
          for (const auto& [y, p] : chain.rows[x]) next[x] += p * expect[y];
        expect = std::move(next);
        for (StateId s = 0; s < h.num_states(); ++s) CHECK(expect[s] == v[s]);
      }
    }
  }
}

TEST_CASE("stage-switching strategy achieves the value where greedy fails") {
  GameGraph g = game_from(kGreedyTrap);
  StageSwitchingStrategy st = synthesize_max_optimal(g);
  CHECK(evaluate_strategy_pair(g, st, empty_min(g), g.id_of("a")) == 1);
  CHECK(evaluate_strategy_pair(g, st, empty_min(g), g.id_of("b")) == 1);
}

TEST_CASE("stage-switching strategy is optimal on an acyclic game") {
  GameGraph g = game_from(
      "state m max\nstate c rand\nstate t rand target\nstate d rand\n"
      "edge m c\nedge m d\n"
      "edge c t 3/4\nedge c d 1/4\n"
      "edge t t 1\nedge d d 1\n");
  StageSwitchingStrategy st = synthesize_max_optimal(g);
  CHECK(evaluate_strategy_pair(g, st, empty_min(g), g.id_of("m")) == Rational(3, 4));
}

TEST_CASE("stage-switching strategy attains the brute-force value exactly") {
  for (uint64_t seed = 1000; seed < 1030; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    ExactValuation exact = brute_force_value(g);
    StageSwitchingStrategy st = synthesize_max_optimal(g);
    CHECK(worst_case_over_min(g, st) == exact);
  }
}

TEST_CASE("stage horizons reach half the value inside the subgame") {
  GameGraph g = examples::fig1_game(5);
  SolveResult r = value_iterate(g);
  StageSwitchingStrategy st = synthesize_max_optimal(g);
  for (StateId s = 0; s < g.num_states(); ++s) {
    CHECK(st.horizon[s] >= 1);
    if (r.valuation[s] > 1e-9)
      CHECK((st.horizon[s] & (st.horizon[s] - 1)) == 0);  // powers of two
  }
}

TEST_CASE("re-anchoring switches the base strategy at stage boundaries") {
  GameGraph g = game_from(
      "state y rand\nstate x max\nstate t rand target\nstate d rand\n"
      "edge y x 1\nedge x t\nedge x d\nedge t t 1\nedge d d 1\n");
  MemorylessStrategy to_dead{Owner::Max, {{}, {{g.id_of("d"), Rational(1)}}, {}, {}}};
  MemorylessStrategy to_target{Owner::Max, {{}, {{g.id_of("t"), Rational(1)}}, {}, {}}};

  StageSwitchingStrategy st;
  st.base = to_dead;
  st.overrides.emplace(g.id_of("y"), to_target);
  st.horizon = {2, 1, 1, 1};
  // horizon 2 at the y anchor: x is still played under the y override
  CHECK(evaluate_strategy_pair(g, st, empty_min(g), g.id_of("y")) == 1);

  st.horizon = {1, 1, 1, 1};
  // horizon 1: the stage ends on arrival at x, which re-anchors to the base
  CHECK(evaluate_strategy_pair(g, st, empty_min(g), g.id_of("y")) == 0);

  RunOutcome run = sample_run(g, st, empty_min(g), g.id_of("y"), 7, 100);
  CHECK(!run.reached);
  st.horizon = {2, 1, 1, 1};
  run = sample_run(g, st, empty_min(g), g.id_of("y"), 7, 100);
  CHECK(run.reached);
}

TEST_CASE("evaluate_strategy_pair basics and errors") {
  GameGraph g = game_from("state t rand target\nedge t t 1\n");
  MemorylessStrategy none_max{Owner::Max, {{}}}, none_min{Owner::Min, {{}}};
  CHECK(evaluate_strategy_pair(g, none_max, none_min, 0) == 1);

  GameGraph h = game_from("state m max\nstate t rand target\nedge m t\nedge t t 1\n");
  MemorylessStrategy incomplete{Owner::Max, {{}, {}}};
  MemorylessStrategy pi{Owner::Min, {{}, {}}};
  CHECK_THROWS_AS(evaluate_strategy_pair(h, incomplete, pi, 0), IncompleteStrategy);
}

TEST_CASE("push-then-stop strategies on fig2 match the closed form") {
  Unrolled u = unroll(examples::fig2_automaton(), 20, BoundaryPolicy::Losing);
  const GameGraph& g = u.game;
  MemorylessStrategy pi{Owner::Min, {}};
  pi.choice.resize(g.num_states());
  for (int n : {2, 3, 5}) {
    std::vector<int> pick(g.num_states(), 0);
    for (int i = 1; i < 20; ++i)
      if (i >= n) pick[u.state_of(0, i)] = 1;  // edge order at s_i: u first, r second
    MemorylessStrategy sigma = MemorylessStrategy::pure(g, Owner::Max, pick);
    Rational value = evaluate_strategy_pair(g, sigma, pi, u.state_of(0, 1));
    BigInt two_n = BigInt(1) << n;
    Rational p_n(two_n / 2, two_n - 1);
    CHECK(value == 1 - p_n / 2);
  }
}

TEST_CASE("loss is zero for value-preserving play") {
  GameGraph g = examples::fig1_game(4);
  SolveResult r = value_iterate(g);
  // climbing keeps the value constant, dropping at the top is forced
  GreedyMaxResult greedy = extract_max_greedy(g, r.valuation, 1e-9);
  LossStats stats = loss_stats(g, r.valuation, greedy.strategy, empty_min(g), g.id_of("r_0"));
  CHECK(stats.expected_loss == 0.0);
  CHECK(stats.prob_positive_loss == 0.0);
}

TEST_CASE("gambling immediately realizes the full loss on fig2") {
  Unrolled u = unroll(examples::fig2_automaton(), 20, BoundaryPolicy::Losing);
  const GameGraph& g = u.game;
  SolveResult r = value_iterate(g);
  std::vector<int> pick(g.num_states(), 0);
  for (int i = 1; i < 20; ++i) pick[u.state_of(0, i)] = 1;  // always gamble
  MemorylessStrategy sigma = MemorylessStrategy::pure(g, Owner::Max, pick);
  MemorylessStrategy pi{Owner::Min, {}};
  pi.choice.resize(g.num_states());
  StateId s1 = u.state_of(0, 1);
  LossStats stats = loss_stats(g, r.valuation, sigma, pi, s1);
  CHECK(stats.prob_positive_loss == 1.0);
  CHECK(stats.expected_loss == r.valuation[s1]);
}

TEST_CASE("loss probability follows the chain mass reaching the bad edge") {
  GameGraph g = game_from(
      "state c rand\nstate m max\nstate t rand target\nstate d rand\n"
      "edge c m 1/2\nedge c t 1/2\n"
      "edge m t\nedge m d\n"
      "edge t t 1\nedge d d 1\n");
  SolveResult r = value_iterate(g);
  MemorylessStrategy sigma{Owner::Max, {{}, {{g.id_of("d"), Rational(1)}}, {}, {}}};
  LossStats stats = loss_stats(g, r.valuation, sigma, empty_min(g), g.id_of("c"));
  CHECK(stats.prob_positive_loss == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stats.expected_loss == doctest::Approx(0.5).epsilon(1e-12));  // v(m) = 1
}

TEST_CASE("switching to value-preserving play loses at most the expected loss") {
  SplitMix64 rng{77};
  for (uint64_t seed = 1100; seed < 1120; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    SolveResult r = value_iterate(g);
    REQUIRE(r.converged);
    MemorylessStrategy pi = extract_min_optimal(g, r.valuation);
    StageSwitchingStrategy preserving = synthesize_max_optimal(g);
    MemorylessStrategy sigma = testsupport::random_pure_strategy(g, Owner::Max, rng);

    // sigma with every value-decreasing choice replaced by the preserving one
    MemorylessStrategy repaired = sigma;
    for (StateId s = 0; s < g.num_states(); ++s) {
      if (g.owner(s) != Owner::Max) continue;
      if (r.valuation[s] > r.valuation[sigma.picked(s)] + 1e-9)
        repaired.choice[s] = preserving.base.choice[s];
    }

    for (StateId s = 0; s < g.num_states(); ++s) {
      LossStats stats = loss_stats(g, r.valuation, sigma, pi, s);
      double drop = to_double(evaluate_strategy_pair(g, sigma, pi, s)) -
                    to_double(evaluate_strategy_pair(g, repaired, pi, s));
      CHECK(drop <= stats.expected_loss + 1e-9);
    }
  }
}

TEST_CASE("value gap") {
  CHECK(value_gap(Valuation{1.0, 0.75, 0.625, 0.0}, 0.5) == doctest::Approx(0.125));
  CHECK(std::isinf(value_gap(Valuation{0.3, 0.3, 0.3}, 0.1)));
  CHECK(value_gap(Valuation{1.0, 0.0}, 0.5) == doctest::Approx(1.0));
  CHECK(value_gap_exact(ExactValuation{Rational(1), Rational(3, 4), Rational(5, 8), Rational(0)},
                        Rational(1, 2)) == Rational(1, 8));
  CHECK(!value_gap_exact(ExactValuation{Rational(1, 3), Rational(1, 3)}, Rational(1, 10))
             .has_value());
}

TEST_CASE("star-condition profile counts clustered values above each epsilon") {
  Valuation v;
  for (int i = 0; i <= 30; ++i) v.push_back((std::ldexp(1.0, i) + 1) / std::ldexp(1.0, i + 1));
  v.push_back(0.0);
  v.push_back(1.0);

  StarConditionReport report = check_star_condition(v, {0.6, 0.5001, 0.25});
  CHECK(report.rows[0].distinct_count == 3);  // 1, 3/4, 5/8

  // independent count: distinct values >= 0.5001 with the same clustering
  int expected = 0;
  double prev = -1;
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  for (double x : sorted) {
    if (prev >= 0 && x - prev <= 1e-9) {
      prev = x;
      continue;
    }
    if (x >= 0.5001) ++expected;
    prev = x;
  }
  CHECK(report.rows[1].distinct_count == expected);
  CHECK(expected == 13);
  CHECK(report.rows[2].distinct_count > report.rows[0].distinct_count);
  CHECK(report.rows[1].min_gap == doctest::Approx(std::ldexp(1.0, -14)));
}

TEST_CASE("values nearer than the cluster tolerance merge") {
  StarConditionReport report = check_star_condition({0.5, 0.5 + 1e-12, 0.9}, {0.1});
  CHECK(report.rows[0].distinct_count == 2);
}

TEST_CASE("threshold winner trivia") {
  GameGraph g = game_from("state t rand target\nedge t t 1\n");
  ThresholdVerdict v = threshold_winner(g, {0, 1.0, Relation::GreaterEqual});
  CHECK(v.winner == Winner::Max);
  CHECK(v.max_witness.has_value());

  GameGraph h = game_from(
      "state n min\nstate t rand target\nstate d rand\n"
      "edge n t\nedge n d\nedge t t 1\nedge d d 1\n");
  ThresholdVerdict safe = threshold_winner(h, {h.id_of("n"), 0.0, Relation::Greater});
  CHECK(safe.winner == Winner::Min);
  REQUIRE(safe.min_witness.has_value());
  CHECK(safe.min_witness->picked(h.id_of("n")) == h.id_of("d"));
  CHECK(evaluate_strategy_pair(
            h, MemorylessStrategy{Owner::Max, {{}, {}, {}}}, *safe.min_witness, h.id_of("n")) ==
        0);
}

TEST_CASE("threshold on a fig2 truncation: lower bound already beats 0.7") {
  Unrolled u = unroll(examples::fig2_automaton(), 32, BoundaryPolicy::Losing);
  ThresholdVerdict v =
      threshold_winner(u.game, {u.state_of(0, 1), 0.7, Relation::GreaterEqual});
  CHECK(v.winner == Winner::Max);
  CHECK(v.value > 0.74);
}

TEST_CASE("strict threshold at the exact value is ambiguous and goes to Min") {
  GameGraph g = game_from(
      "state c rand\nstate t rand target\nstate d rand\n"
      "edge c t 1/2\nedge c d 1/2\nedge t t 1\nedge d d 1\n");
  ThresholdVerdict v = threshold_winner(g, {g.id_of("c"), 0.5, Relation::Greater});
  CHECK(v.winner == Winner::Min);
  CHECK(v.ambiguous);
  ThresholdVerdict w = threshold_winner(g, {g.id_of("c"), 0.5, Relation::GreaterEqual});
  CHECK(w.winner == Winner::Max);
  CHECK(!w.ambiguous);
}

TEST_CASE("threshold verdicts agree with brute force on random games") {
  for (uint64_t seed = 1200; seed < 1215; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    ExactValuation exact = brute_force_value(g);
    for (StateId s = 0; s < g.num_states(); ++s)
      for (int tenth = 0; tenth <= 10; ++tenth) {
        double nu = tenth / 10.0;
        Rational nu_exact(tenth, 10);
        ThresholdVerdict ge = threshold_winner(g, {s, nu, Relation::GreaterEqual});
        CHECK((ge.winner == Winner::Max) == (exact[s] >= nu_exact));
        ThresholdVerdict gt = threshold_winner(g, {s, nu, Relation::Greater});
        CHECK((gt.winner == Winner::Max) == (exact[s] > nu_exact));
      }
  }
}

TEST_CASE("strategy serialization round-trips") {
  GameGraph g = examples::fig1_game(3);
  SolveResult r = value_iterate(g);
  MemorylessStrategy greedy = extract_max_greedy(g, r.valuation, 1e-9).strategy;
  std::ostringstream text;
  write_strategy(g, greedy, text);
  std::istringstream in(text.str());
  ParsedStrategy parsed = parse_strategy(g, Owner::Max, in);
  CHECK(!parsed.stage.has_value());
  CHECK(parsed.memoryless.choice == greedy.choice);

  StageSwitchingStrategy st = synthesize_max_optimal(g);
  std::ostringstream stage_text;
  write_strategy(g, st, stage_text);
  std::istringstream in2(stage_text.str());
  ParsedStrategy parsed2 = parse_strategy(g, Owner::Max, in2);
  REQUIRE(parsed2.stage.has_value());
  CHECK(parsed2.stage->base.choice == st.base.choice);
  CHECK(parsed2.stage->horizon == st.horizon);
}

TEST_CASE("extracted Min strategy only uses value-preserving edges") {
  for (uint64_t seed = 1300; seed < 1320; ++seed) {
    GameGraph g = testsupport::random_game(seed);
    SolveResult r = value_iterate(g);
    MemorylessStrategy pi = extract_min_optimal(g, r.valuation);
    for (StateId s = 0; s < g.num_states(); ++s)
      if (g.owner(s) == Owner::Min)
        CHECK(std::abs(r.valuation[s] - r.valuation[pi.picked(s)]) <= 1e-9);
  }
}
