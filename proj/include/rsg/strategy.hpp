#pragma once

#include <limits>
#include <optional>

#include "rsg/bellman.hpp"
#include "rsg/game.hpp"
#include "rsg/strategy_types.hpp"

namespace rsg {

/**
 * Optimal Min strategy read off a fixed-point valuation: at every Min state
 * the first successor (declaration order) minimizing v. Rejects valuations
 * whose Bellman residual exceeds `residual_tol`.
 */
MemorylessStrategy extract_min_optimal(const GameGraph& g, const Valuation& v,
                                       double residual_tol = 1e-9);

/**
 * Greedy argmax strategy for Max, first-maximal successor in declaration
 * order. Greedy play can cycle through value-preserving edges without ever
 * approaching a target, so the result carries its adversarially evaluated
 * achieved valuation and an attains_value flag (achieved >= v - epsilon
 * everywhere). Stage switching (synthesize_max_optimal) repairs the gap.
 */
struct GreedyMaxResult {
  MemorylessStrategy strategy;
  Valuation achieved;  // worst-case value of the fixed strategy
  bool attains_value = false;
};
GreedyMaxResult extract_max_greedy(const GameGraph& g, const Valuation& v, double epsilon);

/**
 * The subgame keeping only value-preserving player edges: value-0 states
 * become absorbing self-loops, Random states with positive value keep all
 * edges, Max/Min states with positive value keep exactly the edges whose
 * endpoint values differ by at most gap_tol (exactly, in the rational
 * overload). Throws NoValuePreservingEdge if a retained player state would
 * lose all its edges, which signals a non-converged valuation.
 */
GameGraph build_value_preserving_subgame(const GameGraph& g, const Valuation& v,
                                         double gap_tol = 1e-9);
GameGraph build_value_preserving_subgame(const GameGraph& g, const ExactValuation& v);

/**
 * Optimal Max strategy as a stage-switching composition. Computes the value,
 * builds the value-preserving subgame H, fixes one memoryless base strategy
 * tau inside H (greedy over value-preserving successors, ties broken towards
 * smaller positive-attractor rank, then declaration order), and finds for
 * every positive-value state s a horizon n_s, doubling 1, 2, 4, ... up to
 * 2^20, such that tau reaches a target from s within n_s steps with
 * worst-case probability at least v(s)/2. On finite games the composition
 * achieves the value exactly.
 */
StageSwitchingStrategy synthesize_max_optimal(const GameGraph& g, const SolveConfig& cfg = {});

/// Exact reach probability from s under the pair; product chain semantics
/// for stage strategies (fresh anchor at s).
Rational evaluate_strategy_pair(const GameGraph& g, const MemorylessStrategy& sigma,
                                const MemorylessStrategy& pi, StateId s);
Rational evaluate_strategy_pair(const GameGraph& g, const StageSwitchingStrategy& sigma,
                                const MemorylessStrategy& pi, StateId s);

/**
 * Loss diagnostics of a strategy pair started in s. A run loses at the
 * first transition leaving a Max state towards a strictly smaller value;
 * the loss is the value of that Max state, 0 when no such transition ever
 * happens. First-passage probabilities over the value-decreasing edges are
 * computed exactly on the product chain and combined with v.
 */
struct LossStats {
  double expected_loss = 0.0;
  double prob_positive_loss = 0.0;
};
LossStats loss_stats(const GameGraph& g, const Valuation& v, const MemorylessStrategy& sigma,
                     const MemorylessStrategy& pi, StateId s, double gap_tol = 1e-9);
LossStats loss_stats(const GameGraph& g, const Valuation& v, const StageSwitchingStrategy& sigma,
                     const MemorylessStrategy& pi, StateId s, double gap_tol = 1e-9);

/**
 * Minimum difference between distinct values over pairs whose larger side
 * is at least eps; +infinity when no pair qualifies. Values closer than
 * cluster_tol are treated as one.
 */
double value_gap(const Valuation& v, double eps, double cluster_tol = 1e-9);
/// Exact variant; nullopt is the "no qualifying pair" sentinel.
std::optional<Rational> value_gap_exact(const ExactValuation& v, const Rational& eps);

/// Distinct-value profile over an epsilon grid, for accumulation diagnostics.
struct StarConditionReport {
  struct Row {
    double epsilon = 0.0;
    int distinct_count = 0;  // clustered values >= epsilon
    double min_gap = std::numeric_limits<double>::infinity();
  };
  std::vector<Row> rows;
  double cluster_tolerance = 1e-9;
};
StarConditionReport check_star_condition(const Valuation& v, const std::vector<double>& eps_grid,
                                         double cluster_tol = 1e-9);

enum class Relation { GreaterEqual, Greater };
enum class Winner { Max, Min };

struct ThresholdQuery {
  StateId state = 0;
  double nu = 0.0;
  Relation rel = Relation::GreaterEqual;
};

/**
 * Winner of the threshold comparison Pr |> nu from the queried state, with a
 * witness strategy. Max wins >= iff v(s) >= nu and > iff v(s) > nu; the Max
 * witness is the stage-switching optimal strategy, the Min witness the
 * extracted optimal Min strategy (the safe-set strategy when nu = v(s) = 0).
 * A strict query with |v(s) - nu| inside the numeric tolerance is resolved
 * as if v(s) = nu and flagged ambiguous instead of guessed.
 */
struct ThresholdVerdict {
  ThresholdQuery query;
  Winner winner = Winner::Min;
  double value = 0.0;
  bool ambiguous = false;
  std::optional<StageSwitchingStrategy> max_witness;
  std::optional<MemorylessStrategy> min_witness;
};
ThresholdVerdict threshold_winner(const GameGraph& g, const ThresholdQuery& q,
                                  const SolveConfig& cfg = {}, double ambiguity_tol = 1e-9);

}  // namespace rsg
