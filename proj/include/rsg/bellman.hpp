#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rsg/chain.hpp"
#include "rsg/game.hpp"
#include "rsg/strategy_types.hpp"

namespace rsg {

/// Per-state value in [0,1]; float working mode.
using Valuation = std::vector<double>;
/// Per-state value in [0,1]; exact rational mode.
using ExactValuation = std::vector<Rational>;

ExactValuation to_exact(const Valuation& v);
Valuation to_double(const ExactValuation& v);

struct SolveConfig {
  double tolerance = 1e-12;          // sup-norm residual
  long max_iterations = 10'000'000;  // iteration cap
  enum class Mode {
    Float,
    // Exact rational solve; only valid when the game has no player states,
    // i.e. both players' choices are already fixed.
    ExactChain,
  };
  Mode mode = Mode::Float;
};

struct SolveResult {
  Valuation valuation;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;  // residual <= tolerance
  std::optional<ExactValuation> exact;  // Mode::ExactChain only
};

/**
 * One application of the reachability Bellman functional:
 * 1 on targets, sup over successors at Max states, inf at Min states,
 * the weighted successor average at Random states.
 */
Valuation bellman_apply(const GameGraph& g, const Valuation& f);

/**
 * Iterates the Bellman functional from the all-zero valuation until the
 * sup-norm change drops to cfg.tolerance; the iterates increase pointwise
 * towards the least fixed point, which is the value of the game.
 *
 * Hitting the iteration cap is not an error: the partial result is returned
 * with converged = false.
 */
SolveResult value_iterate(const GameGraph& g, const SolveConfig& cfg = {});

/// Exact reachability probabilities of the chain induced by a complete
/// memoryless strategy pair.
ExactValuation solve_chain_exact(const GameGraph& g, const MemorylessStrategy& sigma,
                                 const MemorylessStrategy& pi);
/// Stage-switching variant; value at s is taken from a fresh start in s.
ExactValuation solve_chain_exact(const GameGraph& g, const StageSwitchingStrategy& sigma,
                                 const MemorylessStrategy& pi);

/// All deterministic memoryless strategies of one player, in lexicographic
/// declaration order. Throws TooLarge past `limit`.
std::vector<MemorylessStrategy> enumerate_pure_strategies(const GameGraph& g, Owner player,
                                                          long limit = 1'000'000);

/**
 * Exact game value by exhaustive minimax over deterministic memoryless
 * strategy pairs; intended as an oracle for small games. Rejects games with
 * more than pair_limit strategy pairs. The max-min and min-max values are
 * computed independently and must agree exactly.
 */
ExactValuation brute_force_value(const GameGraph& g, long pair_limit = 1'000'000);

/// `state<TAB>value<TAB>residual` rows; 17 significant digits.
void write_solve_result(const GameGraph& g, const SolveResult& r, std::ostream& out);

}  // namespace rsg
