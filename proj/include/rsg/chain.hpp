#pragma once

#include <string>
#include <vector>

#include "rsg/game.hpp"
#include "rsg/strategy_types.hpp"

namespace rsg {

/// A finite absorbing Markov chain with exact transition probabilities.
struct Chain {
  // rows[i]: sparse outgoing distribution of state i, weights sum to 1
  std::vector<std::vector<std::pair<int, Rational>>> rows;
  std::vector<bool> target;

  int size() const { return static_cast<int>(rows.size()); }
};

/**
 * Exact probability, per chain state, of eventually visiting a target state.
 * States of the closed "never reaches a target" part get exactly 0; the
 * remaining linear system is solved by Gaussian elimination over rationals.
 */
std::vector<Rational> absorption_probabilities(const Chain& chain);

/**
 * Exact hitting probability of each of several disjoint state classes; the
 * classes are treated as absorbing (their own outgoing rows are ignored).
 * One elimination serves all classes. chain.target plays no role here.
 */
std::vector<std::vector<Rational>> absorption_probabilities_multi(
    const Chain& chain, const std::vector<std::vector<int>>& classes);

/// The chain induced on g by a complete memoryless strategy pair.
/// Chain state i corresponds to game state i.
Chain induced_chain(const GameGraph& g, const MemorylessStrategy& sigma,
                    const MemorylessStrategy& pi);

/**
 * The product of g with the stage-switching memory of sigma under a
 * memoryless Min strategy pi. Product states are (game state, anchor,
 * remaining) tuples in normalized form (remaining >= 1 unless absorbed).
 */
struct ProductChain {
  Chain chain;
  std::vector<StateId> game_state;  // per product state
  /// Product index of the fresh start (s, s, horizon[s]).
  int start_of(StateId s) const;
  std::vector<int> start_index;  // per game state, -1 if not materialized
};

/// hard_cap guards against runaway memory; crossing it throws TooLarge.
ProductChain product_chain(const GameGraph& g, const StageSwitchingStrategy& sigma,
                           const MemorylessStrategy& pi, long hard_cap = 10'000'000);

}  // namespace rsg
