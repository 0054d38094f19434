#pragma once

#include "rsg/game.hpp"
#include "rsg/strategy_types.hpp"

namespace rsg {

/**
 * States from which Max can force a positive probability of reaching the
 * given set against every Min strategy: the least fixed point containing
 * targetSet, closed by Max/Random states with some successor inside and
 * Min states with all successors inside.
 */
StateSet positive_attractor_max(const GameGraph& g, const StateSet& targetSet);

/// Per-state ranks of the attractor computation: rank 0 on targetSet, else
/// the stage at which the state entered the attractor, -1 outside. Rank k
/// states have a successor of rank < k (all successors, for Min states).
std::vector<int> positive_attractor_ranks(const GameGraph& g, const StateSet& targetSet);

/**
 * Complement of the positive attractor of the target set: the states where
 * Min can keep the probability of reaching a target at exactly 0. On finite
 * games these are exactly the value-0 states.
 */
StateSet safe_states(const GameGraph& g);

/**
 * A partial memoryless Min strategy defined on safe Min states, picking the
 * first safe successor in declaration order. The safe set is closed under
 * its choices, so every safe state keeps probability exactly 0 of reaching
 * a target against every Max strategy.
 */
MemorylessStrategy safe_strategy_min(const GameGraph& g, const StateSet& safe);

}  // namespace rsg
