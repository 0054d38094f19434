#pragma once

#include "rsg/game.hpp"
#include "rsg/ocssg.hpp"

namespace rsg {
namespace examples {

/**
 * The ladder game `fig1`, truncated at index `depth`: Max states r_i feed a
 * chain of random states s_i that walk down towards the single target t_0
 * through t_i relays. val(s_i) = 1 - 2^-i, and every r_i is worth
 * 1 - 2^-depth because climbing the ladder before dropping in pays off.
 * The topmost rung is forced to drop: r_depth -> s_depth is its only edge.
 */
GameGraph fig1_game(int depth);

/**
 * The one-counter automaton `fig2`: a Max control s choosing between a
 * counter random walk (through u and d) and a one-shot gamble r between a
 * surely-terminating control z and a diverging control t. Termination
 * values from s accumulate at 1/2 as the counter grows.
 */
OCAutomaton fig2_automaton();

/// One gambling action: a distribution over integer wealth changes.
struct SolvencyAction {
  std::vector<std::pair<int, Rational>> outcomes;  // (delta, probability)
};

/**
 * A gambler repeatedly picking one of the actions until the wealth counter
 * hits 0: one Max choice control with a 0-rule into one random control per
 * action, which realizes its distribution back into the choice control.
 * Deltas beyond one unit are compiled into chains of intermediate controls.
 * The rule graph is strongly connected by construction.
 */
OCAutomaton solvency_automaton(const std::vector<SolvencyAction>& actions);

}  // namespace examples
}  // namespace rsg
