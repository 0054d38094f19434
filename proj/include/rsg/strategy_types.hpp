#pragma once

#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "rsg/game.hpp"

namespace rsg {

/**
 * A memoryless strategy for one player: a distribution over outgoing edges
 * at every state that player owns. choice[s] is empty exactly when s is not
 * owned; weights are exact rationals summing to 1.
 */
struct MemorylessStrategy {
  Owner player = Owner::Max;
  std::vector<std::vector<std::pair<StateId, Rational>>> choice;

  bool covers(const GameGraph& g) const;
  /// The unique successor at s; requires a deterministic choice there.
  StateId picked(StateId s) const;

  /// Deterministic strategy from per-state successor indices
  /// (edge_index[s] indexes into g.successors(s); ignored on unowned states).
  static MemorylessStrategy pure(const GameGraph& g, Owner player,
                                 const std::vector<int>& edge_index);
};

/**
 * Finite-memory strategy for Max that re-anchors in stages. The memory is a
 * pair (anchor, remaining): play follows tau(anchor); remaining counts steps
 * down and on reaching 0 the anchor resets to the current state with
 * remaining = horizon[current].
 *
 * The base strategy is shared by all anchors unless an override is present;
 * only override-free strategies have a textual form.
 */
struct StageSwitchingStrategy {
  MemorylessStrategy base;
  std::map<StateId, MemorylessStrategy> overrides;
  std::vector<long> horizon;  // per anchor state, >= 1

  const MemorylessStrategy& tau(StateId anchor) const {
    auto it = overrides.find(anchor);
    return it == overrides.end() ? base : it->second;
  }
  bool shared_base() const { return overrides.empty(); }
};

/// Lines `choose <state> <successor> [<num>/<den>]`, one per support edge.
void write_strategy(const GameGraph& g, const MemorylessStrategy& s, std::ostream& out);
/// `stage <state> <horizon>` headers followed by the base strategy.
void write_strategy(const GameGraph& g, const StageSwitchingStrategy& s, std::ostream& out);

/// Either form, detected by the presence of stage headers. Deterministic
/// single-successor states may be omitted from the file.
struct ParsedStrategy {
  MemorylessStrategy memoryless;
  std::optional<StageSwitchingStrategy> stage;
};
ParsedStrategy parse_strategy(const GameGraph& g, Owner player, std::istream& in);

}  // namespace rsg
