#include "rsg/qualitative.hpp"

#include <deque>

namespace rsg {

std::vector<int> positive_attractor_ranks(const GameGraph& g, const StateSet& targetSet) {
  const int n = g.num_states();
  if (static_cast<int>(targetSet.size()) != n)
    throw DomainMismatch("state set does not match the game");

  std::vector<std::vector<StateId>> pred(n);
  std::vector<int> unseen_succ(n, 0);  // Min states: successors still outside
  for (StateId s = 0; s < n; ++s) {
    unseen_succ[s] = static_cast<int>(g.successors(s).size());
    for (StateId t : g.successors(s)) pred[t].push_back(s);
  }

  std::vector<int> rank(n, -1);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s)
    if (targetSet[s]) {
      rank[s] = 0;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    StateId t = queue.front();
    queue.pop_front();
    for (StateId s : pred[t]) {
      if (rank[s] >= 0) continue;
      --unseen_succ[s];
      bool enters = g.owner(s) == Owner::Min ? unseen_succ[s] == 0 : true;
      if (enters) {
        rank[s] = rank[t] + 1;
        queue.push_back(s);
      }
    }
  }
  return rank;
}

StateSet positive_attractor_max(const GameGraph& g, const StateSet& targetSet) {
  auto rank = positive_attractor_ranks(g, targetSet);
  StateSet in(g.num_states(), false);
  for (StateId s = 0; s < g.num_states(); ++s) in[s] = rank[s] >= 0;
  return in;
}

StateSet safe_states(const GameGraph& g) {
  StateSet att = positive_attractor_max(g, g.targets());
  StateSet safe(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) safe[s] = !att[s];
  return safe;
}

MemorylessStrategy safe_strategy_min(const GameGraph& g, const StateSet& safe) {
  if (static_cast<int>(safe.size()) != g.num_states())
    throw DomainMismatch("state set does not match the game");
  MemorylessStrategy pi;
  pi.player = Owner::Min;
  pi.choice.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Min || !safe[s]) continue;
    bool found = false;
    for (StateId t : g.successors(s)) {
      if (safe[t]) {
        pi.choice[s] = {{t, Rational(1)}};
        found = true;
        break;
      }
    }
    if (!found)
      throw InvariantBroken("safe Min state '" + g.name(s) + "' has no safe successor");
  }
  return pi;
}

}  // namespace rsg
