#include "rsg/chain.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace rsg {

std::vector<std::vector<Rational>> absorption_probabilities_multi(
    const Chain& chain, const std::vector<std::vector<int>>& classes) {
  const int n = chain.size();
  const int k = static_cast<int>(classes.size());
  std::vector<int> cls(n, -1);
  for (int c = 0; c < k; ++c)
    for (int u : classes[c]) cls[u] = c;

  // Backward reachability: which states have any path into some class.
  std::vector<std::vector<int>> rev(n);
  for (int u = 0; u < n; ++u) {
    if (cls[u] >= 0) continue;  // absorbing, row ignored
    for (const auto& [v, p] : chain.rows[u])
      if (p > 0) rev[v].push_back(u);
  }
  std::vector<bool> can_reach(n, false);
  std::deque<int> queue;
  for (int u = 0; u < n; ++u)
    if (cls[u] >= 0) {
      can_reach[u] = true;
      queue.push_back(u);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : rev[v])
      if (!can_reach[u]) {
        can_reach[u] = true;
        queue.push_back(u);
      }
  }

  std::vector<int> unknown;  // can reach a class but is in none
  std::vector<int> col(n, -1);
  for (int u = 0; u < n; ++u)
    if (can_reach[u] && cls[u] < 0) {
      col[u] = static_cast<int>(unknown.size());
      unknown.push_back(u);
    }
  const int m = static_cast<int>(unknown.size());

  // (I - Q) X = B over the unknown block; transitions into the never-reach
  // part contribute 0 and are dropped.
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
  std::vector<std::vector<Rational>> b(m, std::vector<Rational>(k, Rational(0)));
  for (int i = 0; i < m; ++i) {
    int u = unknown[i];
    a[i][i] = 1;
    for (const auto& [v, p] : chain.rows[u]) {
      if (cls[v] >= 0)
        b[i][cls[v]] += p;
      else if (col[v] >= 0)
        a[i][col[v]] -= p;
    }
  }

  for (int d = 0; d < m; ++d) {
    int pivot = -1;
    for (int r = d; r < m; ++r)
      if (a[r][d] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) throw SingularSystem("absorbing chain system is singular");
    std::swap(a[d], a[pivot]);
    std::swap(b[d], b[pivot]);
    for (int r = d + 1; r < m; ++r) {
      if (a[r][d] == 0) continue;
      Rational f = a[r][d] / a[d][d];
      a[r][d] = 0;
      for (int c = d + 1; c < m; ++c)
        if (a[d][c] != 0) a[r][c] -= f * a[d][c];
      for (int c = 0; c < k; ++c)
        if (b[d][c] != 0) b[r][c] -= f * b[d][c];
    }
  }
  std::vector<std::vector<Rational>> x(m, std::vector<Rational>(k, Rational(0)));
  for (int d = m - 1; d >= 0; --d) {
    for (int c = 0; c < k; ++c) {
      Rational acc = b[d][c];
      for (int j = d + 1; j < m; ++j)
        if (a[d][j] != 0 && x[j][c] != 0) acc -= a[d][j] * x[j][c];
      x[d][c] = acc / a[d][d];
    }
  }

  std::vector<std::vector<Rational>> out(k, std::vector<Rational>(n, Rational(0)));
  for (int u = 0; u < n; ++u) {
    if (cls[u] >= 0)
      out[cls[u]][u] = 1;
    else if (col[u] >= 0)
      for (int c = 0; c < k; ++c) out[c][u] = x[col[u]][c];
  }
  return out;
}

std::vector<Rational> absorption_probabilities(const Chain& chain) {
  std::vector<int> targets;
  for (int u = 0; u < chain.size(); ++u)
    if (chain.target[u]) targets.push_back(u);
  return absorption_probabilities_multi(chain, {targets})[0];
}

namespace {

void require_coverage(const GameGraph& g, const MemorylessStrategy& s, const char* who) {
  if (!s.covers(g)) throw IncompleteStrategy(std::string(who) + " strategy incomplete");
}

std::vector<std::pair<int, Rational>> row_for(const GameGraph& g,
                                              const MemorylessStrategy& sigma,
                                              const MemorylessStrategy& pi, StateId s) {
  std::vector<std::pair<int, Rational>> row;
  switch (g.owner(s)) {
    case Owner::Random:
      for (size_t i = 0; i < g.successors(s).size(); ++i)
        row.emplace_back(g.successors(s)[i], g.weights(s)[i]);
      break;
    case Owner::Max:
      for (const auto& [dst, w] : sigma.choice[s]) row.emplace_back(dst, w);
      break;
    case Owner::Min:
      for (const auto& [dst, w] : pi.choice[s]) row.emplace_back(dst, w);
      break;
  }
  return row;
}

}  // namespace

Chain induced_chain(const GameGraph& g, const MemorylessStrategy& sigma,
                    const MemorylessStrategy& pi) {
  require_coverage(g, sigma, "Max");
  require_coverage(g, pi, "Min");
  Chain chain;
  chain.rows.resize(g.num_states());
  chain.target.assign(g.num_states(), false);
  for (StateId s = 0; s < g.num_states(); ++s) {
    chain.target[s] = g.is_target(s);
    chain.rows[s] = row_for(g, sigma, pi, s);
  }
  return chain;
}

ProductChain product_chain(const GameGraph& g, const StageSwitchingStrategy& sigma,
                           const MemorylessStrategy& pi, long hard_cap) {
  require_coverage(g, sigma.base, "Max");
  for (const auto& [anchor, tau] : sigma.overrides) {
    (void)anchor;
    require_coverage(g, tau, "Max");
  }
  require_coverage(g, pi, "Min");
  if (static_cast<int>(sigma.horizon.size()) != g.num_states())
    throw IncompleteStrategy("stage horizons not defined on all states");
  for (long h : sigma.horizon)
    if (h < 1) throw IncompleteStrategy("stage horizon below 1");

  ProductChain product;

  if (sigma.shared_base()) {
    // Every anchor plays the same base strategy, so the memory never affects
    // a move and the product collapses to the plain induced chain.
    product.chain = induced_chain(g, sigma.base, pi);
    product.game_state.resize(g.num_states());
    product.start_index.resize(g.num_states());
    for (StateId s = 0; s < g.num_states(); ++s) {
      product.game_state[s] = s;
      product.start_index[s] = s;
    }
    return product;
  }

  using Key = std::tuple<StateId, StateId, long>;  // (state, anchor, remaining)
  std::map<Key, int> index;
  std::vector<Key> keys;
  auto normalize = [&](StateId state, StateId anchor, long remaining) -> Key {
    if (remaining <= 0) return {state, state, sigma.horizon[state]};
    return {state, anchor, remaining};
  };
  auto intern = [&](const Key& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(keys.size());
    if (id >= hard_cap) throw TooLarge("product chain exceeds the state cap");
    index.emplace(k, id);
    keys.push_back(k);
    return id;
  };

  product.start_index.assign(g.num_states(), -1);
  for (StateId s = 0; s < g.num_states(); ++s)
    product.start_index[s] = intern(normalize(s, s, sigma.horizon[s]));

  // intern() appends, so this loop also expands every state it discovers
  for (int id = 0; id < static_cast<int>(keys.size()); ++id) {
    auto [state, anchor, remaining] = keys[id];
    if (g.is_target(state)) continue;
    for (const auto& [dst, p] : row_for(g, sigma.tau(anchor), pi, state)) {
      (void)p;
      intern(normalize(dst, anchor, remaining - 1));
    }
  }

  const int n = static_cast<int>(keys.size());
  product.chain.rows.resize(n);
  product.chain.target.assign(n, false);
  product.game_state.resize(n);
  for (int id = 0; id < n; ++id) {
    auto [state, anchor, remaining] = keys[id];
    product.game_state[id] = state;
    product.chain.target[id] = g.is_target(state);
    if (product.chain.target[id]) {
      product.chain.rows[id] = {{id, Rational(1)}};
      continue;
    }
    for (const auto& [dst, p] : row_for(g, sigma.tau(anchor), pi, state))
      product.chain.rows[id].emplace_back(index.at(normalize(dst, anchor, remaining - 1)), p);
  }
  return product;
}

int ProductChain::start_of(StateId s) const {
  if (s < 0 || s >= static_cast<int>(start_index.size()) || start_index[s] < 0)
    throw InvariantBroken("product chain has no start for this state");
  return start_index[s];
}

}  // namespace rsg
