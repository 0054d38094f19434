#include "rsg/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rsg/qualitative.hpp"

namespace rsg {

namespace {

void check_state(const GameGraph& g, StateId s) {
  if (s < 0 || s >= g.num_states())
    throw ValidationError(ValidationErrorKind::UnknownState, "no such state id");
}

double bellman_residual(const GameGraph& g, const Valuation& v) {
  Valuation w = bellman_apply(g, v);
  double r = 0.0;
  for (size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(w[i] - v[i]));
  return r;
}

/// g with every Max (or Min) state reduced to the single successor picked
/// by a deterministic strategy; the opponent keeps all choices.
GameGraph resolve_player(const GameGraph& g, const MemorylessStrategy& s) {
  RawGame raw;
  for (StateId r = 0; r < g.num_states(); ++r)
    raw.states.push_back({g.name(r), g.owner(r), g.is_target(r), 0});
  for (StateId r = 0; r < g.num_states(); ++r) {
    if (g.owner(r) == s.player && !g.is_target(r)) {
      raw.edges.push_back({g.name(r), g.name(s.picked(r)), std::nullopt, 0});
      continue;
    }
    for (size_t i = 0; i < g.successors(r).size(); ++i) {
      RawGame::RawEdge e{g.name(r), g.name(g.successors(r)[i]), std::nullopt, 0};
      if (g.owner(r) == Owner::Random) e.weight = g.weights(r)[i];
      raw.edges.push_back(std::move(e));
    }
  }
  return validate_game(raw);
}

GameGraph build_subgame(const GameGraph& g, const std::function<bool(StateId)>& is_zero,
                        const std::function<bool(StateId, StateId)>& preserves) {
  RawGame raw;
  for (StateId s = 0; s < g.num_states(); ++s)
    raw.states.push_back({g.name(s), g.owner(s), g.is_target(s), 0});
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (is_zero(s)) {
      RawGame::RawEdge loop{g.name(s), g.name(s), std::nullopt, 0};
      if (g.owner(s) == Owner::Random) loop.weight = Rational(1);
      raw.edges.push_back(std::move(loop));
      continue;
    }
    bool kept_any = false;
    for (size_t i = 0; i < g.successors(s).size(); ++i) {
      StateId t = g.successors(s)[i];
      if (g.owner(s) != Owner::Random && !preserves(s, t)) continue;
      RawGame::RawEdge e{g.name(s), g.name(t), std::nullopt, 0};
      if (g.owner(s) == Owner::Random) e.weight = g.weights(s)[i];
      raw.edges.push_back(std::move(e));
      kept_any = true;
    }
    if (!kept_any)
      throw NoValuePreservingEdge("state '" + g.name(s) +
                                  "' has no value-preserving edge; valuation not converged?");
  }
  return validate_game(raw);
}

}  // namespace

MemorylessStrategy extract_min_optimal(const GameGraph& g, const Valuation& v,
                                       double residual_tol) {
  double res = bellman_residual(g, v);
  if (res > residual_tol)
    throw NotFixedPoint("valuation residual " + std::to_string(res) + " exceeds tolerance");
  MemorylessStrategy pi;
  pi.player = Owner::Min;
  pi.choice.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Min) continue;
    StateId best = g.successors(s)[0];
    for (StateId t : g.successors(s))
      if (v[t] < v[best]) best = t;
    pi.choice[s] = {{best, Rational(1)}};
  }
  return pi;
}

GreedyMaxResult extract_max_greedy(const GameGraph& g, const Valuation& v, double epsilon) {
  if (static_cast<int>(v.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  GreedyMaxResult out;
  out.strategy.player = Owner::Max;
  out.strategy.choice.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Max) continue;
    StateId best = g.successors(s)[0];
    for (StateId t : g.successors(s))
      if (v[t] > v[best]) best = t;
    out.strategy.choice[s] = {{best, Rational(1)}};
  }
  out.achieved = value_iterate(resolve_player(g, out.strategy)).valuation;
  out.attains_value = true;
  for (StateId s = 0; s < g.num_states(); ++s)
    if (out.achieved[s] < v[s] - epsilon) out.attains_value = false;
  return out;
}

GameGraph build_value_preserving_subgame(const GameGraph& g, const Valuation& v,
                                         double gap_tol) {
  if (static_cast<int>(v.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  return build_subgame(
      g, [&](StateId s) { return v[s] <= gap_tol; },
      [&](StateId s, StateId t) { return std::abs(v[s] - v[t]) <= gap_tol; });
}

GameGraph build_value_preserving_subgame(const GameGraph& g, const ExactValuation& v) {
  if (static_cast<int>(v.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  return build_subgame(
      g, [&](StateId s) { return v[s] == 0; },
      [&](StateId s, StateId t) { return v[s] == v[t]; });
}

StageSwitchingStrategy synthesize_max_optimal(const GameGraph& g, const SolveConfig& cfg) {
  const double gap_tol = 1e-9;
  SolveResult sr = value_iterate(g, cfg);
  const Valuation& v = sr.valuation;
  GameGraph h = build_value_preserving_subgame(g, v, gap_tol);
  std::vector<int> rank = positive_attractor_ranks(h, h.targets());

  MemorylessStrategy tau;
  tau.player = Owner::Max;
  tau.choice.resize(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != Owner::Max) continue;
    if (v[s] <= gap_tol) {
      // all successors of a value-0 state are value-0, any choice does
      tau.choice[s] = {{g.successors(s)[0], Rational(1)}};
      continue;
    }
    // greedy over value-preserving successors; the attractor rank breaks
    // ties towards target progress, otherwise greedy play may cycle
    StateId best = -1;
    for (StateId t : h.successors(s)) {
      if (rank[t] < 0) continue;
      if (best < 0 || rank[t] < rank[best]) best = t;
    }
    if (best < 0)
      throw InvariantBroken("positive-value state '" + g.name(s) +
                            "' cannot make progress in the value-preserving subgame");
    tau.choice[s] = {{best, Rational(1)}};
  }

  // Worst-case probability of reaching a target within k steps when Max
  // plays tau inside h; grows towards the value as k increases.
  std::vector<long> horizon(g.num_states(), 1);
  std::vector<StateId> pending;
  for (StateId s = 0; s < g.num_states(); ++s)
    if (v[s] > gap_tol) pending.push_back(s);

  Valuation bounded(g.num_states(), 0.0);
  const long horizon_cap = 1L << 20;
  for (long k = 1; k <= horizon_cap && !pending.empty(); ++k) {
    Valuation next(g.num_states(), 0.0);
    for (StateId s = 0; s < g.num_states(); ++s) {
      if (g.is_target(s)) {
        next[s] = 1.0;
        continue;
      }
      if (v[s] <= gap_tol) continue;  // absorbed in h
      switch (g.owner(s)) {
        case Owner::Max:
          next[s] = bounded[tau.picked(s)];
          break;
        case Owner::Min: {
          double worst = 1.0;
          for (StateId t : h.successors(s)) worst = std::min(worst, bounded[t]);
          next[s] = worst;
          break;
        }
        case Owner::Random: {
          double acc = 0.0;
          for (size_t i = 0; i < h.successors(s).size(); ++i)
            acc += h.weights_double(s)[i] * bounded[h.successors(s)[i]];
          next[s] = acc;
          break;
        }
      }
    }
    bounded = std::move(next);
    if ((k & (k - 1)) == 0) {  // power-of-two checkpoint
      std::vector<StateId> still;
      for (StateId s : pending) {
        if (bounded[s] >= v[s] / 2 - 1e-9)
          horizon[s] = k;
        else
          still.push_back(s);
      }
      pending = std::move(still);
    }
  }
  if (!pending.empty())
    throw HorizonNotFound("no bounded horizon reaches half the value at state '" +
                          g.name(pending.front()) + "'");

  StageSwitchingStrategy st;
  st.base = std::move(tau);
  st.horizon = std::move(horizon);
  return st;
}

Rational evaluate_strategy_pair(const GameGraph& g, const MemorylessStrategy& sigma,
                                const MemorylessStrategy& pi, StateId s) {
  check_state(g, s);
  return solve_chain_exact(g, sigma, pi)[s];
}

Rational evaluate_strategy_pair(const GameGraph& g, const StageSwitchingStrategy& sigma,
                                const MemorylessStrategy& pi, StateId s) {
  check_state(g, s);
  return solve_chain_exact(g, sigma, pi)[s];
}

namespace {

LossStats loss_stats_on(const GameGraph& g, const Valuation& v, const Chain& chain,
                        const std::vector<StateId>& game_state, int start, double gap_tol) {
  const int n = chain.size();
  auto losing = [&](int x, int y) {
    StateId r = game_state[x];
    return g.owner(r) == Owner::Max && v[r] > v[game_state[y]] + gap_tol;
  };

  // Redirect every value-decreasing Max transition into a per-source tag
  // state; the hit distribution over tags is the first-loss distribution.
  Chain modified = chain;
  std::vector<int> tag_of(n, -1);
  std::vector<std::vector<int>> classes;
  std::vector<int> tag_source;
  for (int x = 0; x < n; ++x) {
    bool any = false;
    for (auto& [y, p] : modified.rows[x]) {
      (void)p;
      if (losing(x, y)) any = true;
    }
    if (!any) continue;
    int tag = static_cast<int>(modified.rows.size());
    tag_of[x] = tag;
    modified.rows.push_back({{tag, Rational(1)}});
    modified.target.push_back(false);
    classes.push_back({tag});
    tag_source.push_back(x);
    Rational moved(0);
    std::vector<std::pair<int, Rational>> kept;
    for (auto& [y, p] : modified.rows[x]) {
      if (losing(x, y))
        moved += p;
      else
        kept.emplace_back(y, p);
    }
    kept.emplace_back(tag, moved);
    modified.rows[x] = std::move(kept);
  }

  LossStats stats;
  if (classes.empty()) return stats;
  auto hit = absorption_probabilities_multi(modified, classes);
  for (size_t c = 0; c < classes.size(); ++c) {
    double p = to_double(hit[c][start]);
    stats.prob_positive_loss += p;
    stats.expected_loss += p * v[game_state[tag_source[c]]];
  }
  return stats;
}

}  // namespace

LossStats loss_stats(const GameGraph& g, const Valuation& v, const MemorylessStrategy& sigma,
                     const MemorylessStrategy& pi, StateId s, double gap_tol) {
  check_state(g, s);
  if (static_cast<int>(v.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  Chain chain = induced_chain(g, sigma, pi);
  std::vector<StateId> identity(g.num_states());
  for (StateId i = 0; i < g.num_states(); ++i) identity[i] = i;
  return loss_stats_on(g, v, chain, identity, s, gap_tol);
}

LossStats loss_stats(const GameGraph& g, const Valuation& v, const StageSwitchingStrategy& sigma,
                     const MemorylessStrategy& pi, StateId s, double gap_tol) {
  check_state(g, s);
  if (static_cast<int>(v.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  ProductChain product = product_chain(g, sigma, pi);
  return loss_stats_on(g, v, product.chain, product.game_state, product.start_of(s), gap_tol);
}

namespace {

/// Ascending cluster representatives (cluster maximum) of the values.
std::vector<double> cluster_values(const Valuation& v, double cluster_tol) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> reps;
  for (double x : sorted) {
    if (!reps.empty() && x - reps.back() <= cluster_tol)
      reps.back() = x;
    else
      reps.push_back(x);
  }
  return reps;
}

}  // namespace

double value_gap(const Valuation& v, double eps, double cluster_tol) {
  if (eps <= 0) throw Error("eps must be positive");
  auto reps = cluster_values(v, cluster_tol);
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < reps.size(); ++i)
    if (reps[i] >= eps) gap = std::min(gap, reps[i] - reps[i - 1]);
  return gap;
}

std::optional<Rational> value_gap_exact(const ExactValuation& v, const Rational& eps) {
  if (eps <= 0) throw Error("eps must be positive");
  ExactValuation sorted = v;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::optional<Rational> gap;
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] < eps) continue;
    Rational d = sorted[i] - sorted[i - 1];
    if (!gap || d < *gap) gap = d;
  }
  return gap;
}

StarConditionReport check_star_condition(const Valuation& v, const std::vector<double>& eps_grid,
                                         double cluster_tol) {
  StarConditionReport report;
  report.cluster_tolerance = cluster_tol;
  auto reps = cluster_values(v, cluster_tol);
  for (double eps : eps_grid) {
    StarConditionReport::Row row;
    row.epsilon = eps;
    size_t first = reps.size();
    for (size_t i = 0; i < reps.size(); ++i)
      if (reps[i] >= eps) {
        first = i;
        break;
      }
    row.distinct_count = static_cast<int>(reps.size() - first);
    // same pair rule as value_gap: the larger side must clear epsilon
    for (size_t i = std::max(first, size_t{1}); i < reps.size(); ++i)
      row.min_gap = std::min(row.min_gap, reps[i] - reps[i - 1]);
    report.rows.push_back(row);
  }
  return report;
}

ThresholdVerdict threshold_winner(const GameGraph& g, const ThresholdQuery& q,
                                  const SolveConfig& cfg, double ambiguity_tol) {
  check_state(g, q.state);
  if (q.nu < 0 || q.nu > 1) throw Error("threshold nu must lie in [0,1]");
  SolveResult sr = value_iterate(g, cfg);
  if (!sr.converged) throw NotFixedPoint("value iteration did not converge");
  const double value = sr.valuation[q.state];

  ThresholdVerdict verdict;
  verdict.query = q;
  verdict.value = value;

  const bool near = std::abs(value - q.nu) <= ambiguity_tol;
  bool max_wins;
  if (q.rel == Relation::GreaterEqual) {
    max_wins = near || value >= q.nu;  // at equality Max attains >= nu
  } else {
    max_wins = !near && value > q.nu;  // at equality Pr > nu is unattainable
    verdict.ambiguous = near;
  }

  if (max_wins) {
    verdict.winner = Winner::Max;
    verdict.max_witness = synthesize_max_optimal(g, cfg);
  } else {
    verdict.winner = Winner::Min;
    if (q.rel == Relation::Greater && q.nu <= ambiguity_tol && value <= ambiguity_tol) {
      // Pr = 0 beats the strict comparison with 0: the safe-set strategy,
      // completed outside the safe set by declaration order
      MemorylessStrategy pi = safe_strategy_min(g, safe_states(g));
      for (StateId s = 0; s < g.num_states(); ++s)
        if (g.owner(s) == Owner::Min && pi.choice[s].empty())
          pi.choice[s] = {{g.successors(s)[0], Rational(1)}};
      verdict.min_witness = std::move(pi);
    } else {
      verdict.min_witness = extract_min_optimal(g, sr.valuation);
    }
  }
  return verdict;
}

}  // namespace rsg
