#include "rsg/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace rsg {

ExactValuation to_exact(const Valuation& v) {
  ExactValuation out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = Rational(v[i]);
  return out;
}

Valuation to_double(const ExactValuation& v) {
  Valuation out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

Valuation bellman_apply(const GameGraph& g, const Valuation& f) {
  if (static_cast<int>(f.size()) != g.num_states())
    throw DomainMismatch("valuation is not defined on all states");
  Valuation out(f.size());
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.is_target(s)) {
      out[s] = 1.0;
      continue;
    }
    const auto& succ = g.successors(s);
    switch (g.owner(s)) {
      case Owner::Max: {
        double best = 0.0;
        for (StateId t : succ) best = std::max(best, f[t]);
        out[s] = best;
        break;
      }
      case Owner::Min: {
        double best = 1.0;
        for (StateId t : succ) best = std::min(best, f[t]);
        out[s] = best;
        break;
      }
      case Owner::Random: {
        double acc = 0.0;
        const auto& w = g.weights_double(s);
        for (size_t i = 0; i < succ.size(); ++i) acc += w[i] * f[succ[i]];
        out[s] = acc;
        break;
      }
    }
  }
  return out;
}

SolveResult value_iterate(const GameGraph& g, const SolveConfig& cfg) {
  if (cfg.tolerance <= 0) throw Error("tolerance must be positive");
  if (cfg.max_iterations < 1) throw Error("max_iterations must be at least 1");

  if (cfg.mode == SolveConfig::Mode::ExactChain) {
    // only forced player states are allowed, so the chain is unambiguous
    MemorylessStrategy forced_max, forced_min;
    forced_max.player = Owner::Max;
    forced_min.player = Owner::Min;
    forced_max.choice.resize(g.num_states());
    forced_min.choice.resize(g.num_states());
    for (StateId s = 0; s < g.num_states(); ++s) {
      if (g.owner(s) == Owner::Random) continue;
      if (g.successors(s).size() != 1)
        throw Error("exact-chain mode requires all player choices to be fixed");
      auto pick = std::vector<std::pair<StateId, Rational>>{{g.successors(s)[0], Rational(1)}};
      (g.owner(s) == Owner::Max ? forced_max : forced_min).choice[s] = pick;
    }
    SolveResult r;
    r.exact = solve_chain_exact(g, forced_max, forced_min);
    r.valuation = to_double(*r.exact);
    r.converged = true;
    return r;
  }

  SolveResult r;
  r.valuation.assign(g.num_states(), 0.0);
  for (long it = 1; it <= cfg.max_iterations; ++it) {
    Valuation next = bellman_apply(g, r.valuation);
    double residual = 0.0;
    for (size_t i = 0; i < next.size(); ++i)
      residual = std::max(residual, std::abs(next[i] - r.valuation[i]));
    r.valuation = std::move(next);
    r.iterations = it;
    r.residual = residual;
    if (residual <= cfg.tolerance) {
      r.converged = true;
      return r;
    }
  }
  r.converged = false;
  return r;
}

ExactValuation solve_chain_exact(const GameGraph& g, const MemorylessStrategy& sigma,
                                 const MemorylessStrategy& pi) {
  return absorption_probabilities(induced_chain(g, sigma, pi));
}

ExactValuation solve_chain_exact(const GameGraph& g, const StageSwitchingStrategy& sigma,
                                 const MemorylessStrategy& pi) {
  ProductChain product = product_chain(g, sigma, pi);
  std::vector<Rational> abs = absorption_probabilities(product.chain);
  ExactValuation out(g.num_states());
  for (StateId s = 0; s < g.num_states(); ++s) out[s] = abs[product.start_of(s)];
  return out;
}

std::vector<MemorylessStrategy> enumerate_pure_strategies(const GameGraph& g, Owner player,
                                                          long limit) {
  std::vector<StateId> owned;
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.owner(s) == player) owned.push_back(s);

  long count = 1;
  for (StateId s : owned) {
    count *= static_cast<long>(g.successors(s).size());
    if (count > limit) throw TooLarge("strategy space exceeds the limit");
  }

  std::vector<MemorylessStrategy> out;
  out.reserve(count);
  std::vector<int> pick(g.num_states(), 0);
  while (true) {
    out.push_back(MemorylessStrategy::pure(g, player, pick));
    int i = static_cast<int>(owned.size()) - 1;
    for (; i >= 0; --i) {
      StateId s = owned[i];
      if (pick[s] + 1 < static_cast<int>(g.successors(s).size())) {
        ++pick[s];
        break;
      }
      pick[s] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

ExactValuation brute_force_value(const GameGraph& g, long pair_limit) {
  auto sigmas = enumerate_pure_strategies(g, Owner::Max, pair_limit);
  auto pis = enumerate_pure_strategies(g, Owner::Min, pair_limit);
  if (static_cast<long>(sigmas.size()) > pair_limit / static_cast<long>(pis.size()))
    throw TooLarge("strategy space exceeds the limit");

  const int n = g.num_states();
  const Rational zero(0), one(1);
  // max over sigma of (min over pi), and min over pi of (max over sigma),
  // folded in one pass over all pairs
  std::vector<ExactValuation> min_over_pi(sigmas.size(), ExactValuation(n, one));
  std::vector<ExactValuation> max_over_sigma(pis.size(), ExactValuation(n, zero));
  for (size_t a = 0; a < sigmas.size(); ++a)
    for (size_t b = 0; b < pis.size(); ++b) {
      ExactValuation v = solve_chain_exact(g, sigmas[a], pis[b]);
      for (int s = 0; s < n; ++s) {
        if (v[s] < min_over_pi[a][s]) min_over_pi[a][s] = v[s];
        if (v[s] > max_over_sigma[b][s]) max_over_sigma[b][s] = v[s];
      }
    }
  ExactValuation maxmin(n, zero), minmax(n, one);
  for (const auto& v : min_over_pi)
    for (int s = 0; s < n; ++s)
      if (v[s] > maxmin[s]) maxmin[s] = v[s];
  for (const auto& v : max_over_sigma)
    for (int s = 0; s < n; ++s)
      if (v[s] < minmax[s]) minmax[s] = v[s];
  if (maxmin != minmax) throw InvariantBroken("max-min and min-max disagree");
  return maxmin;
}

void write_solve_result(const GameGraph& g, const SolveResult& r, std::ostream& out) {
  char buf[64];
  for (StateId s = 0; s < g.num_states(); ++s) {
    out << g.name(s) << '\t';
    if (r.exact) {
      out << rational_to_string((*r.exact)[s]);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", r.valuation[s]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.residual);
    out << '\t' << buf << '\n';
  }
}

}  // namespace rsg
