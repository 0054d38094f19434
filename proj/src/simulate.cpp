#include "rsg/simulate.hpp"

#include <cmath>

namespace rsg {

uint64_t splitmix64_mix(uint64_t x) {
  uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

struct Walker {
  const GameGraph& g;
  const StageSwitchingStrategy* stage;
  const MemorylessStrategy* sigma;  // used when stage == nullptr
  const MemorylessStrategy& pi;

  StateId state;
  StateId anchor;
  long remaining;

  void normalize() {
    if (stage && remaining <= 0) {
      anchor = state;
      remaining = stage->horizon[state];
    }
  }

  const std::vector<std::pair<StateId, Rational>>& player_row() const {
    if (g.owner(state) == Owner::Max)
      return stage ? stage->tau(anchor).choice[state] : sigma->choice[state];
    return pi.choice[state];
  }

  bool absorbing() const {
    if (g.owner(state) == Owner::Random)
      return g.successors(state).size() == 1 && g.successors(state)[0] == state;
    const auto& row = player_row();
    return row.size() == 1 && row[0].first == state;
  }

  StateId sample_next(SplitMix64& rng) const {
    if (g.owner(state) == Owner::Random) {
      const auto& succ = g.successors(state);
      const auto& w = g.weights_double(state);
      double u = rng.next_unit();
      double acc = 0.0;
      for (size_t i = 0; i + 1 < succ.size(); ++i) {
        acc += w[i];
        if (u < acc) return succ[i];
      }
      return succ.back();
    }
    const auto& row = player_row();
    if (row.size() == 1) return row[0].first;
    double u = rng.next_unit();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < row.size(); ++i) {
      acc += to_double(row[i].second);
      if (u < acc) return row[i].first;
    }
    return row.back().first;
  }
};

RunOutcome run_walker(Walker w, uint64_t seed, long max_steps, const Valuation* v) {
  if (max_steps < 1) throw Error("max_steps must be at least 1");
  SplitMix64 rng{seed};
  RunOutcome out;
  bool lost = false;
  while (true) {
    if (w.g.is_target(w.state)) {
      out.reached = true;
      return out;
    }
    if (out.steps >= max_steps) {
      out.truncated = true;
      return out;
    }
    w.normalize();
    if (w.absorbing()) return out;  // non-target and provably stuck
    StateId next = w.sample_next(rng);
    if (v && !lost && w.g.owner(w.state) == Owner::Max &&
        (*v)[w.state] > (*v)[next] + 1e-9) {
      out.loss = (*v)[w.state];
      lost = true;
    }
    w.state = next;
    --w.remaining;
    ++out.steps;
  }
}

template <typename Sigma>
EstimateResult estimate_impl(const GameGraph& g, const Sigma& sigma,
                             const MemorylessStrategy& pi, StateId s, const SimConfig& cfg,
                             const Valuation* v) {
  if (cfg.replicas < 1) throw Error("replicas must be at least 1");
  if (cfg.confidence <= 0 || cfg.confidence >= 1) throw Error("confidence must be in (0,1)");
  EstimateResult r;
  r.replicas = cfg.replicas;
  r.replica_seeds.reserve(cfg.replicas);
  long reached = 0, truncated = 0;
  double loss_sum = 0.0;
  for (long i = 0; i < cfg.replicas; ++i) {
    uint64_t seed = splitmix64_mix(cfg.seed ^ static_cast<uint64_t>(i));
    r.replica_seeds.push_back(seed);
    RunOutcome run = sample_run(g, sigma, pi, s, seed, cfg.max_steps, v);
    reached += run.reached ? 1 : 0;
    truncated += run.truncated ? 1 : 0;
    loss_sum += run.loss;
  }
  double n = static_cast<double>(cfg.replicas);
  r.estimate = static_cast<double>(reached) / n;
  r.truncated_fraction = static_cast<double>(truncated) / n;
  r.mean_loss = loss_sum / n;
  double z = normal_quantile(0.5 + cfg.confidence / 2);
  r.half_width = z * std::sqrt(r.estimate * (1.0 - r.estimate) / n);
  return r;
}

}  // namespace

RunOutcome sample_run(const GameGraph& g, const MemorylessStrategy& sigma,
                      const MemorylessStrategy& pi, StateId s, uint64_t seed, long max_steps,
                      const Valuation* v) {
  if (s < 0 || s >= g.num_states())
    throw ValidationError(ValidationErrorKind::UnknownState, "no such state id");
  if (!sigma.covers(g)) throw IncompleteStrategy("Max strategy incomplete");
  if (!pi.covers(g)) throw IncompleteStrategy("Min strategy incomplete");
  Walker w{g, nullptr, &sigma, pi, s, s, 0};
  return run_walker(w, seed, max_steps, v);
}

RunOutcome sample_run(const GameGraph& g, const StageSwitchingStrategy& sigma,
                      const MemorylessStrategy& pi, StateId s, uint64_t seed, long max_steps,
                      const Valuation* v) {
  if (s < 0 || s >= g.num_states())
    throw ValidationError(ValidationErrorKind::UnknownState, "no such state id");
  if (!sigma.base.covers(g)) throw IncompleteStrategy("Max strategy incomplete");
  for (const auto& [anchor, tau] : sigma.overrides) {
    (void)anchor;
    if (!tau.covers(g)) throw IncompleteStrategy("Max strategy incomplete");
  }
  if (!pi.covers(g)) throw IncompleteStrategy("Min strategy incomplete");
  if (static_cast<int>(sigma.horizon.size()) != g.num_states())
    throw IncompleteStrategy("stage horizons not defined on all states");
  Walker w{g, &sigma, nullptr, pi, s, s, sigma.horizon[s]};
  return run_walker(w, seed, max_steps, v);
}

EstimateResult estimate_reach(const GameGraph& g, const MemorylessStrategy& sigma,
                              const MemorylessStrategy& pi, StateId s, const SimConfig& cfg,
                              const Valuation* v) {
  return estimate_impl(g, sigma, pi, s, cfg, v);
}

EstimateResult estimate_reach(const GameGraph& g, const StageSwitchingStrategy& sigma,
                              const MemorylessStrategy& pi, StateId s, const SimConfig& cfg,
                              const Valuation* v) {
  return estimate_impl(g, sigma, pi, s, cfg, v);
}

// Acklam's inverse normal CDF approximation, |relative error| < 1.2e-9.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("quantile argument must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace rsg
