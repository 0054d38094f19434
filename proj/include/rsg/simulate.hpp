#pragma once

#include <cstdint>
#include <vector>

#include "rsg/bellman.hpp"
#include "rsg/game.hpp"
#include "rsg/strategy_types.hpp"

namespace rsg {

/// Counter-based generator; the raw stream and the seed-derivation rule
/// (replica i runs on mix(seed xor i), one mixing round) are part of the
/// external reproducibility contract.
struct SplitMix64 {
  uint64_t state = 0;
  uint64_t next() {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// One mixing round; replica i of a run with base seed s uses mix(s ^ i).
uint64_t splitmix64_mix(uint64_t x);

struct SimConfig {
  long replicas = 10'000;
  long max_steps = 1'000'000;
  uint64_t seed = 0;
  double confidence = 0.99;
};

struct RunOutcome {
  bool reached = false;    // visited a target
  long steps = 0;          // transitions taken before stopping
  bool truncated = false;  // stopped by the step cap, outcome unknown
  double loss = 0.0;       // value at the first value-decreasing Max step
};

/**
 * Samples one run of the product chain; a pure function of the seed. Stops
 * on reaching a target, on absorbing self-loops (reached = truncated =
 * false there: such runs provably never reach a target), or after max_steps
 * (truncated). The loss field is filled only when a valuation is supplied.
 */
RunOutcome sample_run(const GameGraph& g, const MemorylessStrategy& sigma,
                      const MemorylessStrategy& pi, StateId s, uint64_t seed, long max_steps,
                      const Valuation* v = nullptr);
RunOutcome sample_run(const GameGraph& g, const StageSwitchingStrategy& sigma,
                      const MemorylessStrategy& pi, StateId s, uint64_t seed, long max_steps,
                      const Valuation* v = nullptr);

/**
 * Monte Carlo estimate of the reach probability with a normal-approximation
 * confidence interval. Truncated runs count as not reached, biasing the
 * estimate down by at most the reported truncated fraction. Replicas are
 * independent; the result does not depend on evaluation order.
 */
struct EstimateResult {
  double estimate = 0.0;
  double half_width = 0.0;
  long replicas = 0;
  double truncated_fraction = 0.0;
  double mean_loss = 0.0;  // 0 unless a valuation was supplied
  std::vector<uint64_t> replica_seeds;
};
EstimateResult estimate_reach(const GameGraph& g, const MemorylessStrategy& sigma,
                              const MemorylessStrategy& pi, StateId s, const SimConfig& cfg,
                              const Valuation* v = nullptr);
EstimateResult estimate_reach(const GameGraph& g, const StageSwitchingStrategy& sigma,
                              const MemorylessStrategy& pi, StateId s, const SimConfig& cfg,
                              const Valuation* v = nullptr);

/// Standard normal quantile (Acklam's rational approximation).
double normal_quantile(double p);

}  // namespace rsg
