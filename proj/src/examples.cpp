#include "rsg/examples.hpp"

#include <algorithm>
#include <map>

namespace rsg {
namespace examples {

GameGraph fig1_game(int depth) {
  if (depth < 1) throw Error("depth must be at least 1");
  RawGame raw;
  auto nm = [](const char* base, int i) { return std::string(base) + "_" + std::to_string(i); };
  for (int i = 0; i <= depth; ++i) raw.states.push_back({nm("r", i), Owner::Max, false, 0});
  for (int i = 0; i <= depth; ++i) raw.states.push_back({nm("s", i), Owner::Random, false, 0});
  for (int i = 0; i <= depth; ++i) raw.states.push_back({nm("t", i), Owner::Random, i == 0, 0});

  const Rational half(1, 2), one(1);
  for (int i = 0; i < depth; ++i) raw.edges.push_back({nm("r", i), nm("r", i + 1), std::nullopt, 0});
  for (int i = 1; i <= depth; ++i) raw.edges.push_back({nm("r", i), nm("s", i), std::nullopt, 0});
  raw.edges.push_back({nm("s", 0), nm("s", 0), one, 0});
  for (int i = 1; i <= depth; ++i) {
    raw.edges.push_back({nm("s", i), nm("s", i - 1), half, 0});
    raw.edges.push_back({nm("s", i), nm("t", i), half, 0});
  }
  raw.edges.push_back({nm("t", 0), nm("t", 0), one, 0});
  for (int i = 1; i <= depth; ++i) raw.edges.push_back({nm("t", i), nm("t", i - 1), one, 0});
  return validate_game(raw);
}

OCAutomaton fig2_automaton() {
  RawAutomaton raw;
  raw.controls = {
      {"s", Owner::Max, 0},    {"u", Owner::Random, 0}, {"d", Owner::Random, 0},
      {"r", Owner::Random, 0}, {"z", Owner::Random, 0}, {"t", Owner::Random, 0},
  };
  const Rational half(1, 2), one(1);
  raw.rules = {
      {"s", 0, "u", std::nullopt, 0}, {"s", 0, "r", std::nullopt, 0},
      {"u", +1, "s", half, 0},        {"u", 0, "d", half, 0},
      {"d", -1, "s", half, 0},        {"d", 0, "u", half, 0},
      {"r", 0, "z", half, 0},         {"r", 0, "t", half, 0},
      {"z", -1, "z", one, 0},         {"t", +1, "t", one, 0},
  };
  return validate_oc(raw);
}

OCAutomaton solvency_automaton(const std::vector<SolvencyAction>& actions) {
  if (actions.empty()) throw Error("at least one action required");
  RawAutomaton raw;
  raw.controls.push_back({"choice", Owner::Max, 0});

  for (size_t j = 0; j < actions.size(); ++j) {
    std::string act = "act" + std::to_string(j + 1);
    raw.controls.push_back({act, Owner::Random, 0});
    raw.rules.push_back({"choice", 0, act, std::nullopt, 0});

    Rational total(0);
    // merge outcomes per delta so the rule list stays duplicate-free
    std::map<int, Rational> merged;
    for (const auto& [delta, w] : actions[j].outcomes) {
      if (w <= 0)
        throw ValidationError(ValidationErrorKind::BadDistribution,
                              "action outcome weight must be positive");
      merged[delta] += w;
      total += w;
    }
    if (total != 1)
      throw ValidationError(ValidationErrorKind::BadDistribution,
                            "action outcome weights sum to " + rational_to_string(total) +
                                ", expected 1");
    for (const auto& [delta, w] : merged) {
      if (delta >= -1 && delta <= 1) {
        raw.rules.push_back({act, delta, "choice", w, 0});
        continue;
      }
      // |delta| > 1: first unit step carries the probability, the rest of
      // the chain is deterministic; suffix chains are shared across deltas
      int unit = delta > 0 ? 1 : -1;
      int remaining = delta - unit;
      std::string prev = act;
      Rational step_weight = w;
      auto add_once = [&](const std::string& src, const std::string& dst, const Rational& sw) {
        for (const auto& r : raw.rules)
          if (r.src == src && r.dst == dst && r.delta == unit) return;
        raw.rules.push_back({src, unit, dst, sw, 0});
      };
      while (remaining != 0) {
        std::string mid = act + (unit > 0 ? "_up" : "_dn") + std::to_string(std::abs(remaining));
        if (std::find_if(raw.controls.begin(), raw.controls.end(), [&](const auto& c) {
              return c.name == mid;
            }) == raw.controls.end())
          raw.controls.push_back({mid, Owner::Random, 0});
        add_once(prev, mid, step_weight);
        step_weight = Rational(1);
        prev = mid;
        remaining -= unit;
      }
      add_once(prev, "choice", step_weight);
    }
  }
  return validate_oc(raw);
}

}  // namespace examples
}  // namespace rsg
