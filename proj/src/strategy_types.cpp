#include "rsg/strategy_types.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace rsg {

bool MemorylessStrategy::covers(const GameGraph& g) const {
  if (static_cast<int>(choice.size()) != g.num_states()) return false;
  for (StateId s = 0; s < g.num_states(); ++s) {
    if (g.owner(s) != player) continue;
    if (choice[s].empty()) return false;
    Rational sum = 0;
    for (const auto& [dst, w] : choice[s]) {
      if (w <= 0) return false;
      if (std::find(g.successors(s).begin(), g.successors(s).end(), dst) ==
          g.successors(s).end())
        return false;  // support outside the edge list
      sum += w;
    }
    if (sum != 1) return false;
  }
  return true;
}

StateId MemorylessStrategy::picked(StateId s) const {
  if (choice[s].size() != 1 || choice[s][0].second != 1)
    throw IncompleteStrategy("strategy is not deterministic at this state");
  return choice[s][0].first;
}

MemorylessStrategy MemorylessStrategy::pure(const GameGraph& g, Owner player,
                                            const std::vector<int>& edge_index) {
  MemorylessStrategy s;
  s.player = player;
  s.choice.resize(g.num_states());
  for (StateId r = 0; r < g.num_states(); ++r) {
    if (g.owner(r) != player) continue;
    int idx = edge_index[r];
    s.choice[r] = {{g.successors(r)[idx], Rational(1)}};
  }
  return s;
}

void write_strategy(const GameGraph& g, const MemorylessStrategy& s, std::ostream& out) {
  for (StateId r = 0; r < g.num_states(); ++r)
    for (const auto& [dst, w] : s.choice[r]) {
      out << "choose " << g.name(r) << ' ' << g.name(dst);
      if (w != 1) out << ' ' << rational_to_string(w);
      out << '\n';
    }
}

void write_strategy(const GameGraph& g, const StageSwitchingStrategy& s, std::ostream& out) {
  if (!s.shared_base())
    throw Error("stage strategies with per-anchor overrides have no textual form");
  for (StateId r = 0; r < g.num_states(); ++r)
    out << "stage " << g.name(r) << ' ' << s.horizon[r] << '\n';
  write_strategy(g, s.base, out);
}

ParsedStrategy parse_strategy(const GameGraph& g, Owner player, std::istream& in) {
  MemorylessStrategy ms;
  ms.player = player;
  ms.choice.resize(g.num_states());
  std::vector<long> horizon(g.num_states(), 0);
  bool any_stage = false;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    auto syntax = [&](const std::string& msg) {
      throw ValidationError(ValidationErrorKind::Syntax,
                            "line " + std::to_string(lineno) + ": " + msg);
    };
    if (kw == "choose") {
      std::string src, dst, w;
      if (!(ls >> src >> dst)) syntax("expected: choose <state> <successor> [<num>/<den>]");
      Rational weight(1);
      if (ls >> w) {
        auto q = parse_rational(w);
        if (!q) syntax("bad weight '" + w + "'");
        weight = *q;
      }
      ms.choice[g.id_of(src)].emplace_back(g.id_of(dst), weight);
    } else if (kw == "stage") {
      std::string state;
      long h = 0;
      if (!(ls >> state >> h) || h < 1) syntax("expected: stage <state> <horizon>=1..");
      horizon[g.id_of(state)] = h;
      any_stage = true;
    } else {
      syntax("unknown directive '" + kw + "'");
    }
  }

  // Forced single-successor states may be omitted from the file.
  for (StateId s = 0; s < g.num_states(); ++s)
    if (g.owner(s) == player && ms.choice[s].empty() && g.successors(s).size() == 1)
      ms.choice[s] = {{g.successors(s)[0], Rational(1)}};
  if (!ms.covers(g)) throw IncompleteStrategy("strategy file does not cover all owned states");

  ParsedStrategy out;
  out.memoryless = ms;
  if (any_stage) {
    if (player != Owner::Max) throw IncompleteStrategy("stage headers only apply to Max");
    StageSwitchingStrategy st;
    st.base = std::move(ms);
    for (long& h : horizon)
      if (h < 1) h = 1;
    st.horizon = std::move(horizon);
    out.stage = std::move(st);
  }
  return out;
}

}  // namespace rsg
