#include "rsg/game.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace rsg {

std::string owner_to_string(Owner o) {
  switch (o) {
    case Owner::Max: return "max";
    case Owner::Min: return "min";
    case Owner::Random: return "rand";
  }
  return "?";
}

StateId GameGraph::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw ValidationError(ValidationErrorKind::UnknownState, "unknown state '" + name + "'");
  return it->second;
}

StateId GameGraph::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

bool GameGraph::operator==(const GameGraph& other) const {
  return names_ == other.names_ && owners_ == other.owners_ && succ_ == other.succ_ &&
         weight_ == other.weight_ && target_ == other.target_;
}

namespace {

std::string at_line(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : "";
}

}  // namespace

GameGraph validate_game(const RawGame& raw, bool normalize_targets) {
  GameGraph g;
  for (const auto& rs : raw.states) {
    if (g.index_.count(rs.name))
      throw ValidationError(ValidationErrorKind::DuplicateState,
                            "duplicate state '" + rs.name + "'" + at_line(rs.line));
    g.index_.emplace(rs.name, static_cast<StateId>(g.names_.size()));
    g.names_.push_back(rs.name);
    g.owners_.push_back(rs.owner);
    g.target_.push_back(rs.target);
  }
  const int n = g.num_states();
  g.succ_.assign(n, {});
  g.weight_.assign(n, {});

  for (const auto& re : raw.edges) {
    StateId src = g.find(re.src);
    if (src < 0)
      throw ValidationError(ValidationErrorKind::DanglingEdge,
                            "edge source '" + re.src + "' is not a state" + at_line(re.line));
    StateId dst = g.find(re.dst);
    if (dst < 0)
      throw ValidationError(ValidationErrorKind::DanglingEdge,
                            "edge target '" + re.dst + "' is not a state" + at_line(re.line));
    if (g.target_[src] && normalize_targets && dst != src) continue;  // normalization drops it
    bool random_src = g.owners_[src] == Owner::Random;
    if (random_src) {
      if (!re.weight)
        throw ValidationError(ValidationErrorKind::BadDistribution,
                              "edge " + re.src + " -> " + re.dst +
                                  " from a rand state needs a weight" + at_line(re.line));
      if (*re.weight <= 0 || *re.weight > 1)
        throw ValidationError(ValidationErrorKind::BadDistribution,
                              "edge " + re.src + " -> " + re.dst + " weight outside (0,1]" +
                                  at_line(re.line));
    } else if (re.weight) {
      throw ValidationError(ValidationErrorKind::BadDistribution,
                            "edge " + re.src + " -> " + re.dst +
                                " carries a weight but its source is a player state" +
                                at_line(re.line));
    }
    if (std::find(g.succ_[src].begin(), g.succ_[src].end(), dst) != g.succ_[src].end())
      throw ValidationError(ValidationErrorKind::DuplicateEdge,
                            "duplicate edge " + re.src + " -> " + re.dst + at_line(re.line));
    g.succ_[src].push_back(dst);
    if (random_src) g.weight_[src].push_back(*re.weight);
  }

  for (StateId s = 0; s < n; ++s) {
    if (g.target_[s]) {
      bool is_self_loop_only = g.succ_[s].size() == 1 && g.succ_[s][0] == s;
      if (!is_self_loop_only) {
        if (!normalize_targets)
          throw ValidationError(
              ValidationErrorKind::TargetNotAbsorbing,
              "target state '" + g.names_[s] + "' must have exactly one edge, a self-loop");
        g.succ_[s] = {s};
        g.weight_[s].clear();
        if (g.owners_[s] == Owner::Random) g.weight_[s] = {Rational(1)};
      }
      if (g.owners_[s] == Owner::Random && g.weight_[s].empty()) g.weight_[s] = {Rational(1)};
    }
    if (g.succ_[s].empty())
      throw ValidationError(ValidationErrorKind::NoSuccessor,
                            "state '" + g.names_[s] + "' has no outgoing edge");
    if (g.owners_[s] == Owner::Random) {
      Rational sum = 0;
      for (const auto& w : g.weight_[s]) sum += w;
      if (sum != 1)
        throw ValidationError(ValidationErrorKind::BadDistribution,
                              "weights leaving rand state '" + g.names_[s] + "' sum to " +
                                  rational_to_string(sum) + ", expected 1");
    }
  }

  g.wdouble_.assign(n, {});
  for (StateId s = 0; s < n; ++s)
    for (const auto& w : g.weight_[s]) g.wdouble_[s].push_back(to_double(w));
  return g;
}

GameGraph reachable_subgame(const GameGraph& g, StateId s) {
  if (s < 0 || s >= g.num_states())
    throw ValidationError(ValidationErrorKind::UnknownState, "no such state id");
  std::vector<bool> seen(g.num_states(), false);
  std::deque<StateId> queue{s};
  seen[s] = true;
  while (!queue.empty()) {
    StateId r = queue.front();
    queue.pop_front();
    for (StateId t : g.successors(r))
      if (!seen[t]) {
        seen[t] = true;
        queue.push_back(t);
      }
  }
  RawGame raw;
  for (StateId r = 0; r < g.num_states(); ++r) {
    if (!seen[r]) continue;
    raw.states.push_back({g.name(r), g.owner(r), g.is_target(r), 0});
    for (size_t i = 0; i < g.successors(r).size(); ++i) {
      RawGame::RawEdge e;
      e.src = g.name(r);
      e.dst = g.name(g.successors(r)[i]);
      if (g.owner(r) == Owner::Random) e.weight = g.weights(r)[i];
      raw.edges.push_back(std::move(e));
    }
  }
  return validate_game(raw);
}

RawGame parse_game(std::istream& in) {
  RawGame raw;
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
    if (kw == "state") {
      RawGame::RawState st;
      st.line = lineno;
      std::string owner;
      if (!(ls >> st.name >> owner)) syntax("expected: state <name> max|min|rand [target]");
      if (owner == "max")
        st.owner = Owner::Max;
      else if (owner == "min")
        st.owner = Owner::Min;
      else if (owner == "rand")
        st.owner = Owner::Random;
      else
        syntax("unknown owner '" + owner + "'");
      std::string flag;
      if (ls >> flag) {
        if (flag != "target") syntax("unexpected token '" + flag + "'");
        st.target = true;
      }
      if (ls >> flag) syntax("trailing token '" + flag + "'");
      raw.states.push_back(std::move(st));
    } else if (kw == "edge") {
      RawGame::RawEdge e;
      e.line = lineno;
      if (!(ls >> e.src >> e.dst)) syntax("expected: edge <src> <dst> [<num>/<den>]");
      std::string w;
      if (ls >> w) {
        auto q = parse_rational(w);
        if (!q) syntax("bad weight '" + w + "'");
        e.weight = *q;
        if (ls >> w) syntax("trailing token '" + w + "'");
      }
      raw.edges.push_back(std::move(e));
    } else {
      syntax("unknown directive '" + kw + "'");
    }
  }
  return raw;
}

void write_game(const GameGraph& g, std::ostream& out) {
  for (StateId s = 0; s < g.num_states(); ++s) {
    out << "state " << g.name(s) << ' ' << owner_to_string(g.owner(s));
    if (g.is_target(s)) out << " target";
    out << '\n';
  }
  for (StateId s = 0; s < g.num_states(); ++s)
    for (size_t i = 0; i < g.successors(s).size(); ++i) {
      out << "edge " << g.name(s) << ' ' << g.name(g.successors(s)[i]);
      if (g.owner(s) == Owner::Random) out << ' ' << rational_to_string(g.weights(s)[i]);
      out << '\n';
    }
}

std::string write_game(const GameGraph& g) {
  std::ostringstream os;
  write_game(g, os);
  return os.str();
}

}  // namespace rsg
