#include "rsg/ocssg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rsg {

int OCAutomaton::id_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw ValidationError(ValidationErrorKind::UnknownState, "unknown control '" + name + "'");
  return it->second;
}

int OCAutomaton::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

bool OCAutomaton::operator==(const OCAutomaton& other) const {
  if (names_ != other.names_ || owners_ != other.owners_) return false;
  if (rules_.size() != other.rules_.size()) return false;
  for (size_t q = 0; q < rules_.size(); ++q) {
    if (rules_[q].size() != other.rules_[q].size()) return false;
    for (size_t i = 0; i < rules_[q].size(); ++i) {
      const Rule &a = rules_[q][i], &b = other.rules_[q][i];
      if (a.delta != b.delta || a.dst != b.dst || a.weight != b.weight) return false;
    }
  }
  return true;
}

namespace {

std::string at_line(int line) {
  return line > 0 ? " (line " + std::to_string(line) + ")" : "";
}

}  // namespace

OCAutomaton validate_oc(const RawAutomaton& raw) {
  OCAutomaton a;
  for (const auto& rc : raw.controls) {
    if (a.index_.count(rc.name))
      throw InvalidAutomaton("duplicate control '" + rc.name + "'" + at_line(rc.line));
    a.index_.emplace(rc.name, static_cast<int>(a.names_.size()));
    a.names_.push_back(rc.name);
    a.owners_.push_back(rc.owner);
  }
  a.rules_.resize(a.names_.size());

  for (const auto& rr : raw.rules) {
    int src = a.find(rr.src);
    if (src < 0) throw InvalidAutomaton("rule source '" + rr.src + "' is not a control" + at_line(rr.line));
    int dst = a.find(rr.dst);
    if (dst < 0) throw InvalidAutomaton("rule target '" + rr.dst + "' is not a control" + at_line(rr.line));
    if (rr.delta < -1 || rr.delta > 1)
      throw InvalidAutomaton("counter delta outside {-1,0,+1}" + at_line(rr.line));
    bool random_src = a.owners_[src] == Owner::Random;
    if (random_src && !rr.weight)
      throw InvalidAutomaton("rule from rand control '" + rr.src + "' needs a weight" +
                             at_line(rr.line));
    if (!random_src && rr.weight)
      throw InvalidAutomaton("rule from player control '" + rr.src + "' carries a weight" +
                             at_line(rr.line));
    for (const auto& r : a.rules_[src])
      if (r.delta == rr.delta && r.dst == dst)
        throw InvalidAutomaton("duplicate rule from '" + rr.src + "'" + at_line(rr.line));
    a.rules_[src].push_back({rr.delta, dst, rr.weight.value_or(Rational(0))});
  }

  for (int q = 0; q < a.num_controls(); ++q) {
    if (a.rules_[q].empty())
      throw InvalidAutomaton("control '" + a.names_[q] + "' has no rule");
    if (a.owners_[q] == Owner::Random) {
      Rational sum = 0;
      for (const auto& r : a.rules_[q]) {
        if (r.weight <= 0 || r.weight > 1)
          throw InvalidAutomaton("rule weight outside (0,1] at control '" + a.names_[q] + "'");
        sum += r.weight;
      }
      if (sum != 1)
        throw InvalidAutomaton("rule weights of control '" + a.names_[q] + "' sum to " +
                               rational_to_string(sum) + ", expected 1");
    }
  }
  return a;
}

RawAutomaton parse_oc(std::istream& in) {
  RawAutomaton raw;
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
    if (kw == "control") {
      RawAutomaton::RawControl rc;
      rc.line = lineno;
      std::string owner;
      if (!(ls >> rc.name >> owner)) syntax("expected: control <name> max|min|rand");
      if (owner == "max")
        rc.owner = Owner::Max;
      else if (owner == "min")
        rc.owner = Owner::Min;
      else if (owner == "rand")
        rc.owner = Owner::Random;
      else
        syntax("unknown owner '" + owner + "'");
      raw.controls.push_back(std::move(rc));
    } else if (kw == "rule") {
      RawAutomaton::RawRule rr;
      rr.line = lineno;
      std::string delta, w;
      if (!(ls >> rr.src >> delta >> rr.dst)) syntax("expected: rule <src> -1|0|+1 <dst> [w]");
      if (delta == "-1")
        rr.delta = -1;
      else if (delta == "0")
        rr.delta = 0;
      else if (delta == "+1")
        rr.delta = 1;
      else
        syntax("bad delta '" + delta + "', expected -1, 0 or +1");
      if (ls >> w) {
        auto q = parse_rational(w);
        if (!q) syntax("bad weight '" + w + "'");
        rr.weight = *q;
      }
      raw.rules.push_back(std::move(rr));
    } else {
      syntax("unknown directive '" + kw + "'");
    }
  }
  return raw;
}

void write_oc(const OCAutomaton& a, std::ostream& out) {
  for (int q = 0; q < a.num_controls(); ++q)
    out << "control " << a.name(q) << ' ' << owner_to_string(a.owner(q)) << '\n';
  for (int q = 0; q < a.num_controls(); ++q)
    for (const auto& r : a.rules_of(q)) {
      out << "rule " << a.name(q) << ' ' << (r.delta < 0 ? "-1" : r.delta > 0 ? "+1" : "0") << ' '
          << a.name(r.dst);
      if (a.owner(q) == Owner::Random) out << ' ' << rational_to_string(r.weight);
      out << '\n';
    }
}

std::string write_oc(const OCAutomaton& a) {
  std::ostringstream os;
  write_oc(a, os);
  return os.str();
}

Unrolled unroll(const OCAutomaton& a, int cap, BoundaryPolicy policy) {
  if (cap < 1) throw InvalidAutomaton("truncation cap must be at least 1");
  const std::string sink_name = "__cap";
  if (a.find(sink_name) >= 0) throw InvalidAutomaton("control name '__cap' is reserved");

  RawGame raw;
  auto state_name = [&](int q, int n) { return a.name(q) + "_" + std::to_string(n); };
  for (int q = 0; q < a.num_controls(); ++q)
    for (int n = 0; n <= cap; ++n)
      raw.states.push_back({state_name(q, n), a.owner(q), n == 0, 0});
  raw.states.push_back({sink_name, Owner::Random, policy == BoundaryPolicy::Winning, 0});

  for (int q = 0; q < a.num_controls(); ++q) {
    bool random = a.owner(q) == Owner::Random;
    auto weight1 = random ? std::optional<Rational>(Rational(1)) : std::nullopt;
    raw.edges.push_back({state_name(q, 0), state_name(q, 0), weight1, 0});
    for (int n = 1; n < cap; ++n)
      for (const auto& r : a.rules_of(q))
        raw.edges.push_back({state_name(q, n), state_name(r.dst, n + r.delta),
                             random ? std::optional<Rational>(r.weight) : std::nullopt, 0});
    raw.edges.push_back({state_name(q, cap), sink_name, weight1, 0});
  }
  raw.edges.push_back({sink_name, sink_name, Rational(1), 0});

  Unrolled u;
  u.game = validate_game(raw);
  u.cap = cap;
  u.controls = a.num_controls();
  u.sink = u.game.num_states() - 1;
  return u;
}

TerminationBounds termination_bounds(const OCAutomaton& a, int cap, const SolveConfig& cfg) {
  Unrolled losing = unroll(a, cap, BoundaryPolicy::Losing);
  Unrolled winning = unroll(a, cap, BoundaryPolicy::Winning);
  SolveResult lo = value_iterate(losing.game, cfg);
  SolveResult hi = value_iterate(winning.game, cfg);

  TerminationBounds b;
  b.cap = cap;
  b.controls = a.num_controls();
  b.lower_converged = lo.converged;
  b.upper_converged = hi.converged;
  auto rows = static_cast<std::ptrdiff_t>(a.num_controls()) * (cap + 1);
  b.lower.assign(lo.valuation.begin(), lo.valuation.begin() + rows);
  b.upper.assign(hi.valuation.begin(), hi.valuation.begin() + rows);
  return b;
}

LimitReport limit_values(const OCAutomaton& a, double tol, int n_max) {
  if (tol <= 0) throw Error("tolerance must be positive");
  if (n_max < 1) throw Error("n_max must be at least 1");

  LimitReport report;
  report.tolerance = tol;
  for (int cap = 8; cap <= n_max; cap *= 2) report.caps.push_back(cap);
  if (report.caps.empty() || report.caps.back() != n_max) report.caps.push_back(n_max);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.controls.resize(a.num_controls());
  for (int q = 0; q < a.num_controls(); ++q) {
    report.controls[q].control = a.name(q);
    report.controls[q].last_delta = nan;
    report.controls[q].prev_delta = nan;
  }

  for (int cap : report.caps) {
    Unrolled u = unroll(a, cap, BoundaryPolicy::Losing);
    SolveResult r = value_iterate(u.game, {});
    double slack = std::max(1e-9, 10 * r.residual);
    for (int q = 0; q < a.num_controls(); ++q) {
      for (int n = 0; n + 1 < cap; ++n) {
        double cur = r.valuation[u.state_of(q, n)];
        double nxt = r.valuation[u.state_of(q, n + 1)];
        if (nxt > cur + slack)
          throw InvariantBroken("truncation values increase with the counter at control '" +
                                a.name(q) + "'");
      }
      report.controls[q].estimates.push_back(r.valuation[u.state_of(q, cap / 2)]);
    }
  }

  for (auto& pc : report.controls) {
    const auto& e = pc.estimates;
    pc.limit = e.back();
    if (e.size() >= 2) pc.last_delta = std::abs(e[e.size() - 1] - e[e.size() - 2]);
    if (e.size() >= 3) pc.prev_delta = std::abs(e[e.size() - 2] - e[e.size() - 3]);
    pc.stabilized = e.size() >= 2 && pc.last_delta <= tol;
  }
  report.all_stabilized = std::all_of(report.controls.begin(), report.controls.end(),
                                      [](const auto& pc) { return pc.stabilized; });
  return report;
}

CorollaryVerdict check_corollary_oc(const OCAutomaton& a, double tol, int n_max) {
  CorollaryVerdict verdict;
  verdict.report = limit_values(a, tol, n_max);
  verdict.holds = true;
  for (const auto& pc : verdict.report.controls) {
    if (!pc.stabilized) {
      verdict.inconclusive = true;
      continue;
    }
    if (pc.limit > tol && pc.limit < 1 - tol) verdict.holds = false;
  }
  return verdict;
}

}  // namespace rsg
