#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsg/errors.hpp"
#include "rsg/rational.hpp"

namespace rsg {

enum class Owner { Max, Min, Random };

std::string owner_to_string(Owner o);

/// Dense state index, 0..|S|-1.
using StateId = int;

/// Subset of states, indexed by StateId.
using StateSet = std::vector<bool>;

enum class ValidationErrorKind {
  DanglingEdge,
  NoSuccessor,
  BadDistribution,
  DuplicateState,
  DuplicateEdge,
  TargetNotAbsorbing,
  UnknownState,
  Syntax,
};

struct ValidationError : Error {
  ValidationErrorKind kind;
  ValidationError(ValidationErrorKind k, const std::string& msg) : Error(msg), kind(k) {}
};

/// Raw, unvalidated model as read from text or built in code.
struct RawGame {
  struct RawState {
    std::string name;
    Owner owner = Owner::Random;
    bool target = false;
    int line = 0;  // source line, 0 when built programmatically
  };
  struct RawEdge {
    std::string src;
    std::string dst;
    std::optional<Rational> weight;
    int line = 0;
  };
  std::vector<RawState> states;
  std::vector<RawEdge> edges;
};

/**
 * A finite two-player stochastic game with a reachability target set.
 *
 * Invariants established by validate_game and preserved afterwards:
 *  - every state has at least one outgoing edge,
 *  - outgoing weights of a Random state are positive rationals summing to 1,
 *  - Max/Min edges carry no weights,
 *  - every target state has exactly one outgoing edge, a self-loop.
 *
 * The structure is immutable after construction and safe to share across
 * threads. Successor lists keep declaration order; all deterministic
 * tie-breaking in the solvers relies on that order.
 */
class GameGraph {
 public:
  int num_states() const { return static_cast<int>(names_.size()); }
  const std::string& name(StateId s) const { return names_[s]; }
  Owner owner(StateId s) const { return owners_[s]; }
  bool is_target(StateId s) const { return target_[s]; }
  const StateSet& targets() const { return target_; }

  const std::vector<StateId>& successors(StateId s) const { return succ_[s]; }
  /// Probability weights parallel to successors(); empty for Max/Min states.
  const std::vector<Rational>& weights(StateId s) const { return weight_[s]; }
  /// Same weights converted to double once at construction.
  const std::vector<double>& weights_double(StateId s) const { return wdouble_[s]; }

  /// StateId of `name`; throws ValidationError(UnknownState) if absent.
  StateId id_of(const std::string& name) const;
  /// As id_of but returns -1 instead of throwing.
  StateId find(const std::string& name) const;

  bool operator==(const GameGraph& other) const;

  friend GameGraph validate_game(const RawGame& raw, bool normalize_targets);

 private:
  std::vector<std::string> names_;
  std::vector<Owner> owners_;
  std::vector<std::vector<StateId>> succ_;
  std::vector<std::vector<Rational>> weight_;
  std::vector<std::vector<double>> wdouble_;
  StateSet target_;
  std::unordered_map<std::string, StateId> index_;
};

/**
 * Checks a raw model and builds the immutable GameGraph.
 *
 * With normalize_targets, extra edges leaving a declared target are dropped
 * and the absorbing self-loop is added; otherwise any declared target whose
 * edge list is not exactly the self-loop is rejected.
 */
GameGraph validate_game(const RawGame& raw, bool normalize_targets = false);

/// Restriction of g to the states reachable from s (declaration order kept).
GameGraph reachable_subgame(const GameGraph& g, StateId s);

/// Parses the line-oriented textual game format:
///   state <name> max|min|rand [target]
///   edge <src> <dst> [<num>/<den>]
/// '#' starts a comment. Errors mention the offending line number.
RawGame parse_game(std::istream& in);

/// Writes g in the textual format; parse_game(write_game(g)) == g.
void write_game(const GameGraph& g, std::ostream& out);
std::string write_game(const GameGraph& g);

}  // namespace rsg
