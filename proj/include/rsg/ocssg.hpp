#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsg/bellman.hpp"
#include "rsg/game.hpp"

namespace rsg {

/// Raw, unvalidated one-counter automaton.
struct RawAutomaton {
  struct RawControl {
    std::string name;
    Owner owner = Owner::Random;
    int line = 0;
  };
  struct RawRule {
    std::string src;
    int delta = 0;  // -1, 0 or +1
    std::string dst;
    std::optional<Rational> weight;
    int line = 0;
  };
  std::vector<RawControl> controls;
  std::vector<RawRule> rules;
};

/**
 * A one-counter automaton: finite controls with counter rules
 * (src, delta, dst), delta in {-1,0,+1}. Together with a counter value the
 * controls generate a game; counter 0 is absorbing and is the target of the
 * implicit termination objective. Immutable after validation.
 */
class OCAutomaton {
 public:
  struct Rule {
    int delta;
    int dst;
    Rational weight;  // meaningful when the source control is Random
  };

  int num_controls() const { return static_cast<int>(names_.size()); }
  const std::string& name(int q) const { return names_[q]; }
  Owner owner(int q) const { return owners_[q]; }
  const std::vector<Rule>& rules_of(int q) const { return rules_[q]; }

  int id_of(const std::string& name) const;
  int find(const std::string& name) const;

  bool operator==(const OCAutomaton& other) const;

  friend OCAutomaton validate_oc(const RawAutomaton& raw);

 private:
  std::vector<std::string> names_;
  std::vector<Owner> owners_;
  std::vector<std::vector<Rule>> rules_;
  std::unordered_map<std::string, int> index_;
};

OCAutomaton validate_oc(const RawAutomaton& raw);

/// Textual format:
///   control <name> max|min|rand
///   rule <src> -1|0|+1 <dst> [<num>/<den>]
RawAutomaton parse_oc(std::istream& in);
void write_oc(const OCAutomaton& a, std::ostream& out);
std::string write_oc(const OCAutomaton& a);

/// How the truncation boundary absorbs: as a lost run (value lower bounds)
/// or as a won run (value upper bounds).
enum class BoundaryPolicy { Losing, Winning };

/**
 * The finite truncation of the generated game: states q_n for every control
 * q and counter 0 <= n <= cap plus one absorbing boundary sink. Counter-0
 * states are absorbing targets; at n = cap every state steps into the sink,
 * which is a target exactly under the Winning policy.
 */
struct Unrolled {
  GameGraph game;
  int cap = 0;
  int controls = 0;
  StateId sink = 0;
  StateId state_of(int control, int counter) const { return control * (cap + 1) + counter; }
};
Unrolled unroll(const OCAutomaton& a, int cap, BoundaryPolicy policy);

/**
 * Pessimistic and optimistic truncation values. A strategy of the Losing
 * truncation embeds into the infinite game with no smaller winning
 * probability, and the Winning truncation additionally awards every
 * boundary-hitting run, so for every counter below the cap
 * lower <= infinite-game value <= upper.
 */
struct TerminationBounds {
  int cap = 0;
  int controls = 0;
  Valuation lower, upper;  // indexed control*(cap+1)+counter
  bool lower_converged = false, upper_converged = false;
  double lower_at(int control, int counter) const { return lower[control * (cap + 1) + counter]; }
  double upper_at(int control, int counter) const { return upper[control * (cap + 1) + counter]; }
};
TerminationBounds termination_bounds(const OCAutomaton& a, int cap, const SolveConfig& cfg = {});

/**
 * Estimates lim_n val(q_n) per control from Losing truncations at doubling
 * caps 8, 16, ..., n_max, sampling the value at counter cap/2 to keep away
 * from the boundary. A control stabilizes when the last two estimates agree
 * within tol. Within each truncation the sampled values are checked to be
 * non-increasing in the counter.
 */
struct LimitReport {
  struct PerControl {
    std::string control;
    double limit = 0.0;  // estimate at the largest cap
    bool stabilized = false;
    std::vector<double> estimates;
    double last_delta = 0.0, prev_delta = 0.0;  // NaN when not available
  };
  std::vector<PerControl> controls;
  std::vector<int> caps;
  double tolerance = 0.0;
  bool all_stabilized = false;
};
LimitReport limit_values(const OCAutomaton& a, double tol, int n_max);

/**
 * Checks the optimality precondition that every limit value is 0 or 1.
 * holds is true iff no stabilized limit sits away from both 0 and 1;
 * unstabilized controls are excluded from the conjunction but flagged
 * inconclusive.
 */
struct CorollaryVerdict {
  bool holds = false;
  bool inconclusive = false;
  LimitReport report;
};
CorollaryVerdict check_corollary_oc(const OCAutomaton& a, double tol, int n_max);

}  // namespace rsg
