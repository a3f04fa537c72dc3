#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "recert/game.hpp"

namespace recert {

/// One state of the deterministic belief view: the state the play is actually
/// in, paired with the set of states the observer considers possible. The
/// belief set always contains `current` and is constant across states the
/// observer cannot tell apart.
struct BeliefState {
  int current = 0;
  std::vector<int> belief;  // sorted, nonempty

  auto operator<=>(const BeliefState&) const = default;

  bool certain() const { return belief.size() == 1; }
};

/// Deterministic automaton tracking the observer's belief along a play.
/// State 0 is the initial state (v0, {v0}); accepting states are exactly the
/// certainty points. Input symbols are (action profile, successor state);
/// the belief update only depends on the successor's observer class, since
/// the observer has a single action and sees no move labels.
struct CertaintyAutomaton {
  std::vector<BeliefState> states;  // discovered in BFS order, index 0 initial
  std::vector<bool> accepting;
  // transitions[s]: (profile code, successor game state) -> automaton state
  std::vector<std::map<std::pair<int, int>, int>> transitions;

  int num_states() const { return static_cast<int>(states.size()); }
  /// -1 when the symbol does not continue any history from this state.
  int step(int state, int profile_code, int successor_state) const;
};

CertaintyAutomaton build_certainty_automaton(const GameStructure& g);

/// Belief sets after each position of an observation-class sequence
/// (class ids as produced by observe(..., kObserver)).
struct BeliefRun {
  std::vector<std::vector<int>> beliefs;       // one sorted set per position
  std::optional<std::size_t> empty_from;       // first position with empty belief, if any
};
BeliefRun belief_run(const GameStructure& g, const std::vector<int>& observer_classes);

/// True when every history the observer cannot distinguish from h ends in the
/// same state as h.
bool attains_certainty(const GameStructure& g, const History& h);

class NotRecurringError : public std::runtime_error {
 public:
  NotRecurringError(std::string msg, LassoPlay witness)
      : std::runtime_error(std::move(msg)), witness(std::move(witness)) {}
  LassoPlay witness;
};

struct CertaintyVerdict {
  bool recurring = false;
  /// When not recurring: a play along which the observer is certain only
  /// finitely often (uncertain on the whole cycle).
  std::optional<LassoPlay> witness;
  /// When recurring: least t such that certainty recurs within every window
  /// of t rounds, and the coarse a-priori bound (belief-view states + 1).
  std::optional<int> minimal_period;
  int automaton_bound = 0;
};

/// Decides whether the observer is certain infinitely often on every play.
CertaintyVerdict decide_recurring_certainty(const GameStructure& g);

struct CertaintyPeriod {
  int minimal = 0;
  int automaton_bound = 0;
};
/// Throws NotRecurringError when certainty does not recur.
CertaintyPeriod certainty_period(const GameStructure& g);

/// Diagnostic cross-check: the textbook nondeterministic construction that
/// guesses a second, observationally equivalent history and accepts when the
/// two end in different states. Determinised by the subset construction and
/// complemented, it must agree with the belief view everywhere.
enum class PairObsMode {
  Agent0,      // guessed successor lies in the same observer class (the definition)
  AllPlayers,  // stricter reading: every player's observation matches
};

class PairSubsetTracker {
 public:
  PairSubsetTracker(const GameStructure& g, PairObsMode mode);

  void reset();
  /// Advance on one history step of the real play. Returns false when the
  /// input is not a move of the game (tracker state is then unspecified).
  bool step(int profile_code, int successor_state);
  /// No surviving guess ends in a state other than the real one.
  bool certain() const;
  const std::set<std::pair<int, int>>& pairs() const { return pairs_; }

 private:
  const GameStructure* g_;
  PairObsMode mode_;
  MoveIndex index_;
  Agent0Partition part_;
  std::set<std::pair<int, int>> pairs_;  // (real state, guessed state)
};

struct CrossCheckReport {
  bool agree = true;
  long long joint_states = 0;
  std::optional<History> divergence;  // shortest history where the two answers differ
};

/// Exhaustively compares the belief view against the determinised pair
/// construction over all reachable joint configurations (hence all histories).
CrossCheckReport cross_check_certainty(const GameStructure& g, PairObsMode mode);

}  // namespace recert
