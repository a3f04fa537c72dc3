#pragma once

#include <optional>
#include <string>

#include "recert/solver.hpp"

namespace recert {

/// Everything produced while deciding who wins: kept together because the
/// strategy distribution step needs all of it.
struct SolveOutcome {
  bool coalition_wins = false;
  CertaintyVerdict certainty;
  TrackingArena arena;
  ParityAutomaton dpa;
  ParityGame game;
  ParitySolution solution;
};

/// Decides whether the grand coalition can enforce the objective against
/// nature. Requires an observable colouring; throws NodeLimitError when the
/// knowledge graph does not stay finite enough to build.
SolveOutcome decide_coalition_winner(const GameStructure& g, const ObjectiveSpec& spec,
                                     int node_limit = kDefaultNodeLimit);

/// Finite-state controller for one player: a Moore machine reading the
/// player's own observations. Step may be partial; observations that cannot
/// occur under the joint strategy have no transition.
struct StrategyMachine {
  int player = 1;  // 1-based
  std::string player_name;
  std::vector<std::string> state_names;  // "q0", "q1", ...
  int initial = 0;
  std::vector<int> output;              // state -> action id of this player
  std::vector<std::map<int, int>> step;  // state -> (observation id -> state)

  int num_states() const { return static_cast<int>(state_names.size()); }
  /// -1 when no transition is defined for this observation.
  int advance(int state, int observation) const;
};

/// Splits the coalition's winning strategy into one machine per player. Only
/// meaningful when the coalition wins from the initial node; throws
/// std::invalid_argument otherwise. Machine states are pairs (reachable
/// parity-game node, own-knowledge class there); outputs come from the edge
/// group chosen by the solved strategy.
std::vector<StrategyMachine> distribute_strategy(const GameStructure& g,
                                                 const SolveOutcome& outcome);

/// The game unfolded under a fixed strategy profile: only nature branches.
/// Nodes are (game state, machine states, objective automaton state).
struct VerificationProduct {
  struct Node {
    int game_state = 0;
    std::vector<int> machine_states;
    int dpa_state = 0;
    int priority = 0;
    ActionProfile profile;  // what the machines prescribe here
    std::vector<int> succ;
  };

  std::vector<Node> nodes;
  int initial = 0;
  /// Set when some reachable observation has no machine transition; the
  /// history that gets stuck.
  std::optional<History> undefined_at;
};

VerificationProduct build_verification_product(const GameStructure& g,
                                               const std::vector<StrategyMachine>& machines,
                                               const ParityAutomaton& dpa);

struct VerificationReport {
  bool pass = false;
  std::string message;
  /// On failure by cycle: a nature play the profile loses.
  std::optional<LassoPlay> counterexample;
  std::optional<History> undefined_at;
  long long product_nodes = 0;
  long long cycles_checked = 0;
};

/// Model-checks a strategy profile against the objective: every nature
/// resolution must satisfy it, and every reachable observation must have a
/// defined machine step.
VerificationReport verify_profile(const GameStructure& g,
                                  const std::vector<StrategyMachine>& machines,
                                  const ObjectiveSpec& spec);

struct SimulationReport {
  bool ok = true;
  std::string message;
  History play;
  std::vector<std::vector<int>> beliefs;     // observer belief per position
  std::map<int, long long> gap_histogram;    // rounds between certainty points
  std::map<std::string, long long> colour_visits;
  std::optional<History> undefined_at;
};

/// Runs the profile with nature resolved by a seeded Mersenne Twister and
/// reports what the observer learns along the way.
SimulationReport simulate(const GameStructure& g, const std::vector<StrategyMachine>& machines,
                          int steps, std::uint64_t seed);

}  // namespace recert
