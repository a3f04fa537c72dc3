#pragma once

#include <map>
#include <optional>

#include "recert/game.hpp"
#include "recert/tracking.hpp"

namespace recert {

/// Deterministic parity automaton over the game's colour alphabet, min-even:
/// a colour word is accepted iff the least priority seen infinitely often is
/// even. Transitions are total over [0, num_colours).
struct ParityAutomaton {
  int num_states = 0;
  int initial = 0;
  std::vector<std::vector<int>> delta;  // [state][colour] -> state
  std::vector<int> priority;            // [state] -> nonnegative priority
};

/// Winning condition on colour sequences. All variants compile to a
/// deterministic parity automaton.
struct ObjectiveSpec {
  enum class Kind { Reachability, Safety, Buchi, CoBuchi, Parity, Automaton };

  Kind kind = Kind::Buchi;
  std::vector<int> colour_set;         // reachability/safety/buchi/cobuchi target set
  std::map<int, int> colour_priority;  // parity: colour -> priority (total)
  std::optional<ParityAutomaton> automaton;

  static ObjectiveSpec reachability(std::vector<int> colours);
  static ObjectiveSpec safety(std::vector<int> avoid);
  static ObjectiveSpec buchi(std::vector<int> colours);
  static ObjectiveSpec cobuchi(std::vector<int> colours);
  static ObjectiveSpec parity(std::map<int, int> colour_priority);
  static ObjectiveSpec from_automaton(ParityAutomaton dpa);
};

/// Whether a colour word satisfies the objective when it is ultimately
/// periodic: `prefix` then `cycle` forever. Cycle must be nonempty.
bool lasso_satisfies(const ObjectiveSpec& spec, const std::vector<int>& prefix,
                     const std::vector<int>& cycle);

struct ObservabilityReport {
  bool observable = true;
  /// (player, state, state): the player confuses two states of different
  /// colours, so no agent-visible winning condition can use them.
  std::vector<std::tuple<int, int, int>> violations;
};

/// The colouring must be measurable by every player (hence by the observer):
/// states a player cannot tell apart must have one colour.
ObservabilityReport check_observability(const GameStructure& g);

/// Compiles the objective to a deterministic min-even parity automaton over
/// colour ids [0, num_colours). Throws std::invalid_argument on colour ids
/// out of range, a non-total parity mapping, or a non-total automaton.
ParityAutomaton compile_objective(const ObjectiveSpec& spec, int num_colours);

/// Two-player zero-sum parity game between the coalition (picks an edge
/// group) and nature (picks a successor inside the group). Nodes carry the
/// automaton state reached after reading the colour of their arena node, so
/// the priority of a node is the automaton's priority there.
struct ParityGame {
  struct Node {
    bool coalition = true;  // false: nature resolves a chosen group
    int priority = 0;
    std::vector<int> succ;
    int arena_node = 0;
    int dpa_state = 0;
    int group = -1;  // nature nodes: which edge group was chosen
  };

  std::vector<Node> nodes;
  int initial = 0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
};

/// Product of the knowledge arena with the objective automaton. The automaton
/// starts by reading the initial node's colour. Refuses games whose colouring
/// fails check_observability.
ParityGame build_parity_game(const GameStructure& g, const TrackingArena& arena,
                             const ParityAutomaton& dpa);

}  // namespace recert
