#pragma once

#include <map>
#include <optional>

#include "recert/certainty.hpp"
#include "recert/game.hpp"

namespace recert {

/// Pointed knowledge structure over game states: a finite set of worlds, the
/// state each world sits in, and one equivalence per agent (observer 0 and
/// players 1..n) given as class ids. Class ids are normalised by first
/// occurrence along the world order, so equal structs mean equal structures.
struct EpistemicModel {
  std::vector<int> world_state;                // world -> game state
  std::vector<std::vector<int>> agent_class;   // [agent][world] -> class id

  bool operator==(const EpistemicModel&) const = default;

  int num_worlds() const { return static_cast<int>(world_state.size()); }
  int num_agents() const { return static_cast<int>(agent_class.size()); }
  bool singleton() const { return num_worlds() == 1; }

  /// All worlds sit in states of one colour; that colour. Throws otherwise.
  int colour(const GameStructure& g) const;
};

EpistemicModel initial_model(const GameStructure& g);
EpistemicModel singleton_model(const GameStructure& g, int state);

/// Renormalises every agent's class ids by first occurrence.
EpistemicModel normalise_classes(EpistemicModel m);

/// A choice of one action per player per own-knowledge class: what a player
/// can actually base his move on. Stored per world; constant on each of the
/// player's classes by construction.
struct AdmissibleAssignment {
  std::vector<ActionProfile> profile_of;  // world -> full action profile

  auto operator<=>(const AdmissibleAssignment&) const = default;
};

/// All admissible assignments, enumerated with the last (player, class) digit
/// fastest; the first entry gives every player his first action everywhere.
std::vector<AdmissibleAssignment> admissible_assignments(const GameStructure& g,
                                                         const EpistemicModel& m);
long long count_admissible_assignments(const GameStructure& g, const EpistemicModel& m);

/// Which relations glue successor worlds into one observation class for the
/// observer: all agents including the observer (the default), or the players
/// only (a strictly finer diagnostic variant).
enum class ComponentMode { AllAgents, PlayersOnly };

struct UpdateComponent {
  EpistemicModel model;  // already certainty-collapsed and class-normalised
  bool collapsed = false;
  /// Pre-collapse successor worlds as (parent world, successor state), in
  /// enumeration order, and the model world each one became (all 0 when
  /// collapsed to a singleton).
  std::vector<std::pair<int, int>> children;
  std::vector<int> world_of_child;
};

/// One knowledge-update step: unfold every world along the assignment, relate
/// successor worlds that share history knowledge and an observation, and
/// split into observer classes. Every component is checked to be a single
/// observer class. When all worlds of a component agree on the state, the
/// component collapses to the singleton model of that state.
std::vector<UpdateComponent> update_model(const GameStructure& g, const EpistemicModel& m,
                                          const AdmissibleAssignment& a,
                                          ComponentMode mode = ComponentMode::AllAgents);

EpistemicModel certainty_collapse(const EpistemicModel& m);

/// Canonical form under world renaming: a total invariant key plus the
/// relabelled model. Two models get the same key iff they are isomorphic.
struct CanonicalKey {
  std::vector<int> bits;

  auto operator<=>(const CanonicalKey&) const = default;
};

struct Canonicalised {
  CanonicalKey key;
  EpistemicModel model;
  std::vector<int> world_perm;  // old world -> position in canonical order
};

Canonicalised canonicalise(const EpistemicModel& m);
CanonicalKey canonical_key(const EpistemicModel& m);

class NodeLimitError : public std::runtime_error {
 public:
  NodeLimitError(std::string msg, long long nodes, int largest_model)
      : std::runtime_error(std::move(msg)), nodes(nodes), largest_model(largest_model) {}
  long long nodes = 0;
  int largest_model = 0;
};

/// The reachable knowledge graph. A node is a canonical epistemic model; a
/// coalition choice is an edge group: assignments leading to the same set of
/// successor nodes are merged, keeping the enumeration-least representative.
/// Nature then picks one successor from the group's set.
struct TrackingArena {
  struct EdgeGroup {
    AdmissibleAssignment representative;
    std::vector<int> successors;  // sorted node ids, duplicates merged
  };
  struct Node {
    EpistemicModel model;
    CanonicalKey key;
    int colour = 0;
    std::vector<EdgeGroup> groups;
  };

  std::vector<Node> nodes;
  int initial = 0;
  bool recurring = true;
  ComponentMode mode = ComponentMode::AllAgents;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int find(const CanonicalKey& key) const;  // -1 when absent
};

inline constexpr int kDefaultNodeLimit = 100000;

/// When certainty never recurs the unfolded models can double in size every
/// round, exhausting memory long before the node limit is in sight; a model
/// this large aborts the build instead.
inline constexpr int kModelWorldLimit = 1 << 20;

/// Breadth-first unfolding with isomorphism-based memoisation. Warns via the
/// `recurring` flag (set from the belief view) but builds regardless; throws
/// NodeLimitError past `node_limit` distinct nodes.
TrackingArena build_tracking_arena(const GameStructure& g, int node_limit = kDefaultNodeLimit,
                                   ComponentMode mode = ComponentMode::AllAgents);

}  // namespace recert
