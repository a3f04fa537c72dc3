#pragma once

// Test-side oracles: seeded generators plus independent reimplementations of
// the library's decision procedures, written from the definitions rather than
// from the library code. Agreement between the two code paths is what the
// acceptance suite certifies.

#include <cstdint>
#include <string>
#include <vector>

#include "recert/game.hpp"
#include "recert/objective.hpp"
#include "recert/synthesis.hpp"
#include "recert/tracking.hpp"

namespace recert::oracle {

// --- generators (all deterministic in the seed) ------------------------------

/// Valid random game: up to 5 states, 2 players, 2 actions per player; total
/// move relation with occasional extra nondeterminism; random observation
/// partitions and up to 3 colours.
GameStructure random_game(std::uint64_t seed);

/// Random game on which certainty provably recurs: the non-hub states form a
/// DAG and every back edge returns to a hub state that all players observe
/// uniquely, so every cycle passes through a fully revealed state.
GameStructure random_hub_game(std::uint64_t seed);

/// Random parity game: up to 7 nodes, priorities 0..3, out-degree 1..3,
/// random ownership. Initial node 0.
ParityGame random_parity_game(std::uint64_t seed);

// --- independent reference implementations -----------------------------------

/// Observer partition by iterated pairwise merging over every player's
/// confusions (no union-find). Returns class ids numbered by smallest member.
std::vector<int> merged_observer_classes(const GameStructure& g);

/// One observer belief step straight off the move list: states reachable from
/// the belief by any move whose target lies in the observed class.
std::vector<int> next_belief(const GameStructure& g, const std::vector<int>& belief,
                             const std::vector<int>& class_of, int observed_class);

/// The guessed-history set of the pair construction, advanced one step: all
/// states an observationally equivalent history could be in after the real
/// play moved to `real_successor`. Starts from {initial}.
std::vector<int> next_guesses(const GameStructure& g, const std::vector<int>& guesses,
                              const std::vector<int>& class_of, int real_successor);

/// Canonical signature by trying every world permutation. Only for small
/// models; throws std::invalid_argument above 8 worlds.
std::string perm_canonical_string(const EpistemicModel& m);

/// Node count of the knowledge graph, unravelled with its own model update,
/// assignment enumeration and the all-permutation signature above.
struct UnravelResult {
  int nodes = 0;
  bool capped = false;            // stopped at the node cap or a >8-world model
  std::vector<int> group_counts;  // per node, sorted: distinct successor sets
};
UnravelResult unravel_knowledge_graph(const GameStructure& g, int cap);

/// Winning region by enumerating every positional coalition strategy and
/// checking, per strategy, from which nodes nature cannot reach a cycle with
/// odd minimal priority.
std::vector<bool> brute_parity_regions(const ParityGame& pg);

/// The objective kinds evaluated directly from their definitions on an
/// ultimately periodic colour word (no automaton involved). Automaton-kind
/// specs are not supported here.
bool naive_lasso_verdict(const ObjectiveSpec& spec, const std::vector<int>& prefix,
                         const std::vector<int>& cycle);

/// Exhaustive search over strategy profiles where every player's machine has
/// at most `bound` states, for the Büchi objective "visit one of
/// `buchi_colours` infinitely often". Machine transitions are fixed lazily as
/// the joint product reaches them; a branch dies as soon as the partial
/// product contains a reachable cycle avoiding the target colours.
struct ProfileSearchResult {
  bool found = false;
  bool exhausted = true;  // false when the probe budget ran out
  long long probes = 0;
  std::vector<StrategyMachine> machines;  // set when found
};
ProfileSearchResult search_profiles(const GameStructure& g, const std::vector<int>& buchi_colours,
                                    int bound, long long budget);

}  // namespace recert::oracle
