#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace recert {

/// Pseudo-agent 0: the least-informed observer. Players are 1..n.
inline constexpr int kObserver = 0;

struct ActionProfile {
  std::vector<int> actions;  // one action id per player, index = player - 1

  auto operator<=>(const ActionProfile&) const = default;
};

struct Move {
  int src = 0;
  ActionProfile profile;
  int dst = 0;

  auto operator<=>(const Move&) const = default;
};

struct Player {
  std::string name;
  std::vector<std::string> actions;    // action id -> symbol
  std::vector<int> obs_of_state;       // state id -> observation id
  std::vector<std::string> obs_names;  // observation id -> symbol
};

/// Finite game structure: states, labelled move relation, one observation
/// function per player, and a colouring used by the winning condition.
/// Values are immutable once built; all operations below are pure.
struct GameStructure {
  std::vector<std::string> states;  // state id -> name
  int initial = 0;
  std::vector<Player> players;
  std::vector<Move> moves;
  std::vector<int> colour_of;        // state id -> colour id
  std::vector<std::string> colours;  // colour id -> symbol

  int num_states() const { return static_cast<int>(states.size()); }
  int num_players() const { return static_cast<int>(players.size()); }
  int num_colours() const { return static_cast<int>(colours.size()); }

  int state_id(const std::string& name) const;  // -1 when unknown
  int colour_id(const std::string& name) const;
};

/// Alternating sequence v0, a0, v1, ..., vl. profiles.size() + 1 == states.size().
struct History {
  std::vector<int> states;
  std::vector<ActionProfile> profiles;

  auto operator<=>(const History&) const = default;

  int length() const { return static_cast<int>(profiles.size()); }  // rounds played
  int last() const { return states.back(); }

  static History initial(const GameStructure& g) { return History{{g.initial}, {}}; }
  History extended(const ActionProfile& a, int state) const;
};

/// Finite representation of an ultimately periodic play: prefix, then the
/// cycle repeated forever. The cycle starts at the prefix's last state and
/// its final step returns there.
struct LassoPlay {
  History prefix;
  std::vector<std::pair<ActionProfile, int>> cycle;

  auto operator<=>(const LassoPlay&) const = default;

  /// The play unrolled for `rounds` rounds.
  History unroll(int rounds) const;
};

/// State partition of the observer: the transitive closure of all
/// single-player confusions. Class ids are numbered by smallest member.
struct Agent0Partition {
  std::vector<int> class_of;              // state id -> class id
  std::vector<std::vector<int>> members;  // class id -> sorted member states

  int num_classes() const { return static_cast<int>(members.size()); }
};

struct Violation {
  std::string kind;  // "players" | "actions" | "observations" | "initial" | "move" | "totality" | "observability" | "colours"
  std::string message;
};

/// Checks every structural invariant; an empty result means the game is valid.
std::vector<Violation> validate_structure(const GameStructure& g);

bool is_valid_history(const GameStructure& g, const History& h);
bool is_valid_lasso(const GameStructure& g, const LassoPlay& l);

/// Observation sequence of a history, one symbol per state. For the observer
/// (agent 0) the symbols are Agent0Partition class ids, otherwise the
/// player's observation ids. Throws on an unknown agent.
std::vector<int> observe(const GameStructure& g, const History& h, int agent);

/// Equal observation sequences; players additionally require equal own-action
/// sequences (a player's own action is part of what he observes).
bool indistinguishable(const GameStructure& g, const History& h1, const History& h2, int agent);

Agent0Partition agent0_partition(const GameStructure& g);

/// Move lookup tables for a valid game. Profiles are encoded in mixed radix
/// with the last player as the fastest digit, so ascending codes enumerate
/// profiles in lexicographic action order.
class MoveIndex {
 public:
  explicit MoveIndex(const GameStructure& g);

  int num_profiles() const { return num_profiles_; }
  int encode(const ActionProfile& a) const;
  ActionProfile decode(int code) const;

  const std::vector<int>& successors(int state, int profile_code) const {
    return succ_[state][profile_code];
  }
  /// Union of successors over all profiles (what the observer must consider).
  const std::vector<int>& successors_any(int state) const { return succ_any_[state]; }

  bool has_move(int src, int profile_code, int dst) const;

 private:
  std::vector<int> strides_;
  int num_profiles_ = 1;
  std::vector<std::vector<std::vector<int>>> succ_;  // [state][profile] -> sorted targets
  std::vector<std::vector<int>> succ_any_;
};

namespace detail {
/// Insert into a sorted unique vector; returns true when newly added.
bool sorted_insert(std::vector<int>& v, int x);
bool sorted_contains(const std::vector<int>& v, int x);
}  // namespace detail

}  // namespace recert
