#pragma once

// In-code builders for the five games shipped under games/. Tests construct
// games programmatically so they do not depend on the parser; io tests then
// check that parsing the shipped files yields exactly these structures.

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "recert/game.hpp"
#include "recert/objective.hpp"

namespace recert::fixtures {

struct PlayerSpec {
  std::string name;
  std::vector<std::string> actions;
  std::vector<std::string> obs;  // one symbol per state, in state order
};

struct MoveSpec {
  std::string from;
  std::vector<std::string> actions;
  std::vector<std::string> to;
};

/// Observation and colour symbols are interned in state order, matching the
/// file format's convention.
inline GameStructure make_game(std::vector<std::pair<std::string, std::string>> state_colours,
                               const std::string& initial, std::vector<PlayerSpec> players,
                               std::vector<MoveSpec> moves) {
  GameStructure g;
  std::map<std::string, int> colour_id;
  for (auto& [state, colour] : state_colours) {
    g.states.push_back(state);
    auto [it, fresh] = colour_id.try_emplace(colour, static_cast<int>(g.colours.size()));
    if (fresh) g.colours.push_back(colour);
    g.colour_of.push_back(it->second);
  }
  g.initial = g.state_id(initial);

  for (PlayerSpec& spec : players) {
    Player p;
    p.name = spec.name;
    p.actions = spec.actions;
    std::map<std::string, int> obs_id;
    for (const std::string& sym : spec.obs) {
      auto [it, fresh] = obs_id.try_emplace(sym, static_cast<int>(p.obs_names.size()));
      if (fresh) p.obs_names.push_back(sym);
      p.obs_of_state.push_back(it->second);
    }
    g.players.push_back(std::move(p));
  }

  for (MoveSpec& spec : moves) {
    ActionProfile profile;
    for (std::size_t i = 0; i < spec.actions.size(); ++i) {
      const std::vector<std::string>& acts = g.players[i].actions;
      int id = -1;
      for (std::size_t a = 0; a < acts.size(); ++a)
        if (acts[a] == spec.actions[i]) id = static_cast<int>(a);
      profile.actions.push_back(id);
    }
    for (const std::string& target : spec.to)
      g.moves.push_back(Move{g.state_id(spec.from), profile, g.state_id(target)});
  }
  return g;
}

/// Two states, one player with an injective observation: certainty at every
/// position. Büchi on the colour of s1.
inline GameStructure transparent() {
  return make_game({{"s0", "1"}, {"s1", "0"}}, "s0",
                   {{"P1", {"a", "b"}, {"o0", "o1"}}},
                   {{"s0", {"a"}, {"s1"}},
                    {"s0", {"b"}, {"s0"}},
                    {"s1", {"a"}, {"s0"}},
                    {"s1", {"b"}, {"s0"}}});
}

/// Nature hides which of u1/u2 was entered (P1 sees one symbol for both) but
/// the next step always returns to the fully revealed s0.
inline GameStructure veil_and_reveal() {
  return make_game({{"s0", "0"}, {"u1", "1"}, {"u2", "1"}}, "s0",
                   {{"P1", {"w"}, {"S", "U", "U"}},
                    {"P2", {"w"}, {"s0", "u1", "u2"}}},
                   {{"s0", {"w", "w"}, {"u1", "u2"}},
                    {"u1", {"w", "w"}, {"s0"}},
                    {"u2", {"w", "w"}, {"s0"}}});
}

/// Like veil_and_reveal but the fog never lifts: u1/u2 shuffle into each
/// other forever, so the observer is uncertain from round one on.
inline GameStructure eternal_fog() {
  return make_game({{"s0", "0"}, {"u1", "1"}, {"u2", "1"}}, "s0",
                   {{"P1", {"w"}, {"S", "U", "U"}},
                    {"P2", {"w"}, {"s0", "u1", "u2"}}},
                   {{"s0", {"w", "w"}, {"u1", "u2"}},
                    {"u1", {"w", "w"}, {"u1", "u2"}},
                    {"u2", {"w", "w"}, {"u1", "u2"}}});
}

/// P1 alone must guess nature's coin: from x1 action a reaches t, from x2 it
/// reaches bot, and P1 cannot tell x1 from x2. P2 sees everything but has no
/// action to communicate with. The coalition loses Büchi(t).
inline GameStructure no_signal() {
  return make_game({{"s0", "1"}, {"x1", "1"}, {"x2", "1"}, {"t", "0"}, {"bot", "1"}}, "s0",
                   {{"P1", {"a", "b"}, {"S", "X", "X", "T", "B"}},
                    {"P2", {"w"}, {"s0", "x1", "x2", "t", "bot"}}},
                   {{"s0", {"a", "w"}, {"x1", "x2"}},
                    {"s0", {"b", "w"}, {"x1", "x2"}},
                    {"x1", {"a", "w"}, {"t"}},
                    {"x1", {"b", "w"}, {"bot"}},
                    {"x2", {"a", "w"}, {"bot"}},
                    {"x2", {"b", "w"}, {"t"}},
                    {"t", {"a", "w"}, {"t"}},
                    {"t", {"b", "w"}, {"t"}},
                    {"bot", {"a", "w"}, {"bot"}},
                    {"bot", {"b", "w"}, {"bot"}}});
}

/// no_signal with a middle round in which P2's action is relayed to P1 as an
/// observation: P2 can signal nature's coin, and the coalition wins.
inline GameStructure signal() {
  auto moves = std::vector<MoveSpec>{
      {"s0", {"a", "a"}, {"x1", "x2"}},
      {"s0", {"a", "b"}, {"x1", "x2"}},
      {"s0", {"b", "a"}, {"x1", "x2"}},
      {"s0", {"b", "b"}, {"x1", "x2"}},
      {"x1", {"a", "a"}, {"m1a"}},
      {"x1", {"b", "a"}, {"m1a"}},
      {"x1", {"a", "b"}, {"m1b"}},
      {"x1", {"b", "b"}, {"m1b"}},
      {"x2", {"a", "a"}, {"m2a"}},
      {"x2", {"b", "a"}, {"m2a"}},
      {"x2", {"a", "b"}, {"m2b"}},
      {"x2", {"b", "b"}, {"m2b"}},
      {"m1a", {"a", "a"}, {"t"}},
      {"m1a", {"a", "b"}, {"t"}},
      {"m1a", {"b", "a"}, {"bot"}},
      {"m1a", {"b", "b"}, {"bot"}},
      {"m1b", {"a", "a"}, {"t"}},
      {"m1b", {"a", "b"}, {"t"}},
      {"m1b", {"b", "a"}, {"bot"}},
      {"m1b", {"b", "b"}, {"bot"}},
      {"m2a", {"a", "a"}, {"bot"}},
      {"m2a", {"a", "b"}, {"bot"}},
      {"m2a", {"b", "a"}, {"t"}},
      {"m2a", {"b", "b"}, {"t"}},
      {"m2b", {"a", "a"}, {"bot"}},
      {"m2b", {"a", "b"}, {"bot"}},
      {"m2b", {"b", "a"}, {"t"}},
      {"m2b", {"b", "b"}, {"t"}},
      {"t", {"a", "a"}, {"s0"}},
      {"t", {"a", "b"}, {"s0"}},
      {"t", {"b", "a"}, {"s0"}},
      {"t", {"b", "b"}, {"s0"}},
      {"bot", {"a", "a"}, {"s0"}},
      {"bot", {"a", "b"}, {"s0"}},
      {"bot", {"b", "a"}, {"s0"}},
      {"bot", {"b", "b"}, {"s0"}},
  };
  return make_game({{"s0", "1"},
                    {"x1", "1"},
                    {"x2", "1"},
                    {"m1a", "1"},
                    {"m1b", "1"},
                    {"m2a", "1"},
                    {"m2b", "1"},
                    {"t", "0"},
                    {"bot", "1"}},
                   "s0",
                   {{"P1", {"a", "b"}, {"S", "X", "X", "Ma", "Mb", "Ma", "Mb", "T", "B"}},
                    {"P2", {"a", "b"},
                     {"s0", "x1", "x2", "m1a", "m1b", "m2a", "m2b", "t", "bot"}}},
                   std::move(moves));
}

/// The Büchi objective every fixture ships with: visit the colour named "0"
/// infinitely often.
inline ObjectiveSpec buchi_zero(const GameStructure& g) {
  return ObjectiveSpec::buchi({g.colour_id("0")});
}

}  // namespace recert::fixtures
