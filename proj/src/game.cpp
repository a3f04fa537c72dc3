#include "recert/game.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace recert {

namespace detail {

bool sorted_insert(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

bool sorted_contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

}  // namespace detail

int GameStructure::state_id(const std::string& name) const {
  for (int v = 0; v < num_states(); ++v)
    if (states[v] == name) return v;
  return -1;
}

int GameStructure::colour_id(const std::string& name) const {
  for (int c = 0; c < num_colours(); ++c)
    if (colours[c] == name) return c;
  return -1;
}

History History::extended(const ActionProfile& a, int state) const {
  History h = *this;
  h.profiles.push_back(a);
  h.states.push_back(state);
  return h;
}

History LassoPlay::unroll(int rounds) const {
  History h = prefix;
  if (cycle.empty()) return h;
  std::size_t i = 0;
  while (h.length() < rounds) {
    h = h.extended(cycle[i].first, cycle[i].second);
    i = (i + 1) % cycle.size();
  }
  return h;
}

namespace {

std::string describe_profile(const GameStructure& g, const ActionProfile& a) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    if (i) os << ",";
    int id = a.actions[i];
    if (i < g.players.size() && id >= 0 && id < static_cast<int>(g.players[i].actions.size()))
      os << g.players[i].actions[id];
    else
      os << "#" << id;
  }
  os << ")";
  return os.str();
}

}  // namespace

std::vector<Violation> validate_structure(const GameStructure& g) {
  std::vector<Violation> out;
  auto add = [&out](std::string kind, std::string msg) {
    out.push_back(Violation{std::move(kind), std::move(msg)});
  };

  if (g.states.empty()) add("states", "game has no states");
  if (g.players.empty()) add("players", "game has no players");
  {
    std::set<std::string> seen;
    for (const auto& s : g.states)
      if (!seen.insert(s).second) add("states", "duplicate state name '" + s + "'");
  }
  if (g.initial < 0 || g.initial >= g.num_states())
    add("initial", "initial state id " + std::to_string(g.initial) + " out of range");

  for (int i = 0; i < g.num_players(); ++i) {
    const Player& p = g.players[i];
    const std::string who = "player " + std::to_string(i + 1) + " ('" + p.name + "')";
    if (p.actions.empty()) add("actions", who + " has an empty action set");
    std::set<std::string> seen;
    for (const auto& a : p.actions)
      if (!seen.insert(a).second) add("actions", who + " has duplicate action '" + a + "'");
    if (static_cast<int>(p.obs_of_state.size()) != g.num_states()) {
      add("observations", who + " observation map covers " + std::to_string(p.obs_of_state.size()) +
                              " states, expected " + std::to_string(g.num_states()));
    } else {
      for (int v = 0; v < g.num_states(); ++v) {
        int o = p.obs_of_state[v];
        if (o < 0 || o >= static_cast<int>(p.obs_names.size()))
          add("observations", who + " maps state '" + g.states[v] + "' to unknown observation id " +
                                  std::to_string(o));
      }
    }
  }

  if (static_cast<int>(g.colour_of.size()) != g.num_states()) {
    add("colours", "colouring covers " + std::to_string(g.colour_of.size()) + " states, expected " +
                       std::to_string(g.num_states()));
  } else {
    for (int v = 0; v < g.num_states(); ++v)
      if (g.colour_of[v] < 0 || g.colour_of[v] >= g.num_colours())
        add("colours", "state '" + g.states[v] + "' has unknown colour id " +
                           std::to_string(g.colour_of[v]));
  }

  for (const Move& m : g.moves) {
    bool bad = false;
    if (m.src < 0 || m.src >= g.num_states()) {
      add("move", "move source id " + std::to_string(m.src) + " out of range");
      bad = true;
    }
    if (m.dst < 0 || m.dst >= g.num_states()) {
      add("move", "move target id " + std::to_string(m.dst) + " out of range");
      bad = true;
    }
    if (static_cast<int>(m.profile.actions.size()) != g.num_players()) {
      add("move", "move profile lists " + std::to_string(m.profile.actions.size()) +
                      " actions, expected " + std::to_string(g.num_players()));
      bad = true;
    } else {
      for (int i = 0; i < g.num_players(); ++i) {
        int a = m.profile.actions[i];
        if (a < 0 || a >= static_cast<int>(g.players[i].actions.size())) {
          add("move", "move uses unknown action id " + std::to_string(a) + " for player " +
                          std::to_string(i + 1));
          bad = true;
        }
      }
    }
    if (bad) return out;  // ids are unusable below; report what we have
  }

  // Totality: every state must offer at least one successor for every profile.
  if (!g.states.empty() && !g.players.empty()) {
    std::vector<int> radix(g.num_players());
    long long profiles = 1;
    for (int i = 0; i < g.num_players(); ++i) {
      radix[i] = std::max<int>(1, static_cast<int>(g.players[i].actions.size()));
      profiles *= radix[i];
    }
    std::set<std::pair<int, long long>> covered;
    for (const Move& m : g.moves) {
      long long code = 0;
      for (int i = 0; i < g.num_players(); ++i) code = code * radix[i] + m.profile.actions[i];
      covered.insert({m.src, code});
    }
    for (int v = 0; v < g.num_states(); ++v) {
      for (long long code = 0; code < profiles; ++code) {
        if (covered.count({v, code})) continue;
        ActionProfile a;
        a.actions.resize(g.num_players());
        long long rest = code;
        for (int i = g.num_players() - 1; i >= 0; --i) {
          a.actions[i] = static_cast<int>(rest % radix[i]);
          rest /= radix[i];
        }
        add("totality", "state '" + g.states[v] + "' has no move under profile " +
                            describe_profile(g, a));
      }
    }
  }

  return out;
}

bool is_valid_history(const GameStructure& g, const History& h) {
  if (h.states.empty()) return false;
  if (h.states.size() != h.profiles.size() + 1) return false;
  if (h.states.front() != g.initial) return false;
  for (std::size_t i = 0; i < h.profiles.size(); ++i) {
    Move step{h.states[i], h.profiles[i], h.states[i + 1]};
    if (std::find(g.moves.begin(), g.moves.end(), step) == g.moves.end()) return false;
  }
  return true;
}

bool is_valid_lasso(const GameStructure& g, const LassoPlay& l) {
  if (!is_valid_history(g, l.prefix)) return false;
  if (l.cycle.empty()) return false;
  int at = l.prefix.last();
  for (const auto& [a, v] : l.cycle) {
    Move step{at, a, v};
    if (std::find(g.moves.begin(), g.moves.end(), step) == g.moves.end()) return false;
    at = v;
  }
  return at == l.prefix.last();
}

std::vector<int> observe(const GameStructure& g, const History& h, int agent) {
  if (agent < 0 || agent > g.num_players())
    throw std::out_of_range("unknown agent " + std::to_string(agent));
  std::vector<int> out;
  out.reserve(h.states.size());
  if (agent == kObserver) {
    Agent0Partition part = agent0_partition(g);
    for (int v : h.states) out.push_back(part.class_of[v]);
  } else {
    const Player& p = g.players[agent - 1];
    for (int v : h.states) out.push_back(p.obs_of_state[v]);
  }
  return out;
}

bool indistinguishable(const GameStructure& g, const History& h1, const History& h2, int agent) {
  if (observe(g, h1, agent) != observe(g, h2, agent)) return false;
  if (agent == kObserver) return true;  // the observer has no actions of his own
  if (h1.profiles.size() != h2.profiles.size()) return false;
  for (std::size_t i = 0; i < h1.profiles.size(); ++i)
    if (h1.profiles[i].actions[agent - 1] != h2.profiles[i].actions[agent - 1]) return false;
  return true;
}

Agent0Partition agent0_partition(const GameStructure& g) {
  const int n = g.num_states();
  // Union-find over states: merge whenever some player cannot tell two states apart.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Player& p : g.players) {
    std::map<int, int> first_with_obs;
    for (int v = 0; v < n; ++v) {
      auto [it, fresh] = first_with_obs.try_emplace(p.obs_of_state[v], v);
      if (!fresh) parent[find(v)] = find(it->second);
    }
  }
  Agent0Partition part;
  part.class_of.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    if (part.class_of[r] < 0) {
      part.class_of[r] = static_cast<int>(part.members.size());
      part.members.emplace_back();
    }
    part.class_of[v] = part.class_of[r];
    part.members[part.class_of[v]].push_back(v);
  }
  return part;
}

MoveIndex::MoveIndex(const GameStructure& g) {
  const int n = g.num_players();
  strides_.assign(n, 1);
  for (int i = n - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * static_cast<int>(g.players[i + 1].actions.size());
  num_profiles_ = n == 0 ? 1 : strides_[0] * static_cast<int>(g.players[0].actions.size());

  succ_.assign(g.num_states(), std::vector<std::vector<int>>(num_profiles_));
  succ_any_.assign(g.num_states(), {});
  for (const Move& m : g.moves) {
    if (m.src < 0 || m.src >= g.num_states() || m.dst < 0 || m.dst >= g.num_states())
      throw std::invalid_argument("move endpoint out of range");
    detail::sorted_insert(succ_[m.src][encode(m.profile)], m.dst);
    detail::sorted_insert(succ_any_[m.src], m.dst);
  }
}

int MoveIndex::encode(const ActionProfile& a) const {
  if (a.actions.size() != strides_.size()) throw std::invalid_argument("profile arity mismatch");
  int code = 0;
  for (std::size_t i = 0; i < a.actions.size(); ++i) code += a.actions[i] * strides_[i];
  if (code < 0 || code >= num_profiles_) throw std::invalid_argument("profile out of range");
  return code;
}

ActionProfile MoveIndex::decode(int code) const {
  ActionProfile a;
  a.actions.resize(strides_.size());
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    a.actions[i] = code / strides_[i];
    code %= strides_[i];
  }
  return a;
}

bool MoveIndex::has_move(int src, int profile_code, int dst) const {
  return detail::sorted_contains(succ_[src][profile_code], dst);
}

}  // namespace recert
