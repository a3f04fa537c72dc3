#include "recert/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace recert {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

namespace {

[[noreturn]] void fail(const std::string& message) { throw ParseError(0, 0, message); }

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string what = e.what();
    auto cut = what.find("] ");
    throw ParseError(line, column, cut == std::string::npos ? what : what.substr(cut + 2));
  }
}

const json& require(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) fail(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ctx + ": missing \"" + key + "\"");
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& ctx) {
  const json& v = require(j, key, ctx);
  if (!v.is_string()) fail(ctx + ": \"" + std::string(key) + "\" must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& ctx) {
  if (!v.is_array()) fail(ctx + ": expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) fail(ctx + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

struct NameTable {
  std::map<std::string, int> id;
  int lookup(const std::string& name, const std::string& what) const {
    auto it = id.find(name);
    if (it == id.end()) fail("unknown " + what + " '" + name + "'");
    return it->second;
  }
};

ObjectiveSpec parse_objective(const json& j, const GameStructure& g, const NameTable& colour_ids) {
  const std::string ctx = "objective";
  std::string type = require_string(j, "type", ctx);
  auto colour_set = [&](const char* key) {
    std::vector<int> out;
    for (const std::string& name : string_list(require(j, key, ctx), ctx + "." + key))
      out.push_back(colour_ids.lookup(name, "colour"));
    return out;
  };

  if (type == "reachability") return ObjectiveSpec::reachability(colour_set("colours"));
  if (type == "safety") return ObjectiveSpec::safety(colour_set("colours"));
  if (type == "buchi") return ObjectiveSpec::buchi(colour_set("colours"));
  if (type == "cobuchi") return ObjectiveSpec::cobuchi(colour_set("colours"));
  if (type == "parity") {
    const json& prio = require(j, "priorities", ctx);
    if (!prio.is_object()) fail("objective.priorities must map colours to priorities");
    std::map<int, int> mapping;
    for (const auto& [name, value] : prio.items()) {
      if (!value.is_number_integer() || value.get<int>() < 0)
        fail("objective.priorities['" + name + "'] must be a nonnegative integer");
      mapping[colour_ids.lookup(name, "colour")] = value.get<int>();
    }
    return ObjectiveSpec::parity(std::move(mapping));
  }
  if (type == "automaton") {
    ParityAutomaton dpa;
    const json& states = require(j, "states", ctx);
    if (!states.is_number_integer() || states.get<int>() <= 0)
      fail("objective.states must be a positive integer");
    dpa.num_states = states.get<int>();
    const json& initial = require(j, "initial", ctx);
    if (!initial.is_number_integer()) fail("objective.initial must be a state index");
    dpa.initial = initial.get<int>();
    const json& priority = require(j, "priority", ctx);
    if (!priority.is_array() || static_cast<int>(priority.size()) != dpa.num_states)
      fail("objective.priority must list one priority per state");
    for (const json& p : priority) {
      if (!p.is_number_integer() || p.get<int>() < 0)
        fail("objective.priority entries must be nonnegative integers");
      dpa.priority.push_back(p.get<int>());
    }
    const json& delta = require(j, "delta", ctx);
    if (!delta.is_array() || static_cast<int>(delta.size()) != dpa.num_states)
      fail("objective.delta must list one row per state");
    dpa.delta.assign(dpa.num_states, std::vector<int>(g.num_colours(), -1));
    for (int q = 0; q < dpa.num_states; ++q) {
      if (!delta[q].is_object()) fail("objective.delta rows must map colours to states");
      for (const auto& [name, target] : delta[q].items()) {
        if (!target.is_number_integer()) fail("objective.delta targets must be state indices");
        dpa.delta[q][colour_ids.lookup(name, "colour")] = target.get<int>();
      }
      for (int c = 0; c < g.num_colours(); ++c)
        if (dpa.delta[q][c] < 0)
          fail("objective.delta row " + std::to_string(q) + " misses colour '" + g.colours[c] +
               "'");
    }
    return ObjectiveSpec::from_automaton(std::move(dpa));
  }
  fail("unknown objective type '" + type + "'");
}

}  // namespace

GameFile parse_game_file(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) fail("top level must be an object");

  GameFile file;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail("\"name\" must be a string");
    file.name = j["name"].get<std::string>();
  }
  GameStructure& g = file.game;

  g.states = string_list(require(j, "states", "game"), "states");
  NameTable state_ids;
  for (int v = 0; v < g.num_states(); ++v) {
    if (!state_ids.id.try_emplace(g.states[v], v).second)
      fail("duplicate state '" + g.states[v] + "'");
  }
  g.initial = state_ids.lookup(require_string(j, "initial", "game"), "state");

  const json& colours = require(j, "colours", "game");
  if (!colours.is_object()) fail("\"colours\" must map states to colour symbols");
  NameTable colour_ids;
  g.colour_of.assign(g.num_states(), -1);
  for (int v = 0; v < g.num_states(); ++v) {
    auto it = colours.find(g.states[v]);
    if (it == colours.end()) fail("state '" + g.states[v] + "' has no colour");
    if (!it->is_string()) fail("colour of '" + g.states[v] + "' must be a string");
    std::string name = it->get<std::string>();
    auto [cit, fresh] = colour_ids.id.try_emplace(name, static_cast<int>(g.colours.size()));
    if (fresh) g.colours.push_back(name);
    g.colour_of[v] = cit->second;
  }
  for (const auto& [name, value] : colours.items())
    if (!state_ids.id.count(name)) fail("colour given for unknown state '" + name + "'");

  const json& players = require(j, "players", "game");
  if (!players.is_array() || players.empty()) fail("\"players\" must be a nonempty array");
  for (const json& pj : players) {
    Player p;
    const std::string ctx = "player " + std::to_string(g.num_players() + 1);
    p.name = require_string(pj, "name", ctx);
    p.actions = string_list(require(pj, "actions", ctx), ctx + ".actions");
    const json& obs = require(pj, "observations", ctx);
    if (!obs.is_object()) fail(ctx + ": \"observations\" must map states to symbols");
    NameTable obs_ids;
    p.obs_of_state.assign(g.num_states(), -1);
    for (int v = 0; v < g.num_states(); ++v) {
      auto it = obs.find(g.states[v]);
      if (it == obs.end()) fail(ctx + ": state '" + g.states[v] + "' has no observation");
      if (!it->is_string()) fail(ctx + ": observation of '" + g.states[v] + "' must be a string");
      std::string name = it->get<std::string>();
      auto [oit, fresh] = obs_ids.id.try_emplace(name, static_cast<int>(p.obs_names.size()));
      if (fresh) p.obs_names.push_back(name);
      p.obs_of_state[v] = oit->second;
    }
    for (const auto& [name, value] : obs.items())
      if (!state_ids.id.count(name))
        fail(ctx + ": observation given for unknown state '" + name + "'");
    g.players.push_back(std::move(p));
  }

  const json& moves = require(j, "moves", "game");
  if (!moves.is_array()) fail("\"moves\" must be an array");
  int move_no = 0;
  for (const json& mj : moves) {
    ++move_no;
    const std::string ctx = "move " + std::to_string(move_no);
    int src = state_ids.lookup(require_string(mj, "from", ctx), "state");
    std::vector<std::string> actions = string_list(require(mj, "actions", ctx), ctx + ".actions");
    if (static_cast<int>(actions.size()) != g.num_players())
      fail(ctx + ": expected one action per player");
    ActionProfile profile;
    for (int i = 0; i < g.num_players(); ++i) {
      const auto& list = g.players[i].actions;
      auto it = std::find(list.begin(), list.end(), actions[i]);
      if (it == list.end())
        fail(ctx + ": '" + actions[i] + "' is not an action of player '" + g.players[i].name +
             "'");
      profile.actions.push_back(static_cast<int>(it - list.begin()));
    }
    const json& to = require(mj, "to", ctx);
    std::vector<std::string> targets;
    if (to.is_string())
      targets.push_back(to.get<std::string>());
    else
      targets = string_list(to, ctx + ".to");
    if (targets.empty()) fail(ctx + ": \"to\" must name at least one state");
    for (const std::string& t : targets)
      g.moves.push_back(Move{src, profile, state_ids.lookup(t, "state")});
  }

  if (j.contains("objective")) file.objective = parse_objective(j["objective"], g, colour_ids);
  return file;
}

GameFile load_game_file(const std::string& path) {
  try {
    return parse_game_file(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line, e.column, path + ": " + e.message());
  }
}

namespace {

ordered_json objective_to_json(const GameStructure& g, const ObjectiveSpec& spec) {
  ordered_json out;
  auto names = [&g](const std::vector<int>& ids) {
    ordered_json arr = ordered_json::array();
    for (int c : ids) arr.push_back(g.colours[c]);
    return arr;
  };
  switch (spec.kind) {
    case ObjectiveSpec::Kind::Reachability:
      out["type"] = "reachability";
      out["colours"] = names(spec.colour_set);
      break;
    case ObjectiveSpec::Kind::Safety:
      out["type"] = "safety";
      out["colours"] = names(spec.colour_set);
      break;
    case ObjectiveSpec::Kind::Buchi:
      out["type"] = "buchi";
      out["colours"] = names(spec.colour_set);
      break;
    case ObjectiveSpec::Kind::CoBuchi:
      out["type"] = "cobuchi";
      out["colours"] = names(spec.colour_set);
      break;
    case ObjectiveSpec::Kind::Parity: {
      out["type"] = "parity";
      ordered_json prio;
      for (int c = 0; c < g.num_colours(); ++c) {
        auto it = spec.colour_priority.find(c);
        if (it != spec.colour_priority.end()) prio[g.colours[c]] = it->second;
      }
      out["priorities"] = std::move(prio);
      break;
    }
    case ObjectiveSpec::Kind::Automaton: {
      const ParityAutomaton& dpa = *spec.automaton;
      out["type"] = "automaton";
      out["states"] = dpa.num_states;
      out["initial"] = dpa.initial;
      out["priority"] = dpa.priority;
      ordered_json delta = ordered_json::array();
      for (int q = 0; q < dpa.num_states; ++q) {
        ordered_json row;
        for (int c = 0; c < g.num_colours(); ++c) row[g.colours[c]] = dpa.delta[q][c];
        delta.push_back(std::move(row));
      }
      out["delta"] = std::move(delta);
      break;
    }
  }
  return out;
}

}  // namespace

std::string serialise_game_file(const GameFile& file) {
  const GameStructure& g = file.game;
  ordered_json j;
  if (!file.name.empty()) j["name"] = file.name;
  j["states"] = g.states;
  j["initial"] = g.states[g.initial];
  ordered_json colours;
  for (int v = 0; v < g.num_states(); ++v) colours[g.states[v]] = g.colours[g.colour_of[v]];
  j["colours"] = std::move(colours);

  ordered_json players = ordered_json::array();
  for (const Player& p : g.players) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["actions"] = p.actions;
    ordered_json obs;
    for (int v = 0; v < g.num_states(); ++v) obs[g.states[v]] = p.obs_names[p.obs_of_state[v]];
    pj["observations"] = std::move(obs);
    players.push_back(std::move(pj));
  }
  j["players"] = std::move(players);

  // Canonical move order: by source state, then profile, targets merged.
  MoveIndex index(g);
  ordered_json moves = ordered_json::array();
  for (int v = 0; v < g.num_states(); ++v) {
    for (int code = 0; code < index.num_profiles(); ++code) {
      const std::vector<int>& succ = index.successors(v, code);
      if (succ.empty()) continue;
      ordered_json mj;
      mj["from"] = g.states[v];
      ActionProfile profile = index.decode(code);
      ordered_json actions = ordered_json::array();
      for (int i = 0; i < g.num_players(); ++i)
        actions.push_back(g.players[i].actions[profile.actions[i]]);
      mj["actions"] = std::move(actions);
      ordered_json to = ordered_json::array();
      for (int t : succ) to.push_back(g.states[t]);
      mj["to"] = std::move(to);
      moves.push_back(std::move(mj));
    }
  }
  j["moves"] = std::move(moves);

  if (file.objective) j["objective"] = objective_to_json(g, *file.objective);
  return j.dump(2) + "\n";
}

std::string serialise_strategies(const GameStructure& g,
                                 const std::vector<StrategyMachine>& machines) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const StrategyMachine& m : machines) {
    const Player& p = g.players[m.player - 1];
    ordered_json mj;
    mj["player"] = m.player_name;
    mj["initial"] = m.state_names[m.initial];
    ordered_json states = ordered_json::array();
    for (int s = 0; s < m.num_states(); ++s) {
      ordered_json sj;
      sj["name"] = m.state_names[s];
      sj["output"] = p.actions[m.output[s]];
      ordered_json next;
      for (const auto& [obs, target] : m.step[s]) next[p.obs_names[obs]] = m.state_names[target];
      sj["next"] = std::move(next);
      states.push_back(std::move(sj));
    }
    mj["states"] = std::move(states);
    arr.push_back(std::move(mj));
  }
  j["machines"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<StrategyMachine> parse_strategies(const GameStructure& g, const std::string& text) {
  json j = parse_json(text);
  const json& arr = require(j, "machines", "strategy file");
  if (!arr.is_array()) fail("\"machines\" must be an array");

  std::vector<StrategyMachine> machines(g.num_players());
  std::vector<bool> seen(g.num_players(), false);
  for (const json& mj : arr) {
    std::string player_name = require_string(mj, "player", "machine");
    int player = -1;
    for (int i = 0; i < g.num_players(); ++i)
      if (g.players[i].name == player_name) player = i + 1;
    if (player < 0) fail("machine for unknown player '" + player_name + "'");
    if (seen[player - 1]) fail("two machines for player '" + player_name + "'");
    seen[player - 1] = true;
    const Player& p = g.players[player - 1];
    const std::string ctx = "machine '" + player_name + "'";

    StrategyMachine m;
    m.player = player;
    m.player_name = player_name;
    const json& states = require(mj, "states", ctx);
    if (!states.is_array() || states.empty()) fail(ctx + ": \"states\" must be a nonempty array");
    NameTable state_ids;
    for (const json& sj : states) {
      std::string name = require_string(sj, "name", ctx + " state");
      if (!state_ids.id.try_emplace(name, m.num_states()).second)
        fail(ctx + ": duplicate state '" + name + "'");
      m.state_names.push_back(name);
      m.output.push_back(-1);
      m.step.emplace_back();
    }
    m.initial = state_ids.lookup(require_string(mj, "initial", ctx), "machine state");
    for (int s = 0; s < m.num_states(); ++s) {
      const json& sj = states[s];
      std::string out_name = require_string(sj, "output", ctx + " state");
      auto it = std::find(p.actions.begin(), p.actions.end(), out_name);
      if (it == p.actions.end())
        fail(ctx + ": '" + out_name + "' is not an action of player '" + player_name + "'");
      m.output[s] = static_cast<int>(it - p.actions.begin());
      const json& next = require(sj, "next", ctx + " state");
      if (!next.is_object()) fail(ctx + ": \"next\" must map observations to states");
      for (const auto& [obs_name, target] : next.items()) {
        auto oit = std::find(p.obs_names.begin(), p.obs_names.end(), obs_name);
        if (oit == p.obs_names.end())
          fail(ctx + ": '" + obs_name + "' is not an observation of player '" + player_name +
               "'");
        if (!target.is_string()) fail(ctx + ": \"next\" targets must be state names");
        m.step[s][static_cast<int>(oit - p.obs_names.begin())] =
            state_ids.lookup(target.get<std::string>(), "machine state");
      }
    }
    machines[player - 1] = std::move(m);
  }
  for (int i = 0; i < g.num_players(); ++i)
    if (!seen[i]) fail("no machine for player '" + g.players[i].name + "'");
  return machines;
}

std::vector<StrategyMachine> load_strategies(const GameStructure& g, const std::string& path) {
  return parse_strategies(g, read_file(path));
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string profile_label(const GameStructure& g, const ActionProfile& a) {
  std::string out = "(";
  for (int i = 0; i < g.num_players(); ++i) {
    if (i) out += ",";
    out += g.players[i].actions[a.actions[i]];
  }
  return out + ")";
}

std::string set_label(const GameStructure& g, const std::vector<int>& states) {
  std::string out = "{";
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out += ",";
    out += g.states[states[i]];
  }
  return out + "}";
}

/// "a|b": the assignment's action per knowledge class, in class order.
std::string assignment_label(const GameStructure& g, const EpistemicModel& m,
                             const AdmissibleAssignment& f, int player) {
  std::vector<std::string> per_class;
  for (int w = 0; w < m.num_worlds(); ++w) {
    int cls = m.agent_class[player][w];
    if (cls >= static_cast<int>(per_class.size())) per_class.resize(cls + 1);
    per_class[cls] = g.players[player - 1].actions[f.profile_of[w].actions[player - 1]];
  }
  std::string out;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    if (c) out += "|";
    out += per_class[c];
  }
  return out;
}

}  // namespace

std::string export_dot_beliefs(const GameStructure& g, const CertaintyAutomaton& ca) {
  MoveIndex index(g);
  std::ostringstream os;
  os << "digraph beliefs {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (int s = 0; s < ca.num_states(); ++s) {
    const BeliefState& b = ca.states[s];
    os << "  b" << s << " [label=\"" << dot_escape(g.states[b.current] + " " +
                                                    set_label(g, b.belief))
       << "\"" << (ca.accepting[s] ? ", peripheries=2" : "") << "];\n";
  }
  for (int s = 0; s < ca.num_states(); ++s)
    for (const auto& [key, t] : ca.transitions[s])
      os << "  b" << s << " -> b" << t << " [label=\""
         << dot_escape(profile_label(g, index.decode(key.first))) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string export_dot_arena(const GameStructure& g, const TrackingArena& arena) {
  std::ostringstream os;
  os << "digraph arena {\n  rankdir=TB;\n  node [shape=box];\n";
  for (int i = 0; i < arena.num_nodes(); ++i) {
    const TrackingArena::Node& n = arena.nodes[i];
    std::string label = "#" + std::to_string(i) + " [" + g.colours[n.colour] + "]\\n";
    for (int w = 0; w < n.model.num_worlds(); ++w) {
      if (w) label += " ";
      label += std::to_string(w) + ":" + g.states[n.model.world_state[w]];
    }
    os << "  n" << i << " [label=\"" << label << "\""
       << (n.model.singleton() ? ", style=bold" : "") << "];\n";
  }
  for (int i = 0; i < arena.num_nodes(); ++i) {
    for (std::size_t k = 0; k < arena.nodes[i].groups.size(); ++k) {
      const TrackingArena::EdgeGroup& group = arena.nodes[i].groups[k];
      std::string label;
      for (int player = 1; player <= g.num_players(); ++player) {
        if (player > 1) label += " ";
        label += g.players[player - 1].name + ":" +
                 assignment_label(g, arena.nodes[i].model, group.representative, player);
      }
      os << "  n" << i << "g" << k << " [shape=point];\n";
      os << "  n" << i << " -> n" << i << "g" << k << " [label=\"" << dot_escape(label)
         << "\"];\n";
      for (int t : group.successors) os << "  n" << i << "g" << k << " -> n" << t << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string export_dot_strategy(const GameStructure& g,
                                const std::vector<StrategyMachine>& machines) {
  std::ostringstream os;
  os << "digraph strategies {\n  rankdir=LR;\n  node [shape=ellipse];\n";
  for (std::size_t k = 0; k < machines.size(); ++k) {
    const StrategyMachine& m = machines[k];
    const Player& p = g.players[m.player - 1];
    os << "  subgraph cluster_" << k << " {\n    label=\"" << dot_escape(m.player_name)
       << "\";\n";
    for (int s = 0; s < m.num_states(); ++s)
      os << "    m" << k << "s" << s << " [label=\""
         << dot_escape(m.state_names[s] + "/" + p.actions[m.output[s]]) << "\""
         << (s == m.initial ? ", style=bold" : "") << "];\n";
    for (int s = 0; s < m.num_states(); ++s)
      for (const auto& [obs, target] : m.step[s])
        os << "    m" << k << "s" << s << " -> m" << k << "s" << target << " [label=\""
           << dot_escape(p.obs_names[obs]) << "\"];\n";
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

std::string export_dot_verification(const GameStructure& g, const VerificationProduct& product) {
  std::ostringstream os;
  os << "digraph verification {\n  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t i = 0; i < product.nodes.size(); ++i) {
    const VerificationProduct::Node& n = product.nodes[i];
    std::string label = g.states[n.game_state] + "\\n";
    for (std::size_t p = 0; p < n.machine_states.size(); ++p) {
      if (p) label += ",";
      label += "q" + std::to_string(n.machine_states[p]);
    }
    label += " p" + std::to_string(n.priority);
    os << "  v" << i << " [label=\"" << label << "\"];\n";
  }
  for (std::size_t i = 0; i < product.nodes.size(); ++i)
    for (int t : product.nodes[i].succ)
      os << "  v" << i << " -> v" << t << " [label=\""
         << dot_escape(profile_label(g, product.nodes[i].profile)) << "\"];\n";
  if (product.undefined_at)
    os << "  stuck [label=\"undefined observation\", color=red];\n";
  os << "}\n";
  return os.str();
}

}  // namespace recert
