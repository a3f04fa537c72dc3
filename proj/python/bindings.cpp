#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "recert/cli.hpp"
#include "recert/io.hpp"

namespace py = pybind11;
using namespace recert;

namespace {

py::list history_to_py(const GameStructure& g, const History& h) {
  py::list states, profiles;
  for (int v : h.states) states.append(g.states[v]);
  for (const ActionProfile& a : h.profiles) {
    py::list p;
    for (int i = 0; i < g.num_players(); ++i) p.append(g.players[i].actions[a.actions[i]]);
    profiles.append(p);
  }
  py::list out;
  out.append(states);
  out.append(profiles);
  return out;
}

py::dict lasso_to_py(const GameStructure& g, const LassoPlay& l) {
  py::dict out;
  out["prefix"] = history_to_py(g, l.prefix);
  py::list cycle;
  for (const auto& [a, v] : l.cycle) {
    py::list p;
    for (int i = 0; i < g.num_players(); ++i) p.append(g.players[i].actions[a.actions[i]]);
    py::dict step;
    step["profile"] = p;
    step["state"] = g.states[v];
    cycle.append(step);
  }
  out["cycle"] = cycle;
  return out;
}

History history_from_py(const GameStructure& g, const std::vector<std::string>& states,
                        const std::vector<std::vector<std::string>>& profiles) {
  History h;
  for (const std::string& s : states) {
    int v = g.state_id(s);
    if (v < 0) throw py::value_error("unknown state '" + s + "'");
    h.states.push_back(v);
  }
  for (const auto& names : profiles) {
    if (static_cast<int>(names.size()) != g.num_players())
      throw py::value_error("profiles need one action per player");
    ActionProfile a;
    for (int i = 0; i < g.num_players(); ++i) {
      const auto& acts = g.players[i].actions;
      auto it = std::find(acts.begin(), acts.end(), names[i]);
      if (it == acts.end()) throw py::value_error("unknown action '" + names[i] + "'");
      a.actions.push_back(static_cast<int>(it - acts.begin()));
    }
    h.profiles.push_back(std::move(a));
  }
  return h;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "observer-certainty analysis and coalition strategy synthesis";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<NodeLimitError>(m, "NodeLimitError");
  py::register_exception<NotRecurringError>(m, "NotRecurringError");

  py::class_<GameFile>(m, "Game")
      .def_static("from_json", [](const std::string& text) { return parse_game_file(text); },
                  py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_game_file(path); },
                  py::arg("path"))
      .def_property_readonly("name", [](const GameFile& f) { return f.name; })
      .def_property_readonly("states", [](const GameFile& f) { return f.game.states; })
      .def_property_readonly("initial",
                             [](const GameFile& f) { return f.game.states[f.game.initial]; })
      .def_property_readonly("players",
                             [](const GameFile& f) {
                               std::vector<std::string> names;
                               for (const Player& p : f.game.players) names.push_back(p.name);
                               return names;
                             })
      .def_property_readonly("has_objective",
                             [](const GameFile& f) { return f.objective.has_value(); })
      .def("to_json", [](const GameFile& f) { return serialise_game_file(f); })
      .def("validate",
           [](const GameFile& f) {
             py::list out;
             for (const Violation& v : validate_structure(f.game))
               out.append(py::make_tuple(v.kind, v.message));
             return out;
           })
      .def("attains_certainty",
           [](const GameFile& f, const std::vector<std::string>& states,
              const std::vector<std::vector<std::string>>& profiles) {
             History h = history_from_py(f.game, states, profiles);
             if (!is_valid_history(f.game, h)) throw py::value_error("not a valid history");
             return attains_certainty(f.game, h);
           },
           py::arg("states"), py::arg("profiles"))
      .def("certainty",
           [](const GameFile& f) {
             CertaintyVerdict v = decide_recurring_certainty(f.game);
             py::dict out;
             out["recurring"] = v.recurring;
             if (v.minimal_period) out["minimal_period"] = *v.minimal_period;
             out["automaton_bound"] = v.automaton_bound;
             if (v.witness) out["witness"] = lasso_to_py(f.game, *v.witness);
             return out;
           })
      .def("track",
           [](const GameFile& f, int node_limit) {
             TrackingArena arena = build_tracking_arena(f.game, node_limit);
             py::dict out;
             out["recurring"] = arena.recurring;
             out["nodes"] = arena.num_nodes();
             py::list models;
             for (const auto& node : arena.nodes) {
               py::list worlds;
               for (int v : node.model.world_state) worlds.append(f.game.states[v]);
               models.append(worlds);
             }
             out["models"] = models;
             return out;
           },
           py::arg("node_limit") = kDefaultNodeLimit)
      .def("solve",
           [](const GameFile& f, int node_limit) {
             if (!f.objective) throw py::value_error("game has no objective");
             SolveOutcome o = decide_coalition_winner(f.game, *f.objective, node_limit);
             py::dict out;
             out["coalition_wins"] = o.coalition_wins;
             out["arena_nodes"] = o.arena.num_nodes();
             out["parity_nodes"] = o.game.num_nodes();
             out["recurring"] = o.certainty.recurring;
             return out;
           },
           py::arg("node_limit") = kDefaultNodeLimit)
      .def("synthesise",
           [](const GameFile& f, int node_limit) {
             if (!f.objective) throw py::value_error("game has no objective");
             SolveOutcome o = decide_coalition_winner(f.game, *f.objective, node_limit);
             if (!o.coalition_wins) throw py::value_error("the coalition loses");
             return serialise_strategies(f.game, distribute_strategy(f.game, o));
           },
           py::arg("node_limit") = kDefaultNodeLimit)
      .def("verify",
           [](const GameFile& f, const std::string& strategy_json) {
             if (!f.objective) throw py::value_error("game has no objective");
             VerificationReport r =
                 verify_profile(f.game, parse_strategies(f.game, strategy_json), *f.objective);
             py::dict out;
             out["pass"] = r.pass;
             out["message"] = r.message;
             out["product_nodes"] = r.product_nodes;
             if (r.counterexample) out["counterexample"] = lasso_to_py(f.game, *r.counterexample);
             if (r.undefined_at) out["undefined_at"] = history_to_py(f.game, *r.undefined_at);
             return out;
           },
           py::arg("strategy_json"))
      .def("simulate",
           [](const GameFile& f, const std::string& strategy_json, int steps, std::uint64_t seed) {
             SimulationReport r =
                 simulate(f.game, parse_strategies(f.game, strategy_json), steps, seed);
             py::dict out;
             out["ok"] = r.ok;
             out["message"] = r.message;
             out["play"] = history_to_py(f.game, r.play);
             py::list beliefs;
             for (const auto& b : r.beliefs) {
               py::list bl;
               for (int v : b) bl.append(f.game.states[v]);
               beliefs.append(bl);
             }
             out["beliefs"] = beliefs;
             py::dict gaps;
             for (const auto& [gap, count] : r.gap_histogram)
               gaps[py::int_(gap)] = py::int_(count);
             out["gap_histogram"] = gaps;
             return out;
           },
           py::arg("strategy_json"), py::arg("steps") = 20, py::arg("seed") = 0);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "run the command-line tool; returns (exit_code, stdout, stderr)");
}
