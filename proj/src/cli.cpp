#include "recert/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "recert/io.hpp"

namespace recert {

namespace {

using nlohmann::ordered_json;

std::string profile_text(const GameStructure& g, const ActionProfile& a) {
  std::string out = "(";
  for (int i = 0; i < g.num_players(); ++i) {
    if (i) out += ",";
    out += g.players[i].actions[a.actions[i]];
  }
  return out + ")";
}

ordered_json profile_json(const GameStructure& g, const ActionProfile& a) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < g.num_players(); ++i) arr.push_back(g.players[i].actions[a.actions[i]]);
  return arr;
}

ordered_json history_json(const GameStructure& g, const History& h) {
  ordered_json out;
  ordered_json states = ordered_json::array();
  for (int v : h.states) states.push_back(g.states[v]);
  out["states"] = std::move(states);
  ordered_json profiles = ordered_json::array();
  for (const ActionProfile& a : h.profiles) profiles.push_back(profile_json(g, a));
  out["profiles"] = std::move(profiles);
  return out;
}

std::string history_text(const GameStructure& g, const History& h) {
  std::string out = g.states[h.states[0]];
  for (std::size_t i = 0; i < h.profiles.size(); ++i)
    out += " -" + profile_text(g, h.profiles[i]) + "-> " + g.states[h.states[i + 1]];
  return out;
}

ordered_json lasso_json(const GameStructure& g, const LassoPlay& l) {
  ordered_json out;
  out["prefix"] = history_json(g, l.prefix);
  ordered_json cycle = ordered_json::array();
  for (const auto& [a, v] : l.cycle) {
    ordered_json step;
    step["profile"] = profile_json(g, a);
    step["state"] = g.states[v];
    cycle.push_back(std::move(step));
  }
  out["cycle"] = std::move(cycle);
  return out;
}

std::string lasso_text(const GameStructure& g, const LassoPlay& l) {
  std::string out = history_text(g, l.prefix) + " | cycle:";
  for (const auto& [a, v] : l.cycle) out += " -" + profile_text(g, a) + "-> " + g.states[v];
  return out;
}

GameFile load_game(const std::string& path) {
  GameFile file = load_game_file(path);
  std::vector<Violation> violations = validate_structure(file.game);
  if (!violations.empty())
    throw UsageError(path + ": invalid game: " + violations.front().kind + ": " +
                     violations.front().message + (violations.size() > 1 ? " (and " +
                     std::to_string(violations.size() - 1) + " more)" : ""));
  return file;
}

const ObjectiveSpec& need_objective(const GameFile& file, const std::string& path) {
  if (!file.objective)
    throw UsageError(path + ": the game file declares no objective; this command needs one");
  return *file.objective;
}

struct CommonArgs {
  std::string game_path;
  bool json = false;
};

int cmd_validate(const CommonArgs& common, std::ostream& out) {
  GameFile file = load_game_file(common.game_path);
  std::vector<Violation> violations = validate_structure(file.game);
  ObservabilityReport obs;
  if (violations.empty()) {
    obs = check_observability(file.game);
    for (const auto& [player, v, v2] : obs.violations)
      violations.push_back(Violation{
          "observability", "player '" + file.game.players[player - 1].name +
                               "' cannot tell '" + file.game.states[v] + "' (colour '" +
                               file.game.colours[file.game.colour_of[v]] + "') from '" +
                               file.game.states[v2] + "' (colour '" +
                               file.game.colours[file.game.colour_of[v2]] + "')"});
  }
  bool valid = violations.empty();
  if (common.json) {
    ordered_json j;
    j["command"] = "validate";
    j["file"] = common.game_path;
    j["valid"] = valid;
    ordered_json arr = ordered_json::array();
    for (const Violation& v : violations) {
      ordered_json vj;
      vj["kind"] = v.kind;
      vj["message"] = v.message;
      arr.push_back(std::move(vj));
    }
    j["violations"] = std::move(arr);
    out << j.dump(2) << "\n";
  } else {
    if (valid) {
      out << common.game_path << ": valid ("
          << file.game.num_states() << " states, " << file.game.num_players() << " players, "
          << file.game.moves.size() << " moves)\n";
    } else {
      out << common.game_path << ": invalid (" << violations.size() << " violation"
          << (violations.size() == 1 ? "" : "s") << ")\n";
      for (const Violation& v : violations) out << "  " << v.kind << ": " << v.message << "\n";
    }
  }
  return valid ? 0 : 1;
}

int cmd_certainty(const CommonArgs& common, bool cross, const std::string& pair_obs,
                  std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  CertaintyVerdict verdict = decide_recurring_certainty(g);
  CertaintyAutomaton ca = build_certainty_automaton(g);

  std::optional<CrossCheckReport> cc;
  PairObsMode mode = PairObsMode::Agent0;
  if (cross) {
    if (pair_obs == "all-players")
      mode = PairObsMode::AllPlayers;
    else if (pair_obs != "agent0")
      throw UsageError("--pair-obs must be 'agent0' or 'all-players'");
    cc = cross_check_certainty(g, mode);
  }

  std::vector<bool> certain_flags;
  if (verdict.witness) {
    History lap = verdict.witness->unroll(verdict.witness->prefix.length() +
                                          static_cast<int>(verdict.witness->cycle.size()));
    BeliefRun run = belief_run(g, observe(g, lap, kObserver));
    for (const auto& b : run.beliefs) certain_flags.push_back(b.size() == 1);
  }

  if (common.json) {
    ordered_json j;
    j["command"] = "certainty";
    j["file"] = common.game_path;
    j["recurring"] = verdict.recurring;
    if (verdict.minimal_period) j["minimalPeriod"] = *verdict.minimal_period;
    j["automatonBound"] = verdict.automaton_bound;
    j["beliefStates"] = ca.num_states();
    if (verdict.witness) {
      ordered_json w = lasso_json(g, *verdict.witness);
      ordered_json flags = ordered_json::array();
      for (bool b : certain_flags) flags.push_back(b);
      w["certain"] = std::move(flags);
      j["witness"] = std::move(w);
    }
    if (cc) {
      ordered_json c;
      c["mode"] = mode == PairObsMode::Agent0 ? "agent0" : "all-players";
      c["agree"] = cc->agree;
      c["jointStates"] = cc->joint_states;
      if (cc->divergence) c["divergence"] = history_json(g, *cc->divergence);
      j["crossCheck"] = std::move(c);
    }
    out << j.dump(2) << "\n";
  } else {
    out << "recurring certainty: " << (verdict.recurring ? "yes" : "no") << "\n";
    if (verdict.minimal_period) out << "minimal period: " << *verdict.minimal_period << "\n";
    out << "automaton bound: " << verdict.automaton_bound << "\n";
    out << "belief states: " << ca.num_states() << "\n";
    if (verdict.witness) {
      out << "forever-uncertain witness: " << lasso_text(g, *verdict.witness) << "\n";
      std::string flags;
      for (bool b : certain_flags) flags += b ? '1' : '0';
      out << "certainty per position: " << flags << "\n";
    }
    if (cc) {
      out << "cross-check (" << (mode == PairObsMode::Agent0 ? "agent0" : "all-players")
          << "): " << (cc->agree ? "agree" : "disagree") << " over " << cc->joint_states
          << " joint states\n";
      if (cc->divergence) out << "  divergence: " << history_text(g, *cc->divergence) << "\n";
    }
  }
  return verdict.recurring ? 0 : 1;
}

ordered_json model_json(const GameStructure& g, const TrackingArena::Node& node) {
  ordered_json nj;
  ordered_json worlds = ordered_json::array();
  for (int v : node.model.world_state) worlds.push_back(g.states[v]);
  nj["worlds"] = std::move(worlds);
  nj["colour"] = g.colours[node.colour];
  nj["singleton"] = node.model.singleton();
  ordered_json partitions;
  for (int agent = 0; agent < node.model.num_agents(); ++agent) {
    std::vector<std::vector<int>> classes;
    for (int w = 0; w < node.model.num_worlds(); ++w) {
      int cls = node.model.agent_class[agent][w];
      if (cls >= static_cast<int>(classes.size())) classes.resize(cls + 1);
      classes[cls].push_back(w);
    }
    std::string who = agent == kObserver ? "observer" : g.players[agent - 1].name;
    partitions[who] = classes;
  }
  nj["partitions"] = std::move(partitions);
  return nj;
}

ordered_json assignment_json(const GameStructure& g, const EpistemicModel& m,
                             const AdmissibleAssignment& f) {
  ordered_json out;
  for (int player = 1; player <= g.num_players(); ++player) {
    std::vector<std::string> per_class;
    for (int w = 0; w < m.num_worlds(); ++w) {
      int cls = m.agent_class[player][w];
      if (cls >= static_cast<int>(per_class.size())) per_class.resize(cls + 1);
      per_class[cls] = g.players[player - 1].actions[f.profile_of[w].actions[player - 1]];
    }
    out[g.players[player - 1].name] = per_class;
  }
  return out;
}

int cmd_track(const CommonArgs& common, int node_limit, const std::string& components,
              std::ostream& out, std::ostream& err) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  ComponentMode mode;
  if (components == "all-agents")
    mode = ComponentMode::AllAgents;
  else if (components == "players-only")
    mode = ComponentMode::PlayersOnly;
  else
    throw UsageError("--components must be 'all-agents' or 'players-only'");

  TrackingArena arena = build_tracking_arena(g, node_limit, mode);
  if (!arena.recurring)
    err << "warning: certainty does not recur on every play; "
           "the knowledge graph still closed under the node limit\n";

  if (common.json) {
    ordered_json j;
    j["command"] = "track";
    j["file"] = common.game_path;
    j["recurring"] = arena.recurring;
    j["nodes"] = arena.num_nodes();
    j["initial"] = arena.initial;
    ordered_json list = ordered_json::array();
    for (int i = 0; i < arena.num_nodes(); ++i) {
      ordered_json nj = model_json(g, arena.nodes[i]);
      nj["id"] = i;
      ordered_json groups = ordered_json::array();
      for (const auto& group : arena.nodes[i].groups) {
        ordered_json gj;
        gj["assignment"] = assignment_json(g, arena.nodes[i].model, group.representative);
        gj["successors"] = group.successors;
        groups.push_back(std::move(gj));
      }
      nj["groups"] = std::move(groups);
      list.push_back(std::move(nj));
    }
    j["nodeList"] = std::move(list);
    out << j.dump(2) << "\n";
  } else {
    out << "knowledge graph: " << arena.num_nodes() << " nodes (recurring certainty: "
        << (arena.recurring ? "yes" : "no") << ")\n";
    for (int i = 0; i < arena.num_nodes(); ++i) {
      const TrackingArena::Node& node = arena.nodes[i];
      out << "#" << i << " [" << g.colours[node.colour] << "]";
      for (int w = 0; w < node.model.num_worlds(); ++w)
        out << " " << w << ":" << g.states[node.model.world_state[w]];
      if (node.model.singleton()) out << " (certain)";
      out << "\n";
      for (std::size_t k = 0; k < node.groups.size(); ++k) {
        out << "  group " << k << ":";
        ordered_json a = assignment_json(g, node.model, node.groups[k].representative);
        for (const auto& [player, acts] : a.items()) {
          out << " " << player << "=";
          for (std::size_t c = 0; c < acts.size(); ++c)
            out << (c ? "|" : "") << acts[c].get<std::string>();
        }
        out << " ->";
        for (int t : node.groups[k].successors) out << " #" << t;
        out << "\n";
      }
    }
  }
  return 0;
}

int cmd_solve(const CommonArgs& common, int node_limit, std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  const ObjectiveSpec& spec = need_objective(file, common.game_path);
  SolveOutcome outcome = decide_coalition_winner(g, spec, node_limit);

  if (common.json) {
    ordered_json j;
    j["command"] = "solve";
    j["file"] = common.game_path;
    j["coalitionWins"] = outcome.coalition_wins;
    j["recurring"] = outcome.certainty.recurring;
    if (outcome.certainty.minimal_period) j["minimalPeriod"] = *outcome.certainty.minimal_period;
    j["arenaNodes"] = outcome.arena.num_nodes();
    j["automatonStates"] = outcome.dpa.num_states;
    j["parityNodes"] = outcome.game.num_nodes();
    out << j.dump(2) << "\n";
  } else {
    out << "coalition " << (outcome.coalition_wins ? "wins" : "loses") << "\n";
    out << "knowledge nodes: " << outcome.arena.num_nodes() << ", objective states: "
        << outcome.dpa.num_states << ", parity nodes: " << outcome.game.num_nodes() << "\n";
  }
  return outcome.coalition_wins ? 0 : 1;
}

int cmd_synth(const CommonArgs& common, int node_limit, const std::string& out_path,
              std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  const ObjectiveSpec& spec = need_objective(file, common.game_path);
  SolveOutcome outcome = decide_coalition_winner(g, spec, node_limit);

  if (!outcome.coalition_wins) {
    if (common.json) {
      ordered_json j;
      j["command"] = "synth";
      j["file"] = common.game_path;
      j["coalitionWins"] = false;
      out << j.dump(2) << "\n";
    } else {
      out << "coalition loses: nothing to synthesise\n";
    }
    return 1;
  }

  std::vector<StrategyMachine> machines = distribute_strategy(g, outcome);
  std::string text = serialise_strategies(g, machines);
  if (out_path == "-")
    out << text;
  else
    write_file(out_path, text);

  if (common.json) {
    ordered_json j;
    j["command"] = "synth";
    j["file"] = common.game_path;
    j["coalitionWins"] = true;
    if (out_path != "-") j["written"] = out_path;
    ordered_json arr = ordered_json::array();
    for (const StrategyMachine& m : machines) {
      ordered_json mj;
      mj["player"] = m.player_name;
      mj["states"] = m.num_states();
      arr.push_back(std::move(mj));
    }
    j["machines"] = std::move(arr);
    out << j.dump(2) << "\n";
  } else if (out_path != "-") {
    out << "wrote " << out_path << " (";
    for (std::size_t i = 0; i < machines.size(); ++i)
      out << (i ? ", " : "") << machines[i].player_name << ": " << machines[i].num_states()
          << " states";
    out << ")\n";
  }
  return 0;
}

int cmd_verify(const CommonArgs& common, const std::string& strategy_path, std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  const ObjectiveSpec& spec = need_objective(file, common.game_path);
  std::vector<StrategyMachine> machines = load_strategies(g, strategy_path);
  VerificationReport report = verify_profile(g, machines, spec);

  if (common.json) {
    ordered_json j;
    j["command"] = "verify";
    j["file"] = common.game_path;
    j["strategies"] = strategy_path;
    j["pass"] = report.pass;
    j["message"] = report.message;
    j["productNodes"] = report.product_nodes;
    j["cyclesChecked"] = report.cycles_checked;
    if (report.counterexample) j["counterexample"] = lasso_json(g, *report.counterexample);
    if (report.undefined_at) j["undefinedAt"] = history_json(g, *report.undefined_at);
    out << j.dump(2) << "\n";
  } else {
    out << (report.pass ? "PASS" : "FAIL") << ": " << report.message << "\n";
    out << "product nodes: " << report.product_nodes << ", cycles checked: "
        << report.cycles_checked << "\n";
    if (report.counterexample)
      out << "counterexample: " << lasso_text(g, *report.counterexample) << "\n";
    if (report.undefined_at)
      out << "stuck after: " << history_text(g, *report.undefined_at) << "\n";
  }
  return report.pass ? 0 : 1;
}

int cmd_simulate(const CommonArgs& common, const std::string& strategy_path, int steps,
                 std::uint64_t seed, std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;
  std::vector<StrategyMachine> machines = load_strategies(g, strategy_path);
  SimulationReport report = simulate(g, machines, steps, seed);

  if (common.json) {
    ordered_json j;
    j["command"] = "simulate";
    j["file"] = common.game_path;
    j["strategies"] = strategy_path;
    j["steps"] = steps;
    j["seed"] = seed;
    j["ok"] = report.ok;
    j["message"] = report.message;
    j["play"] = history_json(g, report.play);
    ordered_json beliefs = ordered_json::array();
    for (const auto& b : report.beliefs) {
      ordered_json bj = ordered_json::array();
      for (int v : b) bj.push_back(g.states[v]);
      beliefs.push_back(std::move(bj));
    }
    j["beliefs"] = std::move(beliefs);
    ordered_json gaps;
    for (const auto& [gap, count] : report.gap_histogram) gaps[std::to_string(gap)] = count;
    j["gapHistogram"] = std::move(gaps);
    ordered_json visits;
    for (const auto& [colour, count] : report.colour_visits) visits[colour] = count;
    j["colourVisits"] = std::move(visits);
    if (report.undefined_at) j["undefinedAt"] = history_json(g, *report.undefined_at);
    out << j.dump(2) << "\n";
  } else {
    out << report.message << "\n";
    out << "play: " << history_text(g, report.play) << "\n";
    out << "certainty gaps:";
    for (const auto& [gap, count] : report.gap_histogram)
      out << " " << gap << "x" << count;
    out << "\n";
    out << "colour visits:";
    for (const auto& [colour, count] : report.colour_visits)
      out << " " << colour << ":" << count;
    out << "\n";
  }
  return report.ok ? 0 : 1;
}

int cmd_dot(const CommonArgs& common, const std::string& view, const std::string& strategy_path,
            int node_limit, const std::string& out_path, std::ostream& out) {
  GameFile file = load_game(common.game_path);
  const GameStructure& g = file.game;

  std::string dot;
  if (view == "beliefs") {
    dot = export_dot_beliefs(g, build_certainty_automaton(g));
  } else if (view == "arena") {
    dot = export_dot_arena(g, build_tracking_arena(g, node_limit));
  } else if (view == "strategy") {
    if (strategy_path.empty()) throw UsageError("--view strategy needs --strategies");
    dot = export_dot_strategy(g, load_strategies(g, strategy_path));
  } else if (view == "verification") {
    if (strategy_path.empty()) throw UsageError("--view verification needs --strategies");
    const ObjectiveSpec& spec = need_objective(file, common.game_path);
    ParityAutomaton dpa = compile_objective(spec, g.num_colours());
    dot = export_dot_verification(
        g, build_verification_product(g, load_strategies(g, strategy_path), dpa));
  } else {
    throw UsageError("--view must be one of beliefs, arena, strategy, verification");
  }

  if (out_path == "-")
    out << dot;
  else
    write_file(out_path, dot);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"observer-certainty analysis and coalition strategy synthesis "
               "for games with imperfect information"};
  app.fallthrough();
  app.require_subcommand(1);

  CommonArgs common;
  app.add_flag("--json", common.json, "emit machine-readable JSON");

  auto add_game = [&common](CLI::App* cmd) {
    cmd->add_option("game", common.game_path, "game file (JSON)")->required();
  };

  CLI::App* validate = app.add_subcommand("validate", "check a game file's invariants");
  add_game(validate);

  CLI::App* certainty =
      app.add_subcommand("certainty", "decide whether the observer is certain infinitely often");
  add_game(certainty);
  bool cross = false;
  std::string pair_obs = "agent0";
  certainty->add_flag("--cross-check", cross,
                      "compare the belief view against the determinised pair construction");
  certainty->add_option("--pair-obs", pair_obs,
                        "pair construction variant: agent0 (default) or all-players");

  CLI::App* track = app.add_subcommand("track", "build and print the knowledge graph");
  add_game(track);
  int node_limit = kDefaultNodeLimit;
  std::string components = "all-agents";
  track->add_option("--node-limit", node_limit, "abort past this many distinct models");
  track->add_option("--components", components,
                    "relations gluing successor worlds: all-agents (default) or players-only");

  CLI::App* solve = app.add_subcommand("solve", "decide whether the coalition wins");
  add_game(solve);
  solve->add_option("--node-limit", node_limit, "abort past this many distinct models");

  CLI::App* synth = app.add_subcommand("synth", "synthesise one controller per player");
  add_game(synth);
  std::string out_path = "-";
  synth->add_option("-o,--output", out_path, "strategy file to write ('-' for stdout)");
  synth->add_option("--node-limit", node_limit, "abort past this many distinct models");

  CLI::App* verify = app.add_subcommand("verify", "model-check a strategy profile");
  add_game(verify);
  std::string strategy_path;
  verify->add_option("-s,--strategies", strategy_path, "strategy file (JSON)")->required();

  CLI::App* simulate = app.add_subcommand("simulate", "run the profile with random nature");
  add_game(simulate);
  int steps = 20;
  std::uint64_t seed = 0;
  simulate->add_option("-s,--strategies", strategy_path, "strategy file (JSON)")->required();
  simulate->add_option("--steps", steps, "rounds to play");
  simulate->add_option("--seed", seed, "nature's random seed");

  CLI::App* dot = app.add_subcommand("dot", "export a Graphviz view");
  add_game(dot);
  std::string view;
  dot->add_option("--view", view, "beliefs | arena | strategy | verification")->required();
  dot->add_option("-s,--strategies", strategy_path, "strategy file (for strategy/verification)");
  dot->add_option("-o,--output", out_path, "output file ('-' for stdout)");
  dot->add_option("--node-limit", node_limit, "abort past this many distinct models");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(common, out);
    if (certainty->parsed()) return cmd_certainty(common, cross, pair_obs, out);
    if (track->parsed()) return cmd_track(common, node_limit, components, out, err);
    if (solve->parsed()) return cmd_solve(common, node_limit, out);
    if (synth->parsed()) return cmd_synth(common, node_limit, out_path, out);
    if (verify->parsed()) return cmd_verify(common, strategy_path, out);
    if (simulate->parsed()) return cmd_simulate(common, strategy_path, steps, seed, out);
    if (dot->parsed()) return cmd_dot(common, view, strategy_path, node_limit, out_path, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NodeLimitError& e) {
    err << "error: " << e.what() << " (" << e.nodes << " nodes, largest model " << e.largest_model
        << " worlds)\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace recert
