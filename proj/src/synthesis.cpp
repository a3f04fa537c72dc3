#include "recert/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>

namespace recert {

SolveOutcome decide_coalition_winner(const GameStructure& g, const ObjectiveSpec& spec,
                                     int node_limit) {
  SolveOutcome out;
  out.certainty = decide_recurring_certainty(g);
  out.arena = build_tracking_arena(g, node_limit);
  out.dpa = compile_objective(spec, g.num_colours());
  out.game = build_parity_game(g, out.arena, out.dpa);
  out.solution = solve_parity(out.game);
  out.coalition_wins = out.solution.initial_won(out.game);
  return out;
}

int StrategyMachine::advance(int state, int observation) const {
  auto it = step[state].find(observation);
  return it == step[state].end() ? -1 : it->second;
}

std::vector<StrategyMachine> distribute_strategy(const GameStructure& g,
                                                 const SolveOutcome& outcome) {
  if (!outcome.coalition_wins)
    throw std::invalid_argument("no winning strategy to distribute: the coalition loses");

  const TrackingArena& arena = outcome.arena;
  const ParityGame& pg = outcome.game;
  const ParitySolution& sol = outcome.solution;

  // (arena node, automaton state) -> coalition parity-game node
  std::map<std::pair<int, int>, int> coalition_node;
  for (int u = 0; u < pg.num_nodes(); ++u)
    if (pg.nodes[u].coalition)
      coalition_node[{pg.nodes[u].arena_node, pg.nodes[u].dpa_state}] = u;

  auto chosen_group = [&](int u) {
    int nature = sol.strategy[u];
    if (nature < 0) throw std::logic_error("winning node without a strategy edge");
    return pg.nodes[nature].group;
  };

  std::vector<StrategyMachine> machines;
  for (int player = 1; player <= g.num_players(); ++player) {
    StrategyMachine m;
    m.player = player;
    m.player_name = g.players[player - 1].name;

    // Machine state = (reachable coalition node, own-knowledge class there).
    std::map<std::pair<int, int>, int> id_of;
    std::vector<std::pair<int, int>> states;
    auto intern = [&](int u, int cls) {
      auto [it, fresh] = id_of.try_emplace(std::make_pair(u, cls),
                                           static_cast<int>(states.size()));
      if (fresh) {
        states.emplace_back(u, cls);
        m.state_names.push_back("q" + std::to_string(states.size() - 1));
        m.output.push_back(-1);
        m.step.emplace_back();
      }
      return it->second;
    };

    m.initial = intern(pg.initial, 0);
    for (int mid = 0; mid < static_cast<int>(states.size()); ++mid) {
      auto [u, cls] = states[mid];
      if (!sol.coalition_wins[u])
        throw std::logic_error("strategy reaches a node the coalition loses");
      const TrackingArena::Node& an = arena.nodes[pg.nodes[u].arena_node];
      int group = chosen_group(u);
      const AdmissibleAssignment& f = an.groups[group].representative;

      // The assignment is constant on the class; take any world's action.
      int action = -1;
      for (int w = 0; w < an.model.num_worlds(); ++w) {
        if (an.model.agent_class[player][w] != cls) continue;
        int a = f.profile_of[w].actions[player - 1];
        if (action < 0) action = a;
        if (a != action) throw std::logic_error("assignment not constant on a knowledge class");
      }
      if (action < 0) throw std::logic_error("machine state refers to an empty class");
      m.output[mid] = action;

      for (const UpdateComponent& comp : update_model(g, an.model, f, arena.mode)) {
        Canonicalised canon = canonicalise(comp.model);
        int an2 = arena.find(canon.key);
        if (an2 < 0) throw std::logic_error("updated model missing from the arena");
        int q2 = outcome.dpa.delta[pg.nodes[u].dpa_state][arena.nodes[an2].colour];
        auto it = coalition_node.find({an2, q2});
        if (it == coalition_node.end())
          throw std::logic_error("successor product node missing");
        for (std::size_t k = 0; k < comp.children.size(); ++k) {
          auto [parent, state] = comp.children[k];
          if (an.model.agent_class[player][parent] != cls) continue;
          int obs = g.players[player - 1].obs_of_state[state];
          int w2 = canon.world_perm[comp.world_of_child[k]];
          int cls2 = arena.nodes[an2].model.agent_class[player][w2];
          int target = intern(it->second, cls2);
          auto [st, fresh] = m.step[mid].try_emplace(obs, target);
          if (!fresh && st->second != target)
            throw std::logic_error("observation does not determine the next machine state");
        }
      }
    }
    machines.push_back(std::move(m));
  }
  return machines;
}

VerificationProduct build_verification_product(const GameStructure& g,
                                               const std::vector<StrategyMachine>& machines,
                                               const ParityAutomaton& dpa) {
  if (static_cast<int>(machines.size()) != g.num_players())
    throw std::invalid_argument("expected one strategy machine per player");
  MoveIndex index(g);

  VerificationProduct prod;
  struct Key {
    int v;
    std::vector<int> ms;
    int q;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, int> id_of;
  std::vector<std::pair<int, std::pair<int, int>>> parent;  // (parent node, (profile, state))
  auto intern = [&](Key key, int from, int profile, int state) {
    auto [it, fresh] = id_of.try_emplace(key, static_cast<int>(prod.nodes.size()));
    if (fresh) {
      VerificationProduct::Node node;
      node.game_state = key.v;
      node.machine_states = key.ms;
      node.dpa_state = key.q;
      node.priority = dpa.priority[key.q];
      prod.nodes.push_back(std::move(node));
      parent.emplace_back(from, std::make_pair(profile, state));
    }
    return it->second;
  };
  auto history_of = [&](int id, const MoveIndex& idx) {
    std::vector<std::pair<int, int>> steps;
    for (int at = id; parent[at].first >= 0; at = parent[at].first)
      steps.push_back(parent[at].second);
    std::reverse(steps.begin(), steps.end());
    History h = History::initial(g);
    for (auto [p, v] : steps) h = h.extended(idx.decode(p), v);
    return h;
  };

  std::vector<int> inits;
  for (const StrategyMachine& m : machines) inits.push_back(m.initial);
  prod.initial =
      intern(Key{g.initial, inits, dpa.delta[dpa.initial][g.colour_of[g.initial]]}, -1, -1, -1);

  for (int i = 0; i < static_cast<int>(prod.nodes.size()); ++i) {
    ActionProfile profile;
    for (int p = 0; p < g.num_players(); ++p) {
      int a = machines[p].output[prod.nodes[i].machine_states[p]];
      if (a < 0 || a >= static_cast<int>(g.players[p].actions.size()))
        throw std::invalid_argument("machine output is not an action of its player");
      profile.actions.push_back(a);
    }
    prod.nodes[i].profile = profile;
    int code = index.encode(profile);

    int v = prod.nodes[i].game_state;
    std::vector<int> succ;
    for (int v2 : index.successors(v, code)) {
      std::vector<int> ms2(g.num_players());
      bool defined = true;
      for (int p = 0; p < g.num_players(); ++p) {
        int obs = g.players[p].obs_of_state[v2];
        ms2[p] = machines[p].advance(prod.nodes[i].machine_states[p], obs);
        if (ms2[p] < 0) defined = false;
      }
      if (!defined) {
        prod.undefined_at = history_of(i, index).extended(profile, v2);
        prod.nodes[i].succ = std::move(succ);
        return prod;  // the profile is already broken; report the shortest way
      }
      int q2 = dpa.delta[prod.nodes[i].dpa_state][g.colour_of[v2]];
      succ.push_back(intern(Key{v2, std::move(ms2), q2}, i, code, v2));
    }
    prod.nodes[i].succ = std::move(succ);
  }
  return prod;
}

namespace {

/// Strongly connected components of the product restricted to `in`.
std::vector<std::vector<int>> sccs(const VerificationProduct& prod, const std::vector<char>& in) {
  const int n = static_cast<int>(prod.nodes.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int next = 0;
  std::function<void(int)> connect = [&](int u) {
    index[u] = low[u] = next++;
    stack.push_back(u);
    on_stack[u] = 1;
    for (int v : prod.nodes[u].succ) {
      if (!in[v]) continue;
      if (index[v] < 0) {
        connect(v);
        low[u] = std::min(low[u], low[v]);
      } else if (on_stack[v]) {
        low[u] = std::min(low[u], index[v]);
      }
    }
    if (low[u] == index[u]) {
      std::vector<int> members;
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        members.push_back(w);
        if (w == u) break;
      }
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
  };
  for (int u = 0; u < n; ++u)
    if (in[u] && index[u] < 0) connect(u);
  return out;
}

/// Shortest path u -> target inside `in` (BFS, ascending tie-break); the
/// returned list excludes `from` and ends at `target`. Empty when from==target
/// and no step is needed.
std::vector<int> bfs_path(const VerificationProduct& prod, int from, int target,
                          const std::vector<char>& in, bool at_least_one_step) {
  if (!at_least_one_step && from == target) return {};  // already there
  std::vector<int> prev(prod.nodes.size(), -2);
  std::deque<int> queue;
  auto push = [&](int v, int p) {
    if (prev[v] == -2) {
      prev[v] = p;
      queue.push_back(v);
    }
  };
  if (at_least_one_step) {
    for (int v : prod.nodes[from].succ)
      if (in[v]) push(v, -1);
  } else {
    push(from, -1);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == target) break;
    for (int v : prod.nodes[u].succ)
      if (in[v]) push(v, u);
  }
  std::vector<int> path;
  if (prev[target] == -2) return path;
  for (int at = target; at != -1; at = prev[at]) {
    path.push_back(at);
    if (prev[at] == -1) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

VerificationReport verify_profile(const GameStructure& g,
                                  const std::vector<StrategyMachine>& machines,
                                  const ObjectiveSpec& spec) {
  ParityAutomaton dpa = compile_objective(spec, g.num_colours());
  VerificationProduct prod = build_verification_product(g, machines, dpa);

  VerificationReport report;
  report.product_nodes = static_cast<long long>(prod.nodes.size());
  if (prod.undefined_at) {
    report.pass = false;
    report.undefined_at = prod.undefined_at;
    report.message = "a reachable observation has no machine transition";
    return report;
  }

  int max_priority = 0;
  for (const auto& node : prod.nodes) max_priority = std::max(max_priority, node.priority);

  for (int p = 1; p <= max_priority; p += 2) {
    std::vector<char> in(prod.nodes.size(), 0);
    for (std::size_t u = 0; u < prod.nodes.size(); ++u) in[u] = prod.nodes[u].priority >= p;
    for (const std::vector<int>& comp : sccs(prod, in)) {
      ++report.cycles_checked;
      bool cyclic = comp.size() > 1;
      if (!cyclic)
        for (int v : prod.nodes[comp[0]].succ)
          if (v == comp[0]) cyclic = true;
      if (!cyclic) continue;
      int p_node = -1;
      for (int u : comp)
        if (prod.nodes[u].priority == p) {
          p_node = u;
          break;
        }
      if (p_node < 0) continue;

      // Nature can steer into this component and loop with odd minimum p.
      std::vector<char> all(prod.nodes.size(), 1);
      std::vector<int> to = bfs_path(prod, prod.initial, p_node, all, false);
      std::vector<int> around = bfs_path(prod, p_node, p_node, in, true);

      LassoPlay lasso;
      lasso.prefix = History::initial(g);
      int at = prod.initial;
      for (int u : to) {
        lasso.prefix = lasso.prefix.extended(prod.nodes[at].profile, prod.nodes[u].game_state);
        at = u;
      }
      for (int u : around) {
        lasso.cycle.emplace_back(prod.nodes[at].profile, prod.nodes[u].game_state);
        at = u;
      }
      report.pass = false;
      report.counterexample = std::move(lasso);
      report.message = "nature can force the play into a losing loop (least priority " +
                       std::to_string(p) + ")";
      return report;
    }
  }
  report.pass = true;
  report.message = "the profile enforces the objective against every nature resolution";
  return report;
}

SimulationReport simulate(const GameStructure& g, const std::vector<StrategyMachine>& machines,
                          int steps, std::uint64_t seed) {
  if (static_cast<int>(machines.size()) != g.num_players())
    throw std::invalid_argument("expected one strategy machine per player");
  MoveIndex index(g);
  std::mt19937_64 rng(seed);

  SimulationReport report;
  report.play = History::initial(g);
  int v = g.initial;
  std::vector<int> ms;
  for (const StrategyMachine& m : machines) ms.push_back(m.initial);

  for (int round = 0; round < steps; ++round) {
    ActionProfile profile;
    for (int p = 0; p < g.num_players(); ++p)
      profile.actions.push_back(machines[p].output[ms[p]]);
    const std::vector<int>& succ = index.successors(v, index.encode(profile));
    int v2 = succ[static_cast<std::size_t>(rng() % succ.size())];

    bool defined = true;
    std::vector<int> ms2(g.num_players());
    for (int p = 0; p < g.num_players(); ++p) {
      ms2[p] = machines[p].advance(ms[p], g.players[p].obs_of_state[v2]);
      if (ms2[p] < 0) defined = false;
    }
    if (!defined) {
      report.ok = false;
      report.undefined_at = report.play.extended(profile, v2);
      report.message = "simulation stopped: an observation had no machine transition";
      break;
    }
    report.play = report.play.extended(profile, v2);
    v = v2;
    ms = std::move(ms2);
  }

  BeliefRun run = belief_run(g, observe(g, report.play, kObserver));
  report.beliefs = run.beliefs;
  int last_certain = -1;
  for (std::size_t i = 0; i < run.beliefs.size(); ++i) {
    if (run.beliefs[i].size() == 1) {
      if (last_certain >= 0) ++report.gap_histogram[static_cast<int>(i) - last_certain];
      last_certain = static_cast<int>(i);
    }
  }
  for (int state : report.play.states) ++report.colour_visits[g.colours[g.colour_of[state]]];
  if (report.ok && report.message.empty())
    report.message = "simulated " + std::to_string(report.play.length()) + " rounds";
  return report;
}

}  // namespace recert
