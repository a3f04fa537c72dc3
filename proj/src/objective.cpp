#include "recert/objective.hpp"

#include <algorithm>
#include <limits>

namespace recert {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_colours_in_range(const std::vector<int>& colour_set, int num_colours) {
  for (int c : colour_set)
    if (c < 0 || c >= num_colours)
      throw std::invalid_argument("objective refers to unknown colour id " + std::to_string(c));
}

}  // namespace

ObjectiveSpec ObjectiveSpec::reachability(std::vector<int> colours) {
  ObjectiveSpec s;
  s.kind = Kind::Reachability;
  s.colour_set = sorted_unique(std::move(colours));
  return s;
}

ObjectiveSpec ObjectiveSpec::safety(std::vector<int> avoid) {
  ObjectiveSpec s;
  s.kind = Kind::Safety;
  s.colour_set = sorted_unique(std::move(avoid));
  return s;
}

ObjectiveSpec ObjectiveSpec::buchi(std::vector<int> colours) {
  ObjectiveSpec s;
  s.kind = Kind::Buchi;
  s.colour_set = sorted_unique(std::move(colours));
  return s;
}

ObjectiveSpec ObjectiveSpec::cobuchi(std::vector<int> colours) {
  ObjectiveSpec s;
  s.kind = Kind::CoBuchi;
  s.colour_set = sorted_unique(std::move(colours));
  return s;
}

ObjectiveSpec ObjectiveSpec::parity(std::map<int, int> colour_priority) {
  ObjectiveSpec s;
  s.kind = Kind::Parity;
  s.colour_priority = std::move(colour_priority);
  return s;
}

ObjectiveSpec ObjectiveSpec::from_automaton(ParityAutomaton dpa) {
  ObjectiveSpec s;
  s.kind = Kind::Automaton;
  s.automaton = std::move(dpa);
  return s;
}

ObservabilityReport check_observability(const GameStructure& g) {
  ObservabilityReport report;
  for (int i = 0; i < g.num_players(); ++i) {
    const Player& p = g.players[i];
    for (int v = 0; v < g.num_states(); ++v)
      for (int v2 = v + 1; v2 < g.num_states(); ++v2)
        if (p.obs_of_state[v] == p.obs_of_state[v2] && g.colour_of[v] != g.colour_of[v2]) {
          report.observable = false;
          report.violations.emplace_back(i + 1, v, v2);
        }
  }
  return report;
}

ParityAutomaton compile_objective(const ObjectiveSpec& spec, int num_colours) {
  if (num_colours <= 0) throw std::invalid_argument("game declares no colours");

  ParityAutomaton dpa;
  auto in_set = [&spec](int c) {
    return std::binary_search(spec.colour_set.begin(), spec.colour_set.end(), c);
  };

  switch (spec.kind) {
    case ObjectiveSpec::Kind::Reachability: {
      require_colours_in_range(spec.colour_set, num_colours);
      // 0: still searching (odd), 1: target seen, absorbing (even).
      dpa.num_states = 2;
      dpa.initial = 0;
      dpa.priority = {1, 0};
      dpa.delta.assign(2, std::vector<int>(num_colours));
      for (int c = 0; c < num_colours; ++c) {
        dpa.delta[0][c] = in_set(c) ? 1 : 0;
        dpa.delta[1][c] = 1;
      }
      break;
    }
    case ObjectiveSpec::Kind::Safety: {
      require_colours_in_range(spec.colour_set, num_colours);
      // 0: safe so far (even), 1: forbidden colour seen, absorbing (odd).
      dpa.num_states = 2;
      dpa.initial = 0;
      dpa.priority = {0, 1};
      dpa.delta.assign(2, std::vector<int>(num_colours));
      for (int c = 0; c < num_colours; ++c) {
        dpa.delta[0][c] = in_set(c) ? 1 : 0;
        dpa.delta[1][c] = 1;
      }
      break;
    }
    case ObjectiveSpec::Kind::Buchi:
    case ObjectiveSpec::Kind::CoBuchi: {
      require_colours_in_range(spec.colour_set, num_colours);
      // 0: just saw a target colour, 1: anything else. The recurrence flavour
      // rewards hitting targets forever; the persistence flavour is its dual
      // and asks for finitely many hits.
      dpa.num_states = 2;
      dpa.initial = 1;
      dpa.priority = spec.kind == ObjectiveSpec::Kind::Buchi ? std::vector<int>{0, 1}
                                                             : std::vector<int>{1, 2};
      dpa.delta.assign(2, std::vector<int>(num_colours));
      for (int c = 0; c < num_colours; ++c)
        dpa.delta[0][c] = dpa.delta[1][c] = in_set(c) ? 0 : 1;
      break;
    }
    case ObjectiveSpec::Kind::Parity: {
      // One state per colour: the automaton just remembers the last colour.
      for (int c = 0; c < num_colours; ++c)
        if (!spec.colour_priority.count(c))
          throw std::invalid_argument("parity objective misses a priority for colour id " +
                                      std::to_string(c));
      for (const auto& [c, pri] : spec.colour_priority) {
        if (c < 0 || c >= num_colours)
          throw std::invalid_argument("parity objective refers to unknown colour id " +
                                      std::to_string(c));
        if (pri < 0) throw std::invalid_argument("parity priorities must be nonnegative");
      }
      dpa.num_states = num_colours;
      dpa.initial = 0;
      dpa.priority.resize(num_colours);
      dpa.delta.assign(num_colours, std::vector<int>(num_colours));
      for (int q = 0; q < num_colours; ++q) {
        dpa.priority[q] = spec.colour_priority.at(q);
        for (int c = 0; c < num_colours; ++c) dpa.delta[q][c] = c;
      }
      break;
    }
    case ObjectiveSpec::Kind::Automaton: {
      if (!spec.automaton) throw std::invalid_argument("automaton objective without automaton");
      const ParityAutomaton& a = *spec.automaton;
      if (a.num_states <= 0 || a.initial < 0 || a.initial >= a.num_states ||
          static_cast<int>(a.delta.size()) != a.num_states ||
          static_cast<int>(a.priority.size()) != a.num_states)
        throw std::invalid_argument("malformed objective automaton");
      for (int q = 0; q < a.num_states; ++q) {
        if (static_cast<int>(a.delta[q].size()) != num_colours)
          throw std::invalid_argument("objective automaton is not total over the game's colours");
        for (int t : a.delta[q])
          if (t < 0 || t >= a.num_states)
            throw std::invalid_argument("objective automaton transition out of range");
        if (a.priority[q] < 0)
          throw std::invalid_argument("objective automaton priorities must be nonnegative");
      }
      dpa = a;
      break;
    }
  }
  return dpa;
}

bool lasso_satisfies(const ObjectiveSpec& spec, const std::vector<int>& prefix,
                     const std::vector<int>& cycle) {
  if (cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  int num_colours = 1;
  for (int c : prefix) num_colours = std::max(num_colours, c + 1);
  for (int c : cycle) num_colours = std::max(num_colours, c + 1);
  for (int c : spec.colour_set) num_colours = std::max(num_colours, c + 1);
  for (const auto& [c, pri] : spec.colour_priority) num_colours = std::max(num_colours, c + 1);
  if (spec.kind == ObjectiveSpec::Kind::Automaton && spec.automaton &&
      !spec.automaton->delta.empty())
    num_colours = std::max(num_colours, static_cast<int>(spec.automaton->delta[0].size()));

  ObjectiveSpec total = spec;
  if (spec.kind == ObjectiveSpec::Kind::Parity)
    for (int c = 0; c < num_colours; ++c) total.colour_priority.try_emplace(c, 1);
  ParityAutomaton dpa = compile_objective(total, num_colours);

  int q = dpa.initial;
  for (int c : prefix) q = dpa.delta[q][c];
  std::vector<int> boundary{q};
  std::vector<int> lap_min;
  while (true) {
    int mp = std::numeric_limits<int>::max();
    for (int c : cycle) {
      q = dpa.delta[q][c];
      mp = std::min(mp, dpa.priority[q]);
    }
    lap_min.push_back(mp);
    auto it = std::find(boundary.begin(), boundary.end(), q);
    if (it != boundary.end()) {
      auto j = std::distance(boundary.begin(), it);
      int m = *std::min_element(lap_min.begin() + j, lap_min.end());
      return m % 2 == 0;
    }
    boundary.push_back(q);
  }
}

ParityGame build_parity_game(const GameStructure& g, const TrackingArena& arena,
                             const ParityAutomaton& dpa) {
  ObservabilityReport obs = check_observability(g);
  if (!obs.observable) {
    auto [player, v, v2] = obs.violations.front();
    throw std::invalid_argument("objective is not observable: player " + std::to_string(player) +
                                " cannot tell '" + g.states[v] + "' (colour '" +
                                g.colours[g.colour_of[v]] + "') from '" + g.states[v2] +
                                "' (colour '" + g.colours[g.colour_of[v2]] + "')");
  }
  for (int q = 0; q < dpa.num_states; ++q)
    if (static_cast<int>(dpa.delta[q].size()) != g.num_colours())
      throw std::invalid_argument("objective automaton is not total over the game's colours");

  ParityGame pg;
  // key: (arena node, automaton state, group or -1 for coalition nodes)
  std::map<std::tuple<int, int, int>, int> id_of;
  auto intern = [&](int an, int q, int group) {
    auto [it, fresh] = id_of.try_emplace(std::make_tuple(an, q, group), pg.num_nodes());
    if (fresh) {
      ParityGame::Node node;
      node.coalition = group < 0;
      node.priority = dpa.priority[q];
      node.arena_node = an;
      node.dpa_state = q;
      node.group = group;
      pg.nodes.push_back(std::move(node));
    }
    return it->second;
  };

  int q0 = dpa.delta[dpa.initial][arena.nodes[arena.initial].colour];
  pg.initial = intern(arena.initial, q0, -1);
  for (int i = 0; i < pg.num_nodes(); ++i) {
    const auto [an, q, group] = [&] {
      const ParityGame::Node& n = pg.nodes[i];
      return std::make_tuple(n.arena_node, n.dpa_state, n.group);
    }();
    std::vector<int> succ;
    if (group < 0) {
      for (int gi = 0; gi < static_cast<int>(arena.nodes[an].groups.size()); ++gi)
        succ.push_back(intern(an, q, gi));
    } else {
      for (int an2 : arena.nodes[an].groups[group].successors)
        succ.push_back(intern(an2, dpa.delta[q][arena.nodes[an2].colour], -1));
    }
    pg.nodes[i].succ = std::move(succ);
  }
  return pg;
}

}  // namespace recert
