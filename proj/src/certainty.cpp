#include "recert/certainty.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

namespace recert {

namespace {

/// Belief update: possible current states after one more observation.
std::vector<int> next_belief(const MoveIndex& index, const Agent0Partition& part,
                             const std::vector<int>& belief, int observed_class) {
  std::vector<int> out;
  for (int w : belief)
    for (int w2 : index.successors_any(w))
      if (part.class_of[w2] == observed_class) detail::sorted_insert(out, w2);
  return out;
}

using PairSet = std::set<std::pair<int, int>>;

/// One step of the determinised pair construction. The first component
/// replays the real move; the second follows any move whose target is
/// observationally compatible with the real successor.
PairSet advance_pairs(const GameStructure& g, const MoveIndex& index, const Agent0Partition& part,
                      PairObsMode mode, const PairSet& pairs, int profile_code,
                      int successor_state) {
  PairSet next;
  for (const auto& [x, y] : pairs) {
    if (!index.has_move(x, profile_code, successor_state)) continue;
    for (int q = 0; q < index.num_profiles(); ++q) {
      // Strict reading: the guessed history is indistinguishable for every
      // player, so it must use the very same action profile as well.
      if (mode == PairObsMode::AllPlayers && q != profile_code) continue;
      for (int y2 : index.successors(y, q)) {
        bool compatible;
        if (mode == PairObsMode::Agent0) {
          compatible = part.class_of[y2] == part.class_of[successor_state];
        } else {
          compatible = true;
          for (const Player& pl : g.players)
            if (pl.obs_of_state[y2] != pl.obs_of_state[successor_state]) {
              compatible = false;
              break;
            }
        }
        if (compatible) next.insert({successor_state, y2});
      }
    }
  }
  return next;
}

bool pairs_certain(const PairSet& pairs) {
  for (const auto& [x, y] : pairs)
    if (x != y) return false;
  return true;
}

}  // namespace

int CertaintyAutomaton::step(int state, int profile_code, int successor_state) const {
  auto it = transitions[state].find({profile_code, successor_state});
  return it == transitions[state].end() ? -1 : it->second;
}

CertaintyAutomaton build_certainty_automaton(const GameStructure& g) {
  MoveIndex index(g);
  Agent0Partition part = agent0_partition(g);

  CertaintyAutomaton ca;
  std::map<BeliefState, int> id_of;
  auto intern = [&](BeliefState b) {
    auto [it, fresh] = id_of.try_emplace(std::move(b), ca.num_states());
    if (fresh) {
      ca.states.push_back(it->first);
      ca.accepting.push_back(it->first.certain());
      ca.transitions.emplace_back();
    }
    return it->second;
  };

  intern(BeliefState{g.initial, {g.initial}});
  for (int s = 0; s < ca.num_states(); ++s) {
    const BeliefState here = ca.states[s];  // copy: ca.states may reallocate
    for (int p = 0; p < index.num_profiles(); ++p) {
      for (int v : index.successors(here.current, p)) {
        std::vector<int> belief = next_belief(index, part, here.belief, part.class_of[v]);
        int t = intern(BeliefState{v, std::move(belief)});
        ca.transitions[s].emplace(std::make_pair(p, v), t);
      }
    }
  }
  return ca;
}

BeliefRun belief_run(const GameStructure& g, const std::vector<int>& observer_classes) {
  MoveIndex index(g);
  Agent0Partition part = agent0_partition(g);

  BeliefRun run;
  std::vector<int> belief;
  for (std::size_t i = 0; i < observer_classes.size(); ++i) {
    if (i == 0) {
      if (part.class_of[g.initial] == observer_classes[0]) belief = {g.initial};
    } else {
      belief = next_belief(index, part, belief, observer_classes[i]);
    }
    if (belief.empty() && !run.empty_from) run.empty_from = i;
    run.beliefs.push_back(belief);
  }
  return run;
}

bool attains_certainty(const GameStructure& g, const History& h) {
  BeliefRun run = belief_run(g, observe(g, h, kObserver));
  return !run.beliefs.empty() && run.beliefs.back().size() == 1;
}

namespace {

/// Label of one transition, used for name-based tie-breaking among witnesses.
struct StepLabel {
  std::vector<std::string> actions;
  std::string state;

  auto operator<=>(const StepLabel&) const = default;
};

struct CaEdge {
  int target;
  int profile_code;
  int successor_state;
  StepLabel label;
};

std::vector<std::vector<CaEdge>> labelled_edges(const GameStructure& g,
                                                const CertaintyAutomaton& ca,
                                                const MoveIndex& index) {
  std::vector<std::vector<CaEdge>> edges(ca.num_states());
  for (int s = 0; s < ca.num_states(); ++s) {
    for (const auto& [key, t] : ca.transitions[s]) {
      ActionProfile a = index.decode(key.first);
      StepLabel label;
      for (int i = 0; i < g.num_players(); ++i)
        label.actions.push_back(g.players[i].actions[a.actions[i]]);
      label.state = g.states[key.second];
      edges[s].push_back(CaEdge{t, key.first, key.second, std::move(label)});
    }
  }
  return edges;
}

/// BFS distances to `target` restricted to `allowed` nodes (-1: unreachable).
std::vector<int> distances_to(const std::vector<std::vector<CaEdge>>& edges, int target,
                              const std::vector<bool>& allowed) {
  std::vector<std::vector<int>> rev(edges.size());
  for (int s = 0; s < static_cast<int>(edges.size()); ++s) {
    if (!allowed[s]) continue;
    for (const CaEdge& e : edges[s])
      if (allowed[e.target]) rev[e.target].push_back(s);
  }
  std::vector<int> dist(edges.size(), -1);
  std::deque<int> queue{target};
  dist[target] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int s : rev[u])
      if (dist[s] < 0) {
        dist[s] = dist[u] + 1;
        queue.push_back(s);
      }
  }
  return dist;
}

/// Lexicographically least path of exactly `length` steps from `from` to
/// `target` inside `allowed`. Greedy per step is exact: a label names its
/// target state and actions, so equal labels mean equal edges.
std::vector<const CaEdge*> lex_path(const std::vector<std::vector<CaEdge>>& edges, int from,
                                    int target, int length, const std::vector<bool>& allowed,
                                    const std::vector<int>& dist_to_target) {
  std::vector<const CaEdge*> path;
  int at = from;
  for (int remaining = length; remaining > 0; --remaining) {
    const CaEdge* best = nullptr;
    for (const CaEdge& e : edges[at]) {
      if (!allowed[e.target] || dist_to_target[e.target] != remaining - 1) continue;
      if (!best || e.label < best->label) best = &e;
    }
    path.push_back(best);
    at = best->target;
  }
  return path;
}

}  // namespace

CertaintyVerdict decide_recurring_certainty(const GameStructure& g) {
  MoveIndex index(g);
  CertaintyAutomaton ca = build_certainty_automaton(g);
  auto edges = labelled_edges(g, ca, index);

  CertaintyVerdict verdict;
  verdict.automaton_bound = ca.num_states() + 1;

  std::vector<bool> uncertain(ca.num_states());
  for (int s = 0; s < ca.num_states(); ++s) uncertain[s] = !ca.accepting[s];

  // Certainty recurs on every play iff the uncertain part of the belief view
  // has no cycle. Shortest cycle length through each uncertain node:
  constexpr int kInf = std::numeric_limits<int>::max();
  int best_cycle = kInf;
  std::vector<int> cycle_len(ca.num_states(), kInf);
  for (int s = 0; s < ca.num_states(); ++s) {
    if (!uncertain[s]) continue;
    std::vector<int> dist = distances_to(edges, s, uncertain);
    for (const CaEdge& e : edges[s])
      if (uncertain[e.target] && dist[e.target] >= 0)
        cycle_len[s] = std::min(cycle_len[s], dist[e.target] + 1);
    best_cycle = std::min(best_cycle, cycle_len[s]);
  }

  if (best_cycle < kInf) {
    // Not recurring. Witness lasso: shortest uncertain cycle, entered by the
    // shortest prefix, names breaking remaining ties.
    verdict.recurring = false;
    std::vector<bool> all(ca.num_states(), true);
    std::vector<int> dist_from_init(ca.num_states(), -1);
    {
      std::deque<int> queue{0};
      dist_from_init[0] = 0;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const CaEdge& e : edges[u])
          if (dist_from_init[e.target] < 0) {
            dist_from_init[e.target] = dist_from_init[u] + 1;
            queue.push_back(e.target);
          }
      }
    }
    int best_prefix = kInf;
    for (int s = 0; s < ca.num_states(); ++s)
      if (cycle_len[s] == best_cycle) best_prefix = std::min(best_prefix, dist_from_init[s]);

    std::optional<std::vector<StepLabel>> best_labels;
    for (int s = 0; s < ca.num_states(); ++s) {
      if (cycle_len[s] != best_cycle || dist_from_init[s] != best_prefix) continue;
      std::vector<int> dist_to_s = distances_to(edges, s, all);
      auto prefix = lex_path(edges, 0, s, best_prefix, all, dist_to_s);
      std::vector<int> dist_to_s_unc = distances_to(edges, s, uncertain);
      auto cycle = lex_path(edges, s, s, best_cycle, uncertain, dist_to_s_unc);

      std::vector<StepLabel> labels;
      for (const CaEdge* e : prefix) labels.push_back(e->label);
      for (const CaEdge* e : cycle) labels.push_back(e->label);
      if (best_labels && labels >= *best_labels) continue;
      best_labels = labels;

      LassoPlay w;
      w.prefix = History{{g.initial}, {}};
      for (const CaEdge* e : prefix)
        w.prefix = w.prefix.extended(index.decode(e->profile_code), e->successor_state);
      for (const CaEdge* e : cycle)
        w.cycle.emplace_back(index.decode(e->profile_code), e->successor_state);
      verdict.witness = std::move(w);
    }
    return verdict;
  }

  // Recurring: the uncertain subgraph is acyclic. The least window that always
  // contains a certainty point is the longest uncertain path plus one round.
  verdict.recurring = true;
  std::vector<int> longest(ca.num_states(), -1);
  std::function<int(int)> dfs = [&](int s) {
    if (longest[s] >= 0) return longest[s];
    longest[s] = 0;
    for (const CaEdge& e : edges[s])
      if (uncertain[e.target]) longest[s] = std::max(longest[s], dfs(e.target) + 1);
    return longest[s];
  };
  int period = 0;
  for (int s = 0; s < ca.num_states(); ++s)
    if (uncertain[s]) period = std::max(period, dfs(s) + 1);
  verdict.minimal_period = period;
  return verdict;
}

CertaintyPeriod certainty_period(const GameStructure& g) {
  CertaintyVerdict v = decide_recurring_certainty(g);
  if (!v.recurring)
    throw NotRecurringError("certainty does not recur on every play", *v.witness);
  return CertaintyPeriod{*v.minimal_period, v.automaton_bound};
}

PairSubsetTracker::PairSubsetTracker(const GameStructure& g, PairObsMode mode)
    : g_(&g), mode_(mode), index_(g), part_(agent0_partition(g)) {
  reset();
}

void PairSubsetTracker::reset() {
  pairs_ = {{g_->initial, g_->initial}};
}

bool PairSubsetTracker::step(int profile_code, int successor_state) {
  pairs_ = advance_pairs(*g_, index_, part_, mode_, pairs_, profile_code, successor_state);
  return !pairs_.empty();
}

bool PairSubsetTracker::certain() const {
  return pairs_certain(pairs_);
}

CrossCheckReport cross_check_certainty(const GameStructure& g, PairObsMode mode) {
  MoveIndex index(g);
  Agent0Partition part = agent0_partition(g);
  CertaintyAutomaton ca = build_certainty_automaton(g);

  struct Joint {
    int ca_state;
    PairSet pairs;
    auto operator<=>(const Joint&) const = default;
  };
  struct Parent {
    int index;
    int profile_code;
    int state;
  };

  CrossCheckReport report;
  std::map<Joint, int> id_of;
  std::vector<const Joint*> nodes;
  std::vector<Parent> parents;
  auto intern = [&](Joint j, Parent par) {
    auto [it, fresh] = id_of.try_emplace(std::move(j), static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.push_back(&it->first);
      parents.push_back(par);
    }
    return it->second;
  };

  intern(Joint{0, {{g.initial, g.initial}}}, Parent{-1, -1, -1});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Joint& here = *nodes[i];
    if (ca.accepting[here.ca_state] != pairs_certain(here.pairs)) {
      report.agree = false;
      History h = History::initial(g);
      std::vector<std::pair<int, int>> steps;
      for (int at = static_cast<int>(i); parents[at].index >= 0; at = parents[at].index)
        steps.emplace_back(parents[at].profile_code, parents[at].state);
      std::reverse(steps.begin(), steps.end());
      for (const auto& [p, v] : steps) h = h.extended(index.decode(p), v);
      report.divergence = std::move(h);
      report.joint_states = static_cast<long long>(nodes.size());
      return report;
    }
    for (const auto& [key, ca_next] : ca.transitions[here.ca_state]) {
      PairSet next = advance_pairs(g, index, part, mode, here.pairs, key.first, key.second);
      intern(Joint{ca_next, std::move(next)},
             Parent{static_cast<int>(i), key.first, key.second});
    }
  }
  report.joint_states = static_cast<long long>(nodes.size());
  return report;
}

}  // namespace recert
