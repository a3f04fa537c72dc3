#include "recert/tracking.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace recert {

int EpistemicModel::colour(const GameStructure& g) const {
  int c = g.colour_of[world_state.at(0)];
  for (int v : world_state)
    if (g.colour_of[v] != c)
      throw std::domain_error(
          "epistemic model mixes colours '" + g.colours[c] + "' and '" +
          g.colours[g.colour_of[v]] + "': the objective would not be observable");
  return c;
}

EpistemicModel initial_model(const GameStructure& g) {
  return singleton_model(g, g.initial);
}

EpistemicModel singleton_model(const GameStructure& g, int state) {
  EpistemicModel m;
  m.world_state = {state};
  m.agent_class.assign(g.num_players() + 1, {0});
  return m;
}

EpistemicModel normalise_classes(EpistemicModel m) {
  for (auto& cls : m.agent_class) {
    std::map<int, int> remap;
    for (int& c : cls) {
      auto [it, fresh] = remap.try_emplace(c, static_cast<int>(remap.size()));
      c = it->second;
    }
  }
  return m;
}

namespace {

int num_classes(const std::vector<int>& cls) {
  return cls.empty() ? 0 : *std::max_element(cls.begin(), cls.end()) + 1;
}

}  // namespace

std::vector<AdmissibleAssignment> admissible_assignments(const GameStructure& g,
                                                         const EpistemicModel& m) {
  const int n = g.num_players();
  const int worlds = m.num_worlds();

  // One digit per (player, knowledge class); the player must act uniformly on
  // a class because he cannot tell its worlds apart.
  struct Digit {
    int player;
    int num_actions;
  };
  std::vector<Digit> digits;
  for (int i = 0; i < n; ++i) {
    int k = num_classes(m.agent_class[i + 1]);
    for (int c = 0; c < k; ++c)
      digits.push_back({i, static_cast<int>(g.players[i].actions.size())});
  }
  std::vector<int> class_base(n, 0);
  {
    int at = 0;
    for (int i = 0; i < n; ++i) {
      class_base[i] = at;
      at += num_classes(m.agent_class[i + 1]);
    }
  }

  std::vector<AdmissibleAssignment> out;
  std::vector<int> value(digits.size(), 0);
  while (true) {
    AdmissibleAssignment a;
    a.profile_of.resize(worlds);
    for (int w = 0; w < worlds; ++w) {
      a.profile_of[w].actions.resize(n);
      for (int i = 0; i < n; ++i)
        a.profile_of[w].actions[i] = value[class_base[i] + m.agent_class[i + 1][w]];
    }
    out.push_back(std::move(a));

    int d = static_cast<int>(digits.size()) - 1;
    while (d >= 0 && value[d] + 1 == digits[d].num_actions) value[d--] = 0;
    if (d < 0) break;
    ++value[d];
  }
  return out;
}

long long count_admissible_assignments(const GameStructure& g, const EpistemicModel& m) {
  long long total = 1;
  for (int i = 0; i < g.num_players(); ++i) {
    int k = num_classes(m.agent_class[i + 1]);
    for (int c = 0; c < k; ++c) total *= static_cast<long long>(g.players[i].actions.size());
  }
  return total;
}

EpistemicModel certainty_collapse(const EpistemicModel& m) {
  for (int v : m.world_state)
    if (v != m.world_state[0]) return m;
  EpistemicModel out;
  out.world_state = {m.world_state[0]};
  out.agent_class.assign(m.num_agents(), {0});
  return out;
}

namespace {

struct UpdateContext {
  const GameStructure& g;
  const MoveIndex& index;
  const Agent0Partition& part;
};

std::vector<UpdateComponent> update_model_impl(const UpdateContext& ctx, const EpistemicModel& m,
                                               const AdmissibleAssignment& a, ComponentMode mode) {
  const GameStructure& g = ctx.g;
  const int n_agents = g.num_players() + 1;

  // Unfold: one successor world per (parent world, move target).
  std::vector<std::pair<int, int>> children;
  for (int w = 0; w < m.num_worlds(); ++w) {
    int code = ctx.index.encode(a.profile_of[w]);
    for (int v2 : ctx.index.successors(m.world_state[w], code)) children.emplace_back(w, v2);
  }
  const int nc = static_cast<int>(children.size());

  // An agent relates two successor worlds when he related the parents and the
  // targets look alike to him. (A player's own action adds nothing: it is a
  // function of his parent class under an admissible assignment.)
  std::vector<std::vector<int>> child_class(n_agents, std::vector<int>(nc));
  for (int agent = 0; agent < n_agents; ++agent) {
    std::map<std::pair<int, int>, int> key_id;
    for (int c = 0; c < nc; ++c) {
      auto [parent, state] = children[c];
      int obs = agent == kObserver ? ctx.part.class_of[state]
                                   : g.players[agent - 1].obs_of_state[state];
      auto [it, fresh] = key_id.try_emplace({m.agent_class[agent][parent], obs},
                                            static_cast<int>(key_id.size()));
      child_class[agent][c] = it->second;
    }
  }

  // Components of the union of the selected relations (transitive closure).
  std::vector<int> parent_uf(nc);
  std::iota(parent_uf.begin(), parent_uf.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent_uf[x] != x) x = parent_uf[x] = parent_uf[parent_uf[x]];
    return x;
  };
  int first_agent = mode == ComponentMode::AllAgents ? 0 : 1;
  for (int agent = first_agent; agent < n_agents; ++agent) {
    std::map<int, int> first_in_class;
    for (int c = 0; c < nc; ++c) {
      auto [it, fresh] = first_in_class.try_emplace(child_class[agent][c], c);
      if (!fresh) parent_uf[find(c)] = find(it->second);
    }
  }

  std::vector<UpdateComponent> out;
  std::map<int, int> comp_of_root;
  std::vector<std::vector<int>> comp_children;  // local child indices
  for (int c = 0; c < nc; ++c) {
    auto [it, fresh] = comp_of_root.try_emplace(find(c), static_cast<int>(comp_children.size()));
    if (fresh) comp_children.emplace_back();
    comp_children[it->second].push_back(c);
  }

  for (const std::vector<int>& cs : comp_children) {
    // The observer must not be able to split a component: it would mean he
    // can rule out worlds that the construction keeps possible.
    for (int c : cs)
      if (child_class[kObserver][c] != child_class[kObserver][cs[0]])
        throw std::logic_error("successor component spans several observer classes");

    UpdateComponent comp;
    EpistemicModel raw;
    raw.agent_class.assign(n_agents, std::vector<int>(cs.size()));
    raw.world_state.resize(cs.size());
    for (std::size_t k = 0; k < cs.size(); ++k) {
      comp.children.push_back(children[cs[k]]);
      raw.world_state[k] = children[cs[k]].second;
      for (int agent = 0; agent < n_agents; ++agent)
        raw.agent_class[agent][k] = child_class[agent][cs[k]];
    }
    raw = normalise_classes(std::move(raw));

    bool all_same = std::all_of(raw.world_state.begin(), raw.world_state.end(),
                                [&](int v) { return v == raw.world_state[0]; });
    if (all_same && raw.num_worlds() > 1) {
      comp.model = certainty_collapse(raw);
      comp.collapsed = true;
      comp.world_of_child.assign(cs.size(), 0);
    } else {
      comp.model = std::move(raw);
      comp.world_of_child.resize(cs.size());
      std::iota(comp.world_of_child.begin(), comp.world_of_child.end(), 0);
    }
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace

std::vector<UpdateComponent> update_model(const GameStructure& g, const EpistemicModel& m,
                                          const AdmissibleAssignment& a, ComponentMode mode) {
  MoveIndex index(g);
  Agent0Partition part = agent0_partition(g);
  return update_model_impl(UpdateContext{g, index, part}, m, a, mode);
}

namespace {

/// Iterated refinement: recolour worlds by (own colour, per-agent multiset of
/// classmates' colours) until stable. Isomorphism-invariant, so it can seed
/// and prune the exact search below. Classmate multisets are shared by every
/// member of a class, so they are ranked once per class and each world's
/// signature stays fixed-length; memory stays linear in the model size.
std::vector<int> refine_colours(const EpistemicModel& m) {
  const int nw = m.num_worlds();
  std::vector<int> colour(m.world_state);
  int distinct = 0;
  while (true) {
    std::vector<std::vector<int>> sig(nw);
    for (int w = 0; w < nw; ++w) sig[w].push_back(colour[w]);
    for (int agent = 0; agent < m.num_agents(); ++agent) {
      const std::vector<int>& cls = m.agent_class[agent];
      int num_classes = 0;
      for (int c : cls) num_classes = std::max(num_classes, c + 1);
      std::vector<std::vector<int>> around(num_classes);
      for (int w = 0; w < nw; ++w) around[cls[w]].push_back(colour[w]);
      for (std::vector<int>& a : around) std::sort(a.begin(), a.end());
      std::map<std::vector<int>, int> multiset_rank;
      for (const std::vector<int>& a : around) multiset_rank.try_emplace(a, 0);
      int mr = 0;
      for (auto& [a, id] : multiset_rank) id = mr++;
      for (int w = 0; w < nw; ++w) sig[w].push_back(multiset_rank[around[cls[w]]]);
    }
    std::map<std::vector<int>, int> rank;
    for (const auto& s : sig) rank.try_emplace(s, 0);
    int r = 0;
    for (auto& [s, id] : rank) id = r++;
    for (int w = 0; w < nw; ++w) colour[w] = rank[sig[w]];
    if (r == distinct) break;
    distinct = r;
  }
  return colour;
}

struct CanonicalSearch {
  const EpistemicModel& m;
  std::vector<int> refined;
  std::vector<bool> used;
  std::vector<int> order;
  std::vector<int> seq;
  std::vector<std::vector<int>> new_class;  // [agent][old class] -> new id or -1
  std::vector<int> fresh;
  std::vector<int> best_seq;
  std::vector<int> best_order;

  explicit CanonicalSearch(const EpistemicModel& model) : m(model) {
    refined = refine_colours(m);
    used.assign(m.num_worlds(), false);
    new_class.resize(m.num_agents());
    fresh.assign(m.num_agents(), 0);
    for (int agent = 0; agent < m.num_agents(); ++agent)
      new_class[agent].assign(num_classes(m.agent_class[agent]), -1);
  }

  std::vector<int> element(int w) const {
    std::vector<int> e{refined[w], m.world_state[w]};
    for (int agent = 0; agent < m.num_agents(); ++agent) {
      int c = new_class[agent][m.agent_class[agent][w]];
      e.push_back(c >= 0 ? c : fresh[agent]);
    }
    return e;
  }

  void run() {
    dfs();
  }

  void dfs() {
    if (static_cast<int>(order.size()) == m.num_worlds()) {
      if (best_seq.empty() || seq < best_seq) {
        best_seq = seq;
        best_order = order;
      }
      return;
    }
    std::vector<int> min_elem;
    for (int w = 0; w < m.num_worlds(); ++w) {
      if (used[w]) continue;
      std::vector<int> e = element(w);
      if (min_elem.empty() || e < min_elem) min_elem = std::move(e);
    }
    for (int w = 0; w < m.num_worlds(); ++w) {
      if (used[w] || element(w) != min_elem) continue;
      used[w] = true;
      order.push_back(w);
      std::size_t seq_mark = seq.size();
      seq.insert(seq.end(), min_elem.begin(), min_elem.end());
      std::vector<std::pair<int, int>> assigned;  // (agent, old class) given fresh ids
      for (int agent = 0; agent < m.num_agents(); ++agent) {
        int& slot = new_class[agent][m.agent_class[agent][w]];
        if (slot < 0) {
          slot = fresh[agent]++;
          assigned.emplace_back(agent, m.agent_class[agent][w]);
        }
      }
      dfs();
      for (auto [agent, cls] : assigned) {
        new_class[agent][cls] = -1;
        --fresh[agent];
      }
      seq.resize(seq_mark);
      order.pop_back();
      used[w] = false;
    }
  }
};

}  // namespace

namespace {

/// True when every agent either separates all worlds or confuses all of them.
/// Such a model is invariant under any permutation that respects the refined
/// colouring, so sorting by colour is already canonical and the exact search
/// would only enumerate ties — factorially many on large symmetric models.
bool partitions_trivial(const EpistemicModel& m) {
  for (const std::vector<int>& classes : m.agent_class) {
    int num_classes = 0;
    for (int c : classes) num_classes = std::max(num_classes, c + 1);
    std::vector<int> size(num_classes, 0);
    for (int c : classes) ++size[c];
    for (int n : size)
      if (n > 1 && n != m.num_worlds()) return false;
  }
  return true;
}

/// The order and element sequence the exact search would settle on, computed
/// directly: worlds ascending by refined colour (stable), each element being
/// [colour, state, per-agent class id] with singleton classes numbered by
/// position and universal classes always 0.
void sorted_canonical_order(const EpistemicModel& m, std::vector<int>& best_order,
                            std::vector<int>& best_seq) {
  const int nw = m.num_worlds();
  // Refinement stabilises at the dense rank of each world's state here:
  // singleton classes only echo the world's own colour and a universal class
  // adds the same multiset everywhere.
  std::vector<int> states(m.world_state);
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  std::vector<int> refined(nw);
  for (int w = 0; w < nw; ++w)
    refined[w] = static_cast<int>(
        std::lower_bound(states.begin(), states.end(), m.world_state[w]) - states.begin());
  best_order.resize(nw);
  std::iota(best_order.begin(), best_order.end(), 0);
  std::stable_sort(best_order.begin(), best_order.end(),
                   [&](int a, int b) { return refined[a] < refined[b]; });
  std::vector<char> universal(m.num_agents());
  for (int agent = 0; agent < m.num_agents(); ++agent) {
    const std::vector<int>& cls = m.agent_class[agent];
    universal[agent] =
        std::all_of(cls.begin(), cls.end(), [&](int c) { return c == cls[0]; });
  }
  best_seq.clear();
  for (int pos = 0; pos < nw; ++pos) {
    int w = best_order[pos];
    best_seq.push_back(refined[w]);
    best_seq.push_back(m.world_state[w]);
    for (int agent = 0; agent < m.num_agents(); ++agent)
      best_seq.push_back(universal[agent] ? 0 : pos);
  }
}

}  // namespace

Canonicalised canonicalise(const EpistemicModel& m) {
  EpistemicModel norm = normalise_classes(m);
  std::vector<int> best_seq;
  std::vector<int> best_order;
  if (partitions_trivial(norm)) {
    sorted_canonical_order(norm, best_order, best_seq);
  } else {
    CanonicalSearch search(norm);
    search.run();
    best_seq = std::move(search.best_seq);
    best_order = std::move(search.best_order);
  }

  Canonicalised out;
  out.key.bits.push_back(norm.num_worlds());
  out.key.bits.push_back(norm.num_agents());
  out.key.bits.insert(out.key.bits.end(), best_seq.begin(), best_seq.end());

  out.world_perm.assign(norm.num_worlds(), -1);
  for (int pos = 0; pos < norm.num_worlds(); ++pos) out.world_perm[best_order[pos]] = pos;

  EpistemicModel relabelled;
  relabelled.world_state.resize(norm.num_worlds());
  relabelled.agent_class.assign(norm.num_agents(), std::vector<int>(norm.num_worlds()));
  for (int pos = 0; pos < norm.num_worlds(); ++pos) {
    int w = best_order[pos];
    relabelled.world_state[pos] = norm.world_state[w];
    for (int agent = 0; agent < norm.num_agents(); ++agent)
      relabelled.agent_class[agent][pos] = norm.agent_class[agent][w];
  }
  out.model = normalise_classes(std::move(relabelled));
  return out;
}

CanonicalKey canonical_key(const EpistemicModel& m) {
  return canonicalise(m).key;
}

int TrackingArena::find(const CanonicalKey& key) const {
  for (int i = 0; i < num_nodes(); ++i)
    if (nodes[i].key == key) return i;
  return -1;
}

TrackingArena build_tracking_arena(const GameStructure& g, int node_limit, ComponentMode mode) {
  MoveIndex index(g);
  Agent0Partition part = agent0_partition(g);
  UpdateContext ctx{g, index, part};

  TrackingArena arena;
  arena.mode = mode;
  arena.recurring = decide_recurring_certainty(g).recurring;

  std::map<CanonicalKey, int> id_of;
  int largest = 1;
  auto intern = [&](const EpistemicModel& m) {
    // A model bigger than everything interned so far is certainly new, so the
    // limit can be enforced before paying for canonicalisation. That matters
    // when models grow without bound: canonicalising them is the expensive part.
    if (m.num_worlds() > largest && arena.num_nodes() >= node_limit)
      throw NodeLimitError("knowledge graph exceeds " + std::to_string(node_limit) +
                               " distinct models; certainty is too sparse to track",
                           static_cast<long long>(arena.num_nodes()) + 1, m.num_worlds());
    if (m.num_worlds() > kModelWorldLimit)
      throw NodeLimitError("epistemic model grew past " + std::to_string(kModelWorldLimit) +
                               " worlds; certainty is too sparse to track",
                           static_cast<long long>(arena.num_nodes()) + 1, m.num_worlds());
    Canonicalised canon = canonicalise(m);
    auto [it, fresh] = id_of.try_emplace(canon.key, arena.num_nodes());
    if (fresh) {
      largest = std::max(largest, m.num_worlds());
      if (arena.num_nodes() >= node_limit)
        throw NodeLimitError("knowledge graph exceeds " + std::to_string(node_limit) +
                                 " distinct models; certainty is too sparse to track",
                             static_cast<long long>(arena.num_nodes()) + 1, largest);
      TrackingArena::Node node;
      node.colour = canon.model.colour(g);
      node.model = std::move(canon.model);
      node.key = std::move(canon.key);
      arena.nodes.push_back(std::move(node));
    }
    return it->second;
  };

  arena.initial = intern(initial_model(g));
  for (int i = 0; i < arena.num_nodes(); ++i) {
    const EpistemicModel model = arena.nodes[i].model;  // copy: nodes may reallocate
    std::map<std::vector<int>, int> group_of;
    for (const AdmissibleAssignment& a : admissible_assignments(g, model)) {
      std::vector<int> succs;
      for (const UpdateComponent& comp : update_model_impl(ctx, model, a, mode))
        detail::sorted_insert(succs, intern(comp.model));
      // Assignments with the same successor set give nature the same choice;
      // keep the first one found as the group's face.
      auto [it, fresh] = group_of.try_emplace(succs, static_cast<int>(arena.nodes[i].groups.size()));
      if (fresh) arena.nodes[i].groups.push_back(TrackingArena::EdgeGroup{a, std::move(succs)});
    }
  }
  return arena;
}

}  // namespace recert
