#include "recert/solver.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

namespace recert {

namespace {

/// Zielonka's algorithm. Winner and strategy arrays are filled in for every
/// node of the subgame each recursive call receives.
struct Zielonka {
  const ParityGame& pg;
  std::vector<std::vector<int>> rev;
  ParitySolution sol;

  explicit Zielonka(const ParityGame& game) : pg(game) {
    rev.resize(pg.num_nodes());
    for (int u = 0; u < pg.num_nodes(); ++u)
      for (int v : pg.nodes[u].succ) rev[v].push_back(u);
    sol.coalition_wins.assign(pg.num_nodes(), false);
    sol.strategy.assign(pg.num_nodes(), -1);
  }

  // side 0 = coalition (wants even), side 1 = nature (wants odd)
  bool owned_by(int u, int side) const { return (pg.nodes[u].coalition ? 0 : 1) == side; }

  /// Nodes from which `side` can force a visit to `target` inside `alive`.
  /// Records the forcing edge for side-owned nodes outside the target set.
  std::vector<char> attractor(int side, const std::vector<char>& target,
                              const std::vector<char>& alive) {
    std::vector<char> in(pg.num_nodes(), 0);
    std::deque<int> queue;
    for (int u = 0; u < pg.num_nodes(); ++u)
      if (alive[u] && target[u]) {
        in[u] = 1;
        queue.push_back(u);
      }
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int w : rev[u]) {
        if (!alive[w] || in[w]) continue;
        if (owned_by(w, side)) {
          // Pick the forcing edge before marking w: with w already in, a
          // self-loop would qualify and the strategy would stall forever.
          for (int v : pg.nodes[w].succ)
            if (alive[v] && in[v]) {
              sol.strategy[w] = v;
              break;
            }
          in[w] = 1;
          queue.push_back(w);
        } else {
          bool trapped = true;
          for (int v : pg.nodes[w].succ)
            if (alive[v] && !in[v]) {
              trapped = false;
              break;
            }
          if (trapped) {
            in[w] = 1;
            queue.push_back(w);
          }
        }
      }
    }
    return in;
  }

  void solve(const std::vector<char>& alive) {
    int p = std::numeric_limits<int>::max();
    for (int u = 0; u < pg.num_nodes(); ++u)
      if (alive[u]) p = std::min(p, pg.nodes[u].priority);
    if (p == std::numeric_limits<int>::max()) return;  // empty subgame
    int side = p % 2;

    std::vector<char> top(pg.num_nodes(), 0);
    for (int u = 0; u < pg.num_nodes(); ++u)
      if (alive[u] && pg.nodes[u].priority == p) top[u] = 1;
    std::vector<char> attr = attractor(side, top, alive);

    std::vector<char> rest(pg.num_nodes(), 0);
    for (int u = 0; u < pg.num_nodes(); ++u) rest[u] = alive[u] && !attr[u];
    solve(rest);

    std::vector<char> opp_win(pg.num_nodes(), 0);
    bool opp_nonempty = false;
    for (int u = 0; u < pg.num_nodes(); ++u)
      if (rest[u] && sol.coalition_wins[u] == (side == 1)) {
        opp_win[u] = 1;
        opp_nonempty = true;
      }

    if (!opp_nonempty) {
      // `side` wins everywhere: recur to the top set from the attractor,
      // anything inside it at the top set, sub-strategy elsewhere.
      for (int u = 0; u < pg.num_nodes(); ++u) {
        if (!alive[u]) continue;
        sol.coalition_wins[u] = side == 0;
        if (!owned_by(u, side)) {
          sol.strategy[u] = -1;
        } else if (top[u]) {
          for (int v : pg.nodes[u].succ)
            if (alive[v]) {
              sol.strategy[u] = v;
              break;
            }
        }
        // attracted nodes keep the attractor edge, the rest keep the
        // sub-solution's edge; both were just written above.
      }
      return;
    }

    std::vector<char> trap = attractor(1 - side, opp_win, alive);
    std::vector<char> rest2(pg.num_nodes(), 0);
    for (int u = 0; u < pg.num_nodes(); ++u) rest2[u] = alive[u] && !trap[u];
    solve(rest2);
    for (int u = 0; u < pg.num_nodes(); ++u) {
      if (!alive[u] || !trap[u]) continue;
      sol.coalition_wins[u] = side == 1;
      if (owned_by(u, side)) sol.strategy[u] = -1;  // drop stale attractor edges
      // opponent-owned: opp_win keeps its sub-strategy, trap \ opp_win the
      // attractor edge recorded above.
    }
  }
};

/// True when the graph restricted to `nodes` (edge fn) has a cycle through a
/// node of priority exactly `p`, all nodes having priority >= p.
bool has_bad_cycle(const ParityGame& pg, const std::vector<char>& region,
                   const std::vector<int>& strategy, bool follow_coalition, int p) {
  const int n = pg.num_nodes();
  std::vector<char> in(n, 0);
  for (int u = 0; u < n; ++u) in[u] = region[u] && pg.nodes[u].priority >= p;

  auto edges = [&](int u) {
    std::vector<int> out;
    bool restricted = pg.nodes[u].coalition == follow_coalition;
    if (restricted && strategy[u] >= 0)
      out.push_back(strategy[u]);
    else if (!restricted)
      out = pg.nodes[u].succ;
    std::vector<int> kept;
    for (int v : out)
      if (in[v]) kept.push_back(v);
    return kept;
  };

  // Tarjan; a strongly connected component with a priority-p node is bad if
  // it actually contains a cycle (more than one node, or a self-loop).
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;
  bool bad = false;

  std::function<void(int)> strongconnect = [&](int u) {
    index[u] = low[u] = next_index++;
    stack.push_back(u);
    on_stack[u] = 1;
    for (int v : edges(u)) {
      if (index[v] < 0) {
        strongconnect(v);
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
        comp[w] = next_comp;
        members.push_back(w);
        if (w == u) break;
      }
      ++next_comp;
      bool has_p = false, cyclic = members.size() > 1;
      for (int w : members) {
        if (pg.nodes[w].priority == p) has_p = true;
        if (!cyclic)
          for (int v : edges(w))
            if (v == w) cyclic = true;
      }
      if (has_p && cyclic) bad = true;
    }
  };
  for (int u = 0; u < n; ++u)
    if (in[u] && index[u] < 0) strongconnect(u);
  return bad;
}

}  // namespace

bool check_solution(const ParityGame& pg, const ParitySolution& sol) {
  const int n = pg.num_nodes();
  if (static_cast<int>(sol.coalition_wins.size()) != n ||
      static_cast<int>(sol.strategy.size()) != n)
    return false;

  int max_priority = 0;
  for (int u = 0; u < n; ++u) max_priority = std::max(max_priority, pg.nodes[u].priority);

  for (bool coalition_side : {true, false}) {
    std::vector<char> region(n, 0);
    for (int u = 0; u < n; ++u) region[u] = sol.coalition_wins[u] == coalition_side;

    for (int u = 0; u < n; ++u) {
      if (!region[u]) continue;
      if (pg.nodes[u].coalition == coalition_side) {
        // owner inside his region needs a strategy edge back into the region
        int v = sol.strategy[u];
        if (v < 0 || !region[v]) return false;
        if (std::find(pg.nodes[u].succ.begin(), pg.nodes[u].succ.end(), v) ==
            pg.nodes[u].succ.end())
          return false;
      } else {
        // the opponent must not be able to leave the region
        for (int v : pg.nodes[u].succ)
          if (!region[v]) return false;
      }
    }

    // No cycle in the region under the owner's strategy may favour the
    // opponent: odd minima beat the coalition, even minima beat nature.
    for (int p = 0; p <= max_priority; ++p) {
      bool opponent_good = coalition_side ? p % 2 == 1 : p % 2 == 0;
      if (!opponent_good) continue;
      if (has_bad_cycle(pg, region, sol.strategy, coalition_side, p)) return false;
    }
  }
  return true;
}

ParitySolution solve_parity(const ParityGame& pg) {
  Zielonka z(pg);
  std::vector<char> alive(pg.num_nodes(), 1);
  z.solve(alive);
  if (!check_solution(pg, z.sol))
    throw std::logic_error("parity solution failed its internal cycle check");
  return z.sol;
}

}  // namespace recert
