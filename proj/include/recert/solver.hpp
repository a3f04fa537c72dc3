#pragma once

#include "recert/objective.hpp"

namespace recert {

/// Positional solution of a parity game under the min-even convention. The
/// strategy array covers both sides: for a node owned by the side that wins
/// it, the chosen successor; -1 elsewhere.
struct ParitySolution {
  std::vector<bool> coalition_wins;
  std::vector<int> strategy;

  bool initial_won(const ParityGame& pg) const { return coalition_wins[pg.initial]; }
};

/// Zielonka's recursive attractor decomposition. The returned strategies are
/// re-checked internally against the cycle criterion; a failure there is a
/// bug and raises std::logic_error.
ParitySolution solve_parity(const ParityGame& pg);

/// Cycle criterion: inside the coalition region, following the coalition
/// strategy, no cycle has an odd minimal priority — and dually for nature.
/// Exposed for tests; solve_parity already enforces it.
bool check_solution(const ParityGame& pg, const ParitySolution& sol);

}  // namespace recert
