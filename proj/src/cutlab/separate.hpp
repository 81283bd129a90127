#pragma once

#include <vector>

#include "lp.hpp"
#include "milp.hpp"

namespace cutlab {

// One candidate cutting plane pi'x <= pi0 over structural variables. The row
// carries its provenance (separator kind, source variable, rank); `violation`
// is pi'x* - pi0 at the LP solution that generated it.
struct Cut {
  Row row;
  double violation = 0.0;
};

struct CutPool {
  std::vector<Cut> cuts;
  int generated_at_round = 0;

  bool empty() const { return cuts.empty(); }
  size_t size() const { return cuts.size(); }
};

// Derives Gomory cuts from the optimal simplex tableau: for every basic
// integrality-constrained variable with a fractional value, the fractional
// cut (when the tableau row is purely integer) and the mixed-integer cut
// (always). Rows touched by a free nonbasic column are skipped, since no
// bound shift exists for them. The pool is deduplicated on normalized
// coefficients and every returned cut is violated by the generating solution.
CutPool separate(const LpSolution& sol, const LpRelaxation& relax,
                 const SimplexSolver& solver);

// |a'b| / (|a||b|) over structural coefficients: 1 for parallel rows, 0 for
// orthogonal ones.
double parallelism(const Row& a, const Row& b);

}  // namespace cutlab
