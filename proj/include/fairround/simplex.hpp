#pragma once

#include <vector>

namespace fairround {

// Dense two-phase primal simplex for
//   min c.x  s.t.  A_eq x = b_eq,  A_le x <= b_le,  x >= 0.
// Entering variable: most negative reduced cost, ties by lowest column
// index; Bland's rule takes over after a degenerate stall so the method
// cannot cycle. Pivoting is fully deterministic.
struct SimplexProblem {
  int num_vars = 0;
  std::vector<double> cost;
  std::vector<std::vector<double>> eq_rows;  // each of size num_vars
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
};

struct SimplexResult {
  enum class Status { kOptimal, kInfeasible };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
};

SimplexResult solve_simplex(const SimplexProblem& prob);

}  // namespace fairround
