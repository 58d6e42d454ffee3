#pragma once

#include <string>
#include <vector>

#include "fairround/instance.hpp"

namespace fairround {

// One LP column: job `job` starting on machine `machine` at time `start`.
struct LpVar {
  int machine = 0;
  int job = 0;
  int start = 0;
};

// Time-indexed relaxation. Variables exist for every eligible (i, j) and
// every start s in [0, T - p_ij]; one coverage row per job (sum = 1) and
// one capacity row per machine and integer time t in [0, T) covering the
// columns whose execution window contains t.
struct LpProblem {
  Instance inst;
  int horizon = 0;
  std::vector<LpVar> vars;
  std::vector<double> cost;  // w_j * (s + p_ij)

  int num_vars() const { return static_cast<int>(vars.size()); }
};

struct LpSolution {
  enum class Status { kOptimal, kInfeasible };
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<LpVar> vars;
  std::vector<double> x;     // aligned with vars, cleaned and renormalized
  std::vector<double> cost;  // w_j * (s + p_ij) per var
  std::vector<int> len;      // p_ij per var
  int machine_count = 0;
  int job_count = 0;
};

struct Rect {
  int machine = 0;
  int job = 0;
  int start = 0;
  int len = 0;
  double height = 0.0;
};

struct RectangleSet {
  int machine_count = 0;
  int job_count = 0;
  std::vector<Rect> rects;
  std::vector<std::vector<double>> height_ij;  // x_ij = sum_s x_ijs

  std::vector<int> rects_on_machine(int i) const;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// T = sum over jobs of the largest finite p_ij; feasible for every
// assignment.
int default_horizon(const Instance& inst);

// Throws LpError when some job cannot finish by T on any machine.
LpProblem build_lp(const Instance& inst, int horizon);

LpSolution solve_lp(const LpProblem& prob);

RectangleSet extract_rectangles(const LpSolution& sol);

double lp_objective(const LpSolution& sol);

// {"objective": v, "x": [{"i","j","s","v"}...]}, positive entries sorted
// by (i, j, s). Indices are 1-based in the file.
std::string serialize_solution(const LpSolution& sol);

}  // namespace fairround
