#pragma once

#include <string>
#include <vector>

#include "fairround/contention.hpp"
#include "fairround/instance.hpp"
#include "fairround/rng.hpp"
#include "fairround/timeidx_lp.hpp"

namespace fairround {

// Per (machine, job) with positive total height: the chosen rectangle,
// random offset tau in (0, p], shifted start and theta = shifted + tau.
struct Representative {
  int machine = 0;
  int job = 0;
  int start = 0;
  int len = 0;
  double x_ij = 0.0;  // total height of the (machine, job) pair
  double tau = 0.0;
  double shifted = 0.0;
  double theta = 0.0;
  bool good = true;
};

struct RepSet {
  int machine_count = 0;
  int job_count = 0;
  std::vector<Representative> reps;
  std::vector<std::vector<int>> index;  // [machine][job] -> rep, -1 if none
};

// Random grid: rho in (1/10, 1), intervals I_k = (rho 10^k, rho 10^{k+1}],
// and the per-representative association flags (bad jobs only, fair coin).
struct GridContext {
  double rho = 0.5;
  std::vector<char> associated;  // per rep index
  std::vector<int> interval_k;   // per rep index, valid when associated
};

struct SchedEntry {
  int job = 0;
  int start = 0;
  int end = 0;
};

struct Schedule {
  double objective = 0.0;
  std::vector<std::vector<SchedEntry>> machines;
};

// Start shift: 0.34 (s + x p) for heavy pairs (x >= 9/100), else 0.34 s.
double shift_amount(int s, int p, double x_ij);

// Good iff s >= p/10 or x_ij >= 9/100 (both boundaries inclusive).
bool classify_good(int s, int p, double x_ij);

double sample_rho(Rng& rng);

// Unique k with rho 10^k < theta <= rho 10^{k+1}; g = rho 10^k.
struct GridCell {
  int k = 0;
  double g = 0.0;
};
GridCell grid_interval(double theta, double rho);

// Picks R_ijs with probability x_ijs / x_ij and tau uniform on (0, p].
RepSet choose_representatives(const RectangleSet& rects, const Rng& stream);

// Flips the fair association coin for every bad representative and records
// its theta's interval.
GridContext associate(const RepSet& reps, double rho, const Rng& stream);

// Jobs associated with one interval on one machine form a group when their
// total height is at most 1; otherwise they all revert to singletons.
Grouping build_groups(const RepSet& reps, const GridContext& grid);

// Per machine: sort assigned jobs by theta (ties by job index), stack
// back-to-back from 0.
Schedule assemble_schedule(const Assignment& assign, const RepSet& reps,
                           const Instance& inst);

// LP solved once, shared across Monte Carlo trials.
struct SolveContext {
  Instance inst;
  LpSolution sol;
  RectangleSet rects;
};

// horizon <= 0 selects the default horizon. Throws LpError on failure.
SolveContext prepare(const Instance& inst, int horizon = 0);

struct RoundResult {
  Schedule sched;
  int iterations = 0;
};

// One draw of the full rounding: representatives, grid, groups, contention
// resolution, schedule assembly.
RoundResult round_once(const SolveContext& ctx, const Rng& stream);

// Baseline: each job independently picks (i, s) with probability x_ijs,
// theta = s + tau, no shifting and no groups.
Schedule independent_round_once(const SolveContext& ctx, const Rng& stream);

Schedule approx_solve(const Instance& inst, const Rng& stream);

double schedule_objective(const Schedule& sched, const Instance& inst);

// {"objective": v, "machines": [[{"job","start","end"}...]...]}; job
// indices are 1-based in the file.
std::string serialize_schedule(const Schedule& sched);

}  // namespace fairround
