#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fairround/rng.hpp"

namespace fairround {

// Fractional assignment of jobs to machines; each job's heights sum to 1.
struct FracAssignment {
  int machine_count = 0;
  int job_count = 0;
  std::vector<std::vector<double>> x;  // [machine][job]

  static FracAssignment zeros(int machines, int jobs) {
    FracAssignment f;
    f.machine_count = machines;
    f.job_count = jobs;
    f.x.assign(machines, std::vector<double>(jobs, 0.0));
    return f;
  }
};

// Per machine, a family of disjoint job subsets with total height <= 1.
// Jobs absent from every subset act as implicit singletons.
struct Grouping {
  std::vector<std::vector<std::vector<int>>> groups;  // [machine][g][member]

  static Grouping singletons(int machines) {
    Grouping g;
    g.groups.assign(machines, {});
    return g;
  }
};

struct IterationOutcome {
  std::vector<int> assigned_machine;  // per job, -1 when unassigned/inactive
  // Diagnostics, filled only when requested.
  std::vector<std::vector<int>> potential_tickets;  // [machine][job]
  std::vector<std::vector<int>> real_tickets;       // [machine][job]
  std::vector<std::vector<char>> recommended;       // [machine][job]
};

struct Assignment {
  std::vector<int> machine_of;  // per job
  std::vector<int> round_of;    // iteration (1-based) the job landed in
  int iterations = 0;
};

struct IterationOptions {
  bool keep_diagnostics = false;
  // Test hook: draw each B_ij independently instead of one recommendation
  // per group. Breaks the strong-correlation guarantee on purpose.
  bool independent_recommendations = false;
};

class ContentionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pois(lambda) pmf, lambda in [0, 1].
double pois_pmf(double lambda, int k);

// Modified distribution whose mass at k >= 1 is 1/lambda times the
// Poisson mass; at 0 the residual 1 - (1 - e^-lambda)/lambda.
double tilde_pois_pmf(double lambda, int k);

int sample_pois(double lambda, Rng& rng);
int sample_tilde_pois(double lambda, Rng& rng);

// One rounding iteration over the active jobs: potential tickets per
// (machine, job), one recommendation per group, real tickets where both
// agree, then a uniform choice among each job's real tickets.
IterationOutcome run_round_iteration(const FracAssignment& frac,
                                     const Grouping& groups,
                                     const std::vector<char>& active,
                                     const Rng& stream,
                                     const IterationOptions& opts = {});

int default_max_iters(int job_count);

// Iterates until every job is assigned; fresh randomness per round and
// groups restricted to the still-unassigned jobs.
Assignment resolve(const FracAssignment& frac, const Grouping& groups,
                   const Rng& stream, int max_iters = 0,
                   const IterationOptions& opts = {});

// Checks FracAssignment/Grouping invariants, throws ContentionError.
void check_inputs(const FracAssignment& frac, const Grouping& groups);

// {"assign": [machine per job], "iters": [round per job]}, 1-based machines.
std::string serialize_assignment(const Assignment& assign);

}  // namespace fairround
