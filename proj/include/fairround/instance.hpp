#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fairround/rng.hpp"

namespace fairround {

// Nonpreemptive scheduling instance: m unrelated machines, n jobs,
// integral processing times p[i][j] (0 = job j cannot run on machine i)
// and positive weights w[j].
struct Instance {
  int machine_count = 0;
  int job_count = 0;
  std::vector<std::vector<int>> proc;  // [machine][job], 0 when ineligible
  std::vector<double> weight;          // [job]

  bool eligible(int i, int j) const { return proc[i][j] > 0; }
  int proc_time(int i, int j) const { return proc[i][j]; }

  // Largest finite processing time of job j over its eligible machines.
  int max_proc(int j) const;
  // Smallest finite processing time of job j over its eligible machines.
  int min_proc(int j) const;
};

struct GenParams {
  int machine_count = 2;
  int job_count = 4;
  int p_min = 1;
  int p_max = 5;
  double w_min = 1.0;
  double w_max = 1.0;
  double absent_prob = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty when the instance satisfies all invariants; otherwise one message
// per violated constraint, naming the offending job/machine.
std::vector<std::string> validate(const Instance& inst);

// Throws ParseError on malformed syntax or invariant violations.
Instance parse_instance(const std::string& text);

std::string serialize_instance(const Instance& inst);

// Deterministic in (params, seed). Rows that would leave a job without an
// eligible machine are re-drawn.
Instance generate_random(const GenParams& params, uint64_t seed);

}  // namespace fairround
