#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fairround/contention.hpp"
#include "fairround/instance.hpp"
#include "fairround/sched_round.hpp"
#include "fairround/stats.hpp"
#include "fairround/timeidx_lp.hpp"

namespace fairround {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One configuration: rectangles (ids into the source RectangleSet) that are
// pairwise disjoint in time on one machine, carrying weight z.
struct Config {
  double z = 0.0;
  std::vector<int> rect_ids;
};

struct ConfigDecomposition {
  int machine = 0;
  std::vector<Config> configs;
  double quant_loss = 0.0;  // height discarded by quantization
};

struct McEntry {
  std::string test_id;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  double sigma_k = 4.0;
  bool two_sided = false;
  bool pass = false;
  int64_t trials = 0;
  uint64_t seed = 0;
};

struct McReport {
  std::vector<McEntry> entries;

  bool all_pass() const;
  void add_one_sided(std::string id, double est, double se, double bound,
                     int64_t trials, uint64_t seed, double k = 4.0);
  void add_lower_bound(std::string id, double est, double se, double bound,
                       int64_t trials, uint64_t seed, double k = 4.0);
  void add_two_sided(std::string id, double est, double se, double target,
                     int64_t trials, uint64_t seed, double k = 4.0);
};

// CSV with header: test_id,estimate,stderr,bound,sigma_k,verdict,trials,seed.
std::string mc_report_csv(const McReport& report);

// Nonincreasing w/p; ties by ascending p then original index. Returns a
// permutation of 0..n-1.
std::vector<int> smith_order(const std::vector<std::pair<int, double>>& jobs);

double smith_objective(const std::vector<std::pair<int, double>>& jobs);

struct BruteForceResult {
  double objective = 0.0;
  std::vector<int> assign;  // machine per job
};

// Exact optimum by enumerating all m^n machine assignments and sequencing
// each machine by Smith's rule. Throws OracleError when m^n > 1e7.
BruteForceResult brute_force_opt(const Instance& inst);

// Quantizes heights to multiples of eps, sorts copies by start, first-fits
// each copy onto the lowest layer whose last rectangle ends by its start;
// identical layers merge.
ConfigDecomposition config_decompose(const RectangleSet& rects, int machine,
                                     double eps = 1e-4);

// Length of rect (s, p) appearing before theta after shifting:
// min(theta, shifted+p) - shifted when shifted < theta, else 0.
double shifted_prefix_length(int s, int p, double x_ij, double theta);

// |(1/p) int_0^p [L_s(shifted* + tau) + L_s*(shifted + tau)] dtau - p| by
// composite Simpson.
double mutual_delay_residual(int s_star, int s, int p, double x_ij,
                             int panels = 10000);

// (1/p) int_0^p L_s(shifted + tau) dtau; equals p/2 analytically.
double self_delay_integral(int s, int p, double x_ij, int panels = 10000);

// Monte Carlo certification of the contention-resolution guarantees:
// marginals (two-sided), pairwise correlation bounds (one-sided, with the
// stronger grouped-pair constant), iteration decay e^{-l} for l = 1..3.
// With tamper_independent set, group recommendations are drawn
// independently per job; the strong-correlation rows are then expected to
// fail (mutation check of the harness's power).
McReport verify_rounding_properties(const FracAssignment& frac,
                                    const Grouping& groups, int64_t trials,
                                    uint64_t seed,
                                    bool tamper_independent = false);

// Decomposition invariants: total weight at most 1 (+1e-6), exact
// disjointness inside each configuration, per-rectangle height
// reconstruction within the quantization budget.
McReport decomposition_check(const RectangleSet& rects,
                             const ConfigDecomposition& decomp,
                             double eps = 1e-4);

// Monte Carlo over (representatives, tau, rho, coins): per realized grid
// cell, the associated-height tail P[sum <= 0.82] >= 0.5317 and the
// expected associated height <= 1/2.
McReport tail_bound_check(const RectangleSet& rects, int64_t trials,
                          uint64_t seed);

// Fixture: a rectangle set obeying the relaxation invariants (per-job
// coverage 1, machine load <= 1) dominated by early low-height rectangles,
// so grid intervals actually get populated. Variants change scale mix.
RectangleSet sliver_rich_rectangles(int variant);

// For each configuration and grid interval meeting its shifted span, the
// bad rectangles' overlap fractions sum to at most 1.
McReport bad_overlap_check(const RectangleSet& rects,
                           const ConfigDecomposition& decomp, double rho);

// Mean and binomial stderr of an indicator over split-seeded trials.
MeanStderr mc_estimate(const std::function<bool(Rng&)>& indicator,
                       int64_t trials, uint64_t seed);

}  // namespace fairround
