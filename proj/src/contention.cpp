#include "fairround/contention.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

namespace fairround {

namespace {

constexpr double kHeightTol = 1e-9;
constexpr double kTailCutoff = 1e-15;

// Stream tags so the per-(iteration, machine, job) substreams used for
// tickets, recommendations and the final uniform pick never collide.
constexpr uint64_t kTicketTag = 0x7469636b;
constexpr uint64_t kRecommendTag = 0x7265636f;
constexpr uint64_t kPickTag = 0x7069636b;

}  // namespace

double pois_pmf(double lambda, int k) {
  double term = std::exp(-lambda);
  for (int i = 1; i <= k; ++i) term *= lambda / i;
  return term;
}

double tilde_pois_pmf(double lambda, int k) {
  if (lambda <= 0.0)
    throw ContentionError("tilde_pois_pmf requires lambda > 0");
  // expm1 avoids the cancellation in 1 - e^{-lambda} for tiny rates.
  if (k == 0) return 1.0 + std::expm1(-lambda) / lambda;
  // e^{-lambda} lambda^{k-1} / k!
  double term = std::exp(-lambda);
  for (int i = 2; i <= k; ++i) term *= lambda / i;
  return term;
}

int sample_pois(double lambda, Rng& rng) {
  if (lambda <= 0.0) return 0;
  const double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0;; ++k) {
    const double p = pois_pmf(lambda, k);
    acc += p;
    // Exhausted-tail guard: terms decay at least geometrically for k >= 1.
    if (u < acc || 1.0 - acc < kTailCutoff || (k >= 1 && p < kTailCutoff))
      return k;
  }
}

int sample_tilde_pois(double lambda, Rng& rng) {
  if (lambda <= 0.0)
    throw ContentionError("sample_tilde_pois requires lambda > 0");
  const double u = rng.uniform();
  double acc = 0.0;
  for (int k = 0;; ++k) {
    const double p = tilde_pois_pmf(lambda, k);
    acc += p;
    if (u < acc || 1.0 - acc < kTailCutoff || (k >= 1 && p < kTailCutoff))
      return k;
  }
}

void check_inputs(const FracAssignment& frac, const Grouping& groups) {
  const int m = frac.machine_count;
  const int n = frac.job_count;
  if (static_cast<int>(frac.x.size()) != m)
    throw ContentionError("fractional assignment has wrong machine count");
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double v = frac.x[i][j];
      if (v < 0.0 || v > 1.0 + kHeightTol)
        throw ContentionError("x_ij out of [0,1] (machine " +
                              std::to_string(i) + ", job " +
                              std::to_string(j) + ")");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > kHeightTol)
      throw ContentionError("job " + std::to_string(j) +
                            " heights sum to " + std::to_string(sum));
  }
  if (static_cast<int>(groups.groups.size()) != m)
    throw ContentionError("grouping has wrong machine count");
  for (int i = 0; i < m; ++i) {
    std::vector<char> seen(n, 0);
    for (const std::vector<int>& g : groups.groups[i]) {
      double mass = 0.0;
      for (int j : g) {
        if (j < 0 || j >= n) throw ContentionError("group member out of range");
        if (seen[j])
          throw ContentionError("job " + std::to_string(j) +
                                " appears in two groups on machine " +
                                std::to_string(i));
        seen[j] = 1;
        mass += frac.x[i][j];
      }
      if (mass > 1.0 + kHeightTol)
        throw ContentionError("group mass " + std::to_string(mass) +
                              " exceeds 1 on machine " + std::to_string(i));
    }
  }
}

IterationOutcome run_round_iteration(const FracAssignment& frac,
                                     const Grouping& groups,
                                     const std::vector<char>& active,
                                     const Rng& stream,
                                     const IterationOptions& opts) {
  const int m = frac.machine_count;
  const int n = frac.job_count;

  IterationOutcome out;
  out.assigned_machine.assign(n, -1);
  if (opts.keep_diagnostics) {
    out.potential_tickets.assign(m, std::vector<int>(n, 0));
    out.real_tickets.assign(m, std::vector<int>(n, 0));
    out.recommended.assign(m, std::vector<char>(n, 0));
  }

  // Real ticket counts per (machine, job); built machine by machine.
  std::vector<std::vector<int>> real(m, std::vector<int>(n, 0));

  for (int i = 0; i < m; ++i) {
    // Step 1: potential tickets.
    std::vector<int> potential(n, 0);
    for (int j = 0; j < n; ++j) {
      if (!active[j] || frac.x[i][j] <= 0.0) continue;
      Rng r = stream.split(kTicketTag, i, j);
      potential[j] = sample_tilde_pois(frac.x[i][j], r);
    }

    // Step 2: one recommendation per group (explicit groups first, then
    // implicit singletons for uncovered active jobs).
    std::vector<char> covered(n, 0);
    std::vector<char> recommended(n, 0);
    uint64_t group_id = 0;
    for (const std::vector<int>& g : groups.groups[i]) {
      std::vector<int> members;
      double mass = 0.0;
      for (int j : g) {
        covered[j] = 1;
        if (active[j] && frac.x[i][j] > 0.0) {
          members.push_back(j);
          mass += frac.x[i][j];
        }
      }
      ++group_id;
      if (members.empty()) continue;
      if (mass > 1.0 + kHeightTol)
        throw ContentionError("group mass exceeds 1 on machine " +
                              std::to_string(i));
      if (opts.independent_recommendations) {
        for (int j : members) {
          Rng r = stream.split(kRecommendTag, i, 0x100000 + j);
          if (r.coin(frac.x[i][j])) recommended[j] = 1;
        }
      } else {
        Rng r = stream.split(kRecommendTag, i, group_id);
        double u = r.uniform();
        for (int j : members) {
          if (u < frac.x[i][j]) {
            recommended[j] = 1;
            break;
          }
          u -= frac.x[i][j];
        }
        // Residual mass means nil: no member recommended.
      }
    }
    for (int j = 0; j < n; ++j) {
      if (covered[j] || !active[j] || frac.x[i][j] <= 0.0) continue;
      Rng r = stream.split(kRecommendTag, i, 0x200000 + static_cast<uint64_t>(j));
      if (r.coin(frac.x[i][j])) recommended[j] = 1;
    }

    // Step 3: real tickets.
    for (int j = 0; j < n; ++j)
      if (recommended[j]) real[i][j] = potential[j];

    if (opts.keep_diagnostics) {
      out.potential_tickets[i] = potential;
      out.real_tickets[i] = real[i];
      for (int j = 0; j < n; ++j) out.recommended[i][j] = recommended[j];
    }
  }

  // Step 4: each job picks one real ticket uniformly at random.
  for (int j = 0; j < n; ++j) {
    if (!active[j]) continue;
    int total = 0;
    for (int i = 0; i < m; ++i) total += real[i][j];
    if (total == 0) continue;
    Rng r = stream.split(kPickTag, j);
    int pick = static_cast<int>(r.below(static_cast<uint64_t>(total)));
    for (int i = 0; i < m; ++i) {
      if (pick < real[i][j]) {
        out.assigned_machine[j] = i;
        break;
      }
      pick -= real[i][j];
    }
  }
  return out;
}

int default_max_iters(int job_count) {
  const int n = job_count < 1 ? 1 : job_count;
  return 64 + static_cast<int>(std::ceil(8.0 * std::log(n)));
}

Assignment resolve(const FracAssignment& frac, const Grouping& groups,
                   const Rng& stream, int max_iters,
                   const IterationOptions& opts) {
  check_inputs(frac, groups);
  const int n = frac.job_count;
  if (max_iters <= 0) max_iters = default_max_iters(n);

  Assignment out;
  out.machine_of.assign(n, -1);
  out.round_of.assign(n, 0);

  std::vector<char> active(n, 1);
  int remaining = n;
  for (int iter = 1; remaining > 0 && iter <= max_iters; ++iter) {
    IterationOutcome round =
        run_round_iteration(frac, groups, active, stream.split(iter), opts);
    for (int j = 0; j < n; ++j) {
      if (!active[j] || round.assigned_machine[j] < 0) continue;
      out.machine_of[j] = round.assigned_machine[j];
      out.round_of[j] = iter;
      active[j] = 0;
      --remaining;
    }
    out.iterations = iter;
  }
  if (remaining > 0)
    throw ContentionError("contention resolution did not terminate within " +
                          std::to_string(max_iters) + " iterations");
  return out;
}

std::string serialize_assignment(const Assignment& assign) {
  using nlohmann::json;
  json machines = json::array();
  for (int i : assign.machine_of) machines.push_back(i + 1);
  json doc = {{"assign", std::move(machines)}, {"iters", assign.round_of}};
  return doc.dump(2) + "\n";
}

}  // namespace fairround
