#include "fairround/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace fairround {

namespace {

constexpr double kEulerInv = 0.36787944117144233;  // 1/e
constexpr uint64_t kTrialTag = 0x7472696c;

double strong_pair_bound(double xa, double xb) {
  return (std::exp(xa) + std::exp(xb)) / (1.0 + std::exp(1.0)) * xa * xb;
}

}  // namespace

bool McReport::all_pass() const {
  for (const McEntry& e : entries)
    if (!e.pass) return false;
  return true;
}

void McReport::add_one_sided(std::string id, double est, double se,
                             double bound, int64_t trials, uint64_t seed,
                             double k) {
  McEntry e;
  e.test_id = std::move(id);
  e.estimate = est;
  e.stderr_ = se;
  e.bound = bound;
  e.sigma_k = k;
  e.two_sided = false;
  e.pass = est <= bound + k * se;
  e.trials = trials;
  e.seed = seed;
  entries.push_back(std::move(e));
}

void McReport::add_lower_bound(std::string id, double est, double se,
                               double bound, int64_t trials, uint64_t seed,
                               double k) {
  McEntry e;
  e.test_id = std::move(id);
  e.estimate = est;
  e.stderr_ = se;
  e.bound = bound;
  e.sigma_k = k;
  e.two_sided = false;
  e.pass = est >= bound - k * se;
  e.trials = trials;
  e.seed = seed;
  entries.push_back(std::move(e));
}

void McReport::add_two_sided(std::string id, double est, double se,
                             double target, int64_t trials, uint64_t seed,
                             double k) {
  McEntry e;
  e.test_id = std::move(id);
  e.estimate = est;
  e.stderr_ = se;
  e.bound = target;
  e.sigma_k = k;
  e.two_sided = true;
  e.pass = std::fabs(est - target) <= k * se;
  e.trials = trials;
  e.seed = seed;
  entries.push_back(std::move(e));
}

std::string mc_report_csv(const McReport& report) {
  std::ostringstream out;
  out.precision(12);
  out << "test_id,estimate,stderr,bound,sigma_k,verdict,trials,seed\n";
  for (const McEntry& e : report.entries) {
    out << e.test_id << ',' << e.estimate << ',' << e.stderr_ << ','
        << e.bound << ',' << e.sigma_k << ','
        << (e.pass ? "pass" : "fail") << ',' << e.trials << ',' << e.seed
        << '\n';
  }
  return out.str();
}

std::vector<int> smith_order(
    const std::vector<std::pair<int, double>>& jobs) {
  std::vector<int> order(jobs.size());
  for (size_t i = 0; i < jobs.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    // w_a/p_a > w_b/p_b without division.
    const double lhs = jobs[a].second * jobs[b].first;
    const double rhs = jobs[b].second * jobs[a].first;
    if (lhs != rhs) return lhs > rhs;
    if (jobs[a].first != jobs[b].first) return jobs[a].first < jobs[b].first;
    return a < b;
  });
  return order;
}

double smith_objective(const std::vector<std::pair<int, double>>& jobs) {
  double obj = 0.0;
  long long t = 0;
  for (int idx : smith_order(jobs)) {
    t += jobs[idx].first;
    obj += jobs[idx].second * t;
  }
  return obj;
}

BruteForceResult brute_force_opt(const Instance& inst) {
  const int m = inst.machine_count;
  const int n = inst.job_count;
  double count = std::pow(static_cast<double>(m), n);
  if (count > 1e7)
    throw OracleError("instance too large for exhaustive search (m^n > 1e7)");

  BruteForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> assign(n, 0);
  std::vector<std::vector<std::pair<int, double>>> per_machine(m);
  for (;;) {
    bool feasible = true;
    for (int j = 0; j < n && feasible; ++j)
      feasible = inst.eligible(assign[j], j);
    if (feasible) {
      for (auto& v : per_machine) v.clear();
      for (int j = 0; j < n; ++j)
        per_machine[assign[j]].push_back(
            {inst.proc_time(assign[j], j), inst.weight[j]});
      double obj = 0.0;
      for (int i = 0; i < m; ++i) obj += smith_objective(per_machine[i]);
      if (obj < best.objective) {
        best.objective = obj;
        best.assign = assign;
      }
    }
    int j = 0;
    while (j < n && ++assign[j] == m) assign[j++] = 0;
    if (j == n) break;
  }
  return best;
}

ConfigDecomposition config_decompose(const RectangleSet& rects, int machine,
                                     double eps) {
  ConfigDecomposition out;
  out.machine = machine;
  const std::vector<int> ids = rects.rects_on_machine(machine);

  // Capacity precondition: load at most 1 at every time.
  std::map<int, double> delta;
  for (int id : ids) {
    const Rect& r = rects.rects[id];
    delta[r.start] += r.height;
    delta[r.start + r.len] -= r.height;
  }
  double load = 0.0;
  for (const auto& [t, d] : delta) {
    load += d;
    if (load > 1.0 + 1e-6)
      throw OracleError("machine load exceeds capacity at t=" +
                        std::to_string(t));
  }

  // Quantized copies, sorted by start time.
  struct Copy {
    int start, end, id;
  };
  std::vector<Copy> copies;
  for (int id : ids) {
    const Rect& r = rects.rects[id];
    const int k = static_cast<int>(std::floor(r.height / eps + 1e-9));
    out.quant_loss += r.height - k * eps;
    for (int c = 0; c < k; ++c)
      copies.push_back({r.start, r.start + r.len, id});
  }
  std::sort(copies.begin(), copies.end(), [](const Copy& a, const Copy& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.id < b.id;
  });

  // First-fit onto layers; interval graphs make this an optimal layering.
  std::vector<int> layer_end;
  std::vector<std::vector<int>> layer_rects;
  for (const Copy& c : copies) {
    int chosen = -1;
    for (int l = 0; l < static_cast<int>(layer_end.size()); ++l) {
      if (layer_end[l] <= c.start) {
        chosen = l;
        break;
      }
    }
    if (chosen < 0) {
      chosen = static_cast<int>(layer_end.size());
      layer_end.push_back(0);
      layer_rects.emplace_back();
    }
    layer_end[chosen] = c.end;
    layer_rects[chosen].push_back(c.id);
  }

  // Merge identical layers.
  std::map<std::vector<int>, double> merged;
  for (auto& lr : layer_rects) {
    std::sort(lr.begin(), lr.end());
    merged[lr] += eps;
  }
  for (auto& [rect_ids, z] : merged) out.configs.push_back({z, rect_ids});
  return out;
}

double shifted_prefix_length(int s, int p, double x_ij, double theta) {
  const double shifted = s + shift_amount(s, p, x_ij);
  if (shifted >= theta) return 0.0;
  return std::min(theta, shifted + p) - shifted;
}

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i)
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

double mutual_delay_residual(int s_star, int s, int p, double x_ij,
                             int panels) {
  const double sh = s + shift_amount(s, p, x_ij);
  const double sh_star = s_star + shift_amount(s_star, p, x_ij);
  const double integral =
      simpson(
          [&](double tau) {
            return shifted_prefix_length(s, p, x_ij, sh_star + tau) +
                   shifted_prefix_length(s_star, p, x_ij, sh + tau);
          },
          0.0, p, panels) /
      p;
  return std::fabs(integral - p);
}

double self_delay_integral(int s, int p, double x_ij, int panels) {
  const double sh = s + shift_amount(s, p, x_ij);
  return simpson(
             [&](double tau) {
               return shifted_prefix_length(s, p, x_ij, sh + tau);
             },
             0.0, p, panels) /
         p;
}

McReport verify_rounding_properties(const FracAssignment& frac,
                                    const Grouping& groups, int64_t trials,
                                    uint64_t seed, bool tamper_independent) {
  const int m = frac.machine_count;
  const int n = frac.job_count;
  const Rng root(seed);
  IterationOptions opts;
  opts.independent_recommendations = tamper_independent;

  std::vector<std::vector<int>> machine_of(trials);
  std::vector<std::vector<int>> round_of(trials);
  parallel_for_trials(trials, [&](int64_t t) {
    Assignment a = resolve(frac, groups, root.split(kTrialTag, t), 0, opts);
    machine_of[t] = std::move(a.machine_of);
    round_of[t] = std::move(a.round_of);
  });

  McReport report;

  // Marginals, two-sided.
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (frac.x[i][j] <= 0.0) continue;
      int64_t hits = 0;
      for (int64_t t = 0; t < trials; ++t) hits += machine_of[t][j] == i;
      const double est = static_cast<double>(hits) / trials;
      report.add_two_sided(
          "marginal_m" + std::to_string(i) + "_j" + std::to_string(j), est,
          binom_stderr(frac.x[i][j], trials), frac.x[i][j], trials, seed);
    }
  }

  // Pairwise correlations, one-sided.
  for (int i = 0; i < m; ++i) {
    std::vector<std::vector<char>> together(n, std::vector<char>(n, 0));
    for (const std::vector<int>& g : groups.groups[i])
      for (int a : g)
        for (int b : g)
          if (a != b) together[a][b] = 1;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const double xa = frac.x[i][a];
        const double xb = frac.x[i][b];
        if (xa <= 0.0 || xb <= 0.0) continue;
        int64_t hits = 0;
        for (int64_t t = 0; t < trials; ++t)
          hits += machine_of[t][a] == i && machine_of[t][b] == i;
        const double est = static_cast<double>(hits) / trials;
        const bool grouped = together[a][b];
        const double bound =
            grouped ? strong_pair_bound(xa, xb) : xa * xb;
        report.add_one_sided((grouped ? "pair_grouped_m" : "pair_m") +
                                 std::to_string(i) + "_j" +
                                 std::to_string(a) + "_j" +
                                 std::to_string(b),
                             est, binom_stderr(est, trials), bound, trials,
                             seed);
      }
    }
  }

  // Iteration decay: fraction assigned in round 1, unassigned after l.
  std::vector<double> assigned1(trials);
  for (int64_t t = 0; t < trials; ++t) {
    int c = 0;
    for (int j = 0; j < n; ++j) c += round_of[t][j] == 1;
    assigned1[t] = static_cast<double>(c) / n;
  }
  MeanStderr a1 = mean_stderr(assigned1);
  report.add_two_sided("assigned_iter1", a1.mean, a1.stderr_,
                       1.0 - kEulerInv, trials, seed);
  for (int l = 1; l <= 3; ++l) {
    std::vector<double> frac_late(trials);
    for (int64_t t = 0; t < trials; ++t) {
      int c = 0;
      for (int j = 0; j < n; ++j) c += round_of[t][j] > l;
      frac_late[t] = static_cast<double>(c) / n;
    }
    MeanStderr ms = mean_stderr(frac_late);
    report.add_two_sided("unassigned_after_" + std::to_string(l), ms.mean,
                         ms.stderr_, std::exp(-l), trials, seed);
  }
  return report;
}

McReport tail_bound_check(const RectangleSet& rects, int64_t trials,
                          uint64_t seed) {
  const Rng root(seed);

  struct CellStats {
    double sum = 0.0;
    double sumsq = 0.0;
    int64_t exceed = 0;
  };
  std::vector<std::vector<std::tuple<int, int, double>>> per_trial(trials);
  parallel_for_trials(trials, [&](int64_t t) {
    const Rng stream = root.split(kTrialTag, t);
    RepSet reps = choose_representatives(rects, stream);
    Rng rho_rng = stream.split(0x72686f);
    const double rho = sample_rho(rho_rng);
    GridContext grid = associate(reps, rho, stream);
    std::map<std::pair<int, int>, double> mass;
    for (int r = 0; r < static_cast<int>(reps.reps.size()); ++r) {
      if (!grid.associated[r]) continue;
      const Representative& rep = reps.reps[r];
      mass[{rep.machine, grid.interval_k[r]}] += rep.x_ij;
    }
    for (const auto& [key, v] : mass)
      per_trial[t].push_back({key.first, key.second, v});
  });

  std::map<std::pair<int, int>, CellStats> cells;
  for (int64_t t = 0; t < trials; ++t) {
    for (const auto& [i, k, v] : per_trial[t]) {
      CellStats& cs = cells[{i, k}];
      cs.sum += v;
      cs.sumsq += v * v;
      cs.exceed += v > 0.82;
    }
  }

  McReport report;
  for (const auto& [key, cs] : cells) {
    const std::string suffix =
        "m" + std::to_string(key.first) + "_k" + std::to_string(key.second);
    // Trials where the cell stayed empty count as successes (mass 0).
    const double tail =
        1.0 - static_cast<double>(cs.exceed) / trials;
    report.add_lower_bound("tail_" + suffix, tail,
                           binom_stderr(tail, trials), 0.5317, trials, seed);
    const double mean = cs.sum / trials;
    const double var =
        std::max(0.0, cs.sumsq / trials - mean * mean);
    report.add_one_sided("height_" + suffix, mean,
                         std::sqrt(var / trials), 0.5, trials, seed);
  }
  return report;
}

McReport bad_overlap_check(const RectangleSet& rects,
                           const ConfigDecomposition& decomp, double rho) {
  double worst = 0.0;
  for (const Config& f : decomp.configs) {
    struct Span {
      double lo, hi;
      int p;
    };
    std::vector<Span> bad;
    double max_end = 0.0;
    for (int id : f.rect_ids) {
      const Rect& r = rects.rects[id];
      const double x = rects.height_ij[r.machine][r.job];
      const double sh = r.start + shift_amount(r.start, r.len, x);
      max_end = std::max(max_end, sh + r.len);
      if (!classify_good(r.start, r.len, x)) bad.push_back({sh, sh + r.len, r.len});
    }
    if (bad.empty()) continue;
    const int k_max = grid_interval(max_end, rho).k;
    for (int k = k_max; k >= k_max - 14; --k) {
      const double g = rho * std::pow(10.0, k);
      const double lo = g;
      const double hi = 10.0 * g;
      double sum = 0.0;
      for (const Span& b : bad) {
        const double overlap =
            std::max(0.0, std::min(hi, b.hi) - std::max(lo, b.lo));
        sum += overlap / b.p;
      }
      worst = std::max(worst, sum);
    }
  }
  McReport report;
  McEntry e;
  e.test_id = "bad_overlap_m" + std::to_string(decomp.machine);
  e.estimate = worst;
  e.stderr_ = 0.0;
  e.bound = 1.0;
  e.sigma_k = 0.0;
  e.two_sided = false;
  e.pass = worst <= 1.0 + 1e-9;
  e.trials = 1;
  e.seed = 0;
  report.entries.push_back(std::move(e));
  return report;
}

RectangleSet sliver_rich_rectangles(int variant) {
  RectangleSet rs;
  rs.machine_count = 2;
  auto add = [&rs](int machine, int job, int start, int len, double h) {
    rs.rects.push_back({machine, job, start, len, h});
  };
  if (variant == 0) {
    // 19 jobs, each a height-0.05 rectangle at the origin on machine 0
    // (early start, low height) with the 0.95 remainder late on machine 1.
    rs.job_count = 19;
    for (int j = 0; j < rs.job_count; ++j) {
      add(0, j, 0, 10, 0.05);
      add(1, j, 20 + 2 * j, 2, 0.95);
    }
  } else {
    // Mixed scales: short and long early rectangles with heights 0.08 and
    // 0.04, so populated intervals span several grid indices.
    rs.job_count = 16;
    for (int j = 0; j < 8; ++j) {
      add(0, j, 0, 10, 0.08);
      add(1, j, 40 + 2 * j, 2, 0.92);
    }
    for (int j = 8; j < 16; ++j) {
      add(0, j, j - 8, 100, 0.04);
      add(1, j, 60 + 2 * j, 2, 0.96);
    }
  }
  rs.height_ij.assign(rs.machine_count,
                      std::vector<double>(rs.job_count, 0.0));
  for (const Rect& r : rs.rects) rs.height_ij[r.machine][r.job] += r.height;
  return rs;
}

McReport decomposition_check(const RectangleSet& rects,
                             const ConfigDecomposition& decomp, double eps) {
  McReport report;
  const std::string mach = "m" + std::to_string(decomp.machine);
  const int nrects =
      static_cast<int>(rects.rects_on_machine(decomp.machine).size());

  double total_z = 0.0;
  int overlap_violations = 0;
  std::map<int, double> recon;  // rect id -> reconstructed height
  for (const Config& f : decomp.configs) {
    total_z += f.z;
    std::vector<std::pair<int, int>> spans;
    for (int id : f.rect_ids) {
      const Rect& r = rects.rects[id];
      spans.push_back({r.start, r.start + r.len});
      recon[id] += f.z;
    }
    std::sort(spans.begin(), spans.end());
    for (size_t i = 1; i < spans.size(); ++i)
      if (spans[i].first < spans[i - 1].second) ++overlap_violations;
  }
  report.add_one_sided("decomp_total_weight_" + mach, total_z, 0.0,
                       1.0 + 1e-6, 1, 0, 0.0);
  report.add_one_sided("decomp_overlaps_" + mach,
                       static_cast<double>(overlap_violations), 0.0, 0.0, 1,
                       0, 0.0);
  double worst = 0.0;
  for (int id : rects.rects_on_machine(decomp.machine)) {
    const double r = recon.count(id) ? recon[id] : 0.0;
    worst = std::max(worst, std::fabs(r - rects.rects[id].height));
  }
  report.add_one_sided("decomp_reconstruction_" + mach, worst, 0.0,
                       eps * std::max(1, nrects), 1, 0, 0.0);
  return report;
}

MeanStderr mc_estimate(const std::function<bool(Rng&)>& indicator,
                       int64_t trials, uint64_t seed) {
  const Rng root(seed);
  std::vector<char> hits(trials, 0);
  parallel_for_trials(trials, [&](int64_t t) {
    Rng r = root.split(kTrialTag, t);
    hits[t] = indicator(r) ? 1 : 0;
  });
  int64_t c = 0;
  for (char h : hits) c += h;
  MeanStderr out;
  out.mean = static_cast<double>(c) / trials;
  out.stderr_ = binom_stderr(out.mean, trials);
  return out;
}

}  // namespace fairround
