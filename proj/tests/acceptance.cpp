// Acceptance harness: twelve statistical and exact checks of the rounding
// guarantees, one pass/fail line each. Exit code 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>
#include <vector>

#include "fairround/contention.hpp"
#include "fairround/instance.hpp"
#include "fairround/oracle.hpp"
#include "fairround/sched_round.hpp"
#include "fairround/stats.hpp"
#include "fairround/timeidx_lp.hpp"

using namespace fairround;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("%s %2d %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

// Iteration counts pooled across every resolve in the harness, keyed by
// job count, for the termination criterion.
std::map<int, std::vector<int>> g_iters;

struct RandomConfig {
  FracAssignment frac;
  Grouping groups;
};

RandomConfig make_config(int m, int n, uint64_t seed) {
  RandomConfig c;
  Rng rng(seed);
  c.frac = FracAssignment::zeros(m, n);
  for (int j = 0; j < n; ++j) {
    double sum = 0.0;
    std::vector<double> raw(m);
    for (int i = 0; i < m; ++i) sum += raw[i] = rng.uniform_oc();
    for (int i = 0; i < m; ++i) c.frac.x[i][j] = raw[i] / sum;
  }
  c.groups = Grouping::singletons(m);
  for (int i = 0; i < m; ++i) {
    std::vector<int> g;
    double mass = 0.0;
    for (int j = 0; j < n; ++j) {
      if (c.frac.x[i][j] < 0.3 && mass + c.frac.x[i][j] <= 1.0) {
        g.push_back(j);
        mass += c.frac.x[i][j];
      }
    }
    if (g.size() >= 2) c.groups.groups[i].push_back(g);
  }
  return c;
}

struct ResolveBatch {
  std::vector<std::vector<int>> machine_of;  // [trial][job]
  std::vector<std::vector<int>> round_of;
};

ResolveBatch run_batch(const RandomConfig& c, int64_t trials,
                       uint64_t seed) {
  ResolveBatch b;
  b.machine_of.resize(trials);
  b.round_of.resize(trials);
  std::vector<int> iters(trials);
  const Rng root(seed);
  parallel_for_trials(trials, [&](int64_t t) {
    Assignment a = resolve(c.frac, c.groups, root.split(0xacce97, t));
    b.machine_of[t] = std::move(a.machine_of);
    b.round_of[t] = std::move(a.round_of);
    iters[t] = a.iterations;
  });
  auto& pool = g_iters[c.frac.job_count];
  pool.insert(pool.end(), iters.begin(), iters.end());
  return b;
}

// ---- criteria 1, 2, 4 over ten random configurations -------------------

void criteria_contention() {
  const int64_t trials = 200000;
  const int shapes[10][2] = {{2, 3}, {2, 5}, {2, 8}, {3, 4}, {3, 6},
                             {3, 8}, {4, 4}, {4, 6}, {4, 7}, {4, 8}};
  int marginal_violations = 0, decay_violations = 0, pair_violations = 0;
  int marginal_tests = 0, pair_tests = 0;
  const double t0 = now_seconds();

  for (int cfg = 0; cfg < 10; ++cfg) {
    const int m = shapes[cfg][0], n = shapes[cfg][1];
    RandomConfig c = make_config(m, n, 1000 + cfg);
    ResolveBatch b = run_batch(c, trials, 2000 + cfg);

    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = c.frac.x[i][j];
        if (x <= 0.0) continue;
        int64_t hits = 0;
        for (int64_t t = 0; t < trials; ++t)
          hits += b.machine_of[t][j] == i;
        const double est = static_cast<double>(hits) / trials;
        ++marginal_tests;
        if (std::fabs(est - x) > 4 * binom_stderr(x, trials))
          ++marginal_violations;
      }
    }

    // Iteration decay, per-trial fractions against 1 - 1/e and e^{-l}.
    std::vector<double> sample(trials);
    for (int64_t t = 0; t < trials; ++t) {
      int k = 0;
      for (int j = 0; j < n; ++j) k += b.round_of[t][j] == 1;
      sample[t] = static_cast<double>(k) / n;
    }
    MeanStderr ms = mean_stderr(sample);
    if (std::fabs(ms.mean - (1.0 - std::exp(-1.0))) > 4 * ms.stderr_)
      ++decay_violations;
    for (int l = 1; l <= 3; ++l) {
      for (int64_t t = 0; t < trials; ++t) {
        int k = 0;
        for (int j = 0; j < n; ++j) k += b.round_of[t][j] > l;
        sample[t] = static_cast<double>(k) / n;
      }
      ms = mean_stderr(sample);
      if (std::fabs(ms.mean - std::exp(-l)) > 4 * ms.stderr_)
        ++decay_violations;
    }

    // Ungrouped pairs: product bound, one-sided.
    for (int i = 0; i < m; ++i) {
      std::vector<std::vector<char>> together(n, std::vector<char>(n, 0));
      for (const std::vector<int>& g : c.groups.groups[i])
        for (int a : g)
          for (int bb : g)
            if (a != bb) together[a][bb] = 1;
      for (int a = 0; a < n; ++a) {
        for (int b2 = a + 1; b2 < n; ++b2) {
          if (together[a][b2]) continue;
          const double xa = c.frac.x[i][a], xb = c.frac.x[i][b2];
          if (xa <= 0.0 || xb <= 0.0) continue;
          int64_t hits = 0;
          for (int64_t t = 0; t < trials; ++t)
            hits += b.machine_of[t][a] == i && b.machine_of[t][b2] == i;
          const double est = static_cast<double>(hits) / trials;
          ++pair_tests;
          if (est > xa * xb + 4 * binom_stderr(est, trials))
            ++pair_violations;
        }
      }
    }
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "marginal preservation: %d/%d marginals within 4 sigma "
                "(%.0fs)",
                marginal_tests - marginal_violations, marginal_tests,
                now_seconds() - t0);
  report(1, marginal_violations == 0, buf);
  std::snprintf(buf, sizeof(buf),
                "iteration decay: assigned-in-round-1 and e^-l tails "
                "within 4 sigma on 10 configurations");
  report(2, decay_violations == 0, buf);
  std::snprintf(buf, sizeof(buf),
                "negative correlation: %d/%d ungrouped pairs below the "
                "product bound",
                pair_tests - pair_violations, pair_tests);
  report(4, pair_violations == 0, buf);
}

// ---- criterion 3: strong negative correlation --------------------------

void criterion_strong_correlation() {
  RandomConfig c;
  c.frac = FracAssignment::zeros(3, 2);
  c.frac.x[0][0] = 0.09;
  c.frac.x[0][1] = 0.09;
  c.frac.x[1][0] = 0.91;
  c.frac.x[2][1] = 0.91;
  c.groups = Grouping::singletons(3);
  c.groups.groups[0].push_back({0, 1});

  const int64_t trials = 1000000;
  ResolveBatch b = run_batch(c, trials, 3100);
  int64_t both = 0;
  for (int64_t t = 0; t < trials; ++t)
    both += b.machine_of[t][0] == 0 && b.machine_of[t][1] == 0;
  const double est = static_cast<double>(both) / trials;
  const double se = binom_stderr(est, trials);
  const double eta = 2.0 * std::exp(0.09) / (std::exp(1.0) + 1.0);
  const double product = 0.09 * 0.09;
  const bool under_strong = est <= eta * product + 4 * se;
  const bool below_product = est < product - 4 * se;

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "strong negative correlation: P[both]=%.6f vs bound "
                "%.6f (eta=%.4f < 0.589) and below product %.6f - 4se",
                est, eta * product, eta, product);
  report(3, under_strong && below_product && eta < 0.589, buf);
}

// ---- criterion 5: distribution laws ------------------------------------

double chi_square_against_pois(const std::vector<int64_t>& counts,
                               double lambda, int64_t n) {
  const int bins = static_cast<int>(counts.size());
  std::vector<double> observed(bins), expected(bins);
  double tail = 1.0;
  for (int k = 0; k < bins - 1; ++k) {
    observed[k] = static_cast<double>(counts[k]);
    expected[k] = static_cast<double>(n) * pois_pmf(lambda, k);
    tail -= pois_pmf(lambda, k);
  }
  observed[bins - 1] = static_cast<double>(counts[bins - 1]);
  expected[bins - 1] = static_cast<double>(n) * tail;
  return chi_square_p(observed, expected);
}

void criterion_distribution_laws() {
  const int64_t n = 1000000;
  Rng rng(5100);

  std::vector<int64_t> pois_counts(8, 0);
  for (int64_t i = 0; i < n; ++i)
    ++pois_counts[std::min(sample_pois(1.0, rng), 7)];
  const double p_pois = chi_square_against_pois(pois_counts, 1.0, n);

  std::vector<int64_t> tilde_counts(8, 0);
  for (int64_t i = 0; i < n; ++i)
    ++tilde_counts[std::min(sample_tilde_pois(1.0, rng), 7)];
  std::vector<double> observed(8), expected(8);
  double tail = 1.0;
  for (int k = 0; k < 7; ++k) {
    observed[k] = static_cast<double>(tilde_counts[k]);
    expected[k] = n * tilde_pois_pmf(1.0, k);
    tail -= tilde_pois_pmf(1.0, k);
  }
  observed[7] = static_cast<double>(tilde_counts[7]);
  expected[7] = n * tail;
  const double p_tilde = chi_square_p(observed, expected);

  // Composition: a Bernoulli(lambda) flag times a tilde draw is Poisson.
  const double lambda = 0.6;
  std::vector<int64_t> comp_counts(8, 0);
  for (int64_t i = 0; i < n; ++i) {
    const int nt = sample_tilde_pois(lambda, rng);
    ++comp_counts[std::min(rng.coin(lambda) ? nt : 0, 7)];
  }
  const double p_comp = chi_square_against_pois(comp_counts, lambda, n);

  // Ticket additivity: real tickets over machines total Pois(1).
  FracAssignment f = FracAssignment::zeros(3, 1);
  f.x[0][0] = 0.2;
  f.x[1][0] = 0.5;
  f.x[2][0] = 0.3;
  Grouping g = Grouping::singletons(3);
  IterationOptions opts;
  opts.keep_diagnostics = true;
  const std::vector<char> active(1, 1);
  const Rng root(5200);
  std::vector<int64_t> ticket_counts(8, 0);
  for (int64_t t = 0; t < n; ++t) {
    IterationOutcome out =
        run_round_iteration(f, g, active, root.split(t), opts);
    int total = 0;
    for (int i = 0; i < 3; ++i) total += out.real_tickets[i][0];
    ++ticket_counts[std::min(total, 7)];
  }
  const double p_ticket = chi_square_against_pois(ticket_counts, 1.0, n);

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "distribution laws: chi-square p-values pois=%.3g "
                "tilde=%.3g composition=%.3g tickets=%.3g all > 0.001",
                p_pois, p_tilde, p_comp, p_ticket);
  report(5,
         p_pois > 0.001 && p_tilde > 0.001 && p_comp > 0.001 &&
             p_ticket > 0.001,
         buf);
}

// ---- criteria 6, 7, 9, 10(capacity) over the 20-instance suite ---------

std::vector<Instance> desk_suite() {
  std::vector<Instance> out;
  for (int m : {2, 3}) {
    for (int n = 4; n <= 8; ++n) {
      for (uint64_t seed : {1ull, 2ull}) {
        GenParams gp;
        gp.machine_count = m;
        gp.job_count = n;
        gp.p_min = 1;
        gp.p_max = 6;
        gp.w_min = 1.0;
        gp.w_max = 5.0;
        gp.absent_prob = 0.15;
        out.push_back(generate_random(gp, 7000 + seed * 100 + n));
      }
    }
  }
  return out;
}

// ---- criterion 8: grid-start bound -------------------------------------

void criterion_grid_start() {
  bool ok = true;
  char detail[128] = "";
  for (double theta : {0.3, 1.0, 7.0, 42.0}) {
    Rng rng(8000 + static_cast<uint64_t>(theta * 10));
    const int64_t n = 1000000;
    std::vector<double> gs(n);
    double min_g = theta;
    for (int64_t t = 0; t < n; ++t) {
      gs[t] = grid_interval(theta, sample_rho(rng)).g;
      min_g = std::min(min_g, gs[t]);
    }
    MeanStderr ms = mean_stderr(gs);
    if (ms.mean > 0.55 * theta + 4 * ms.stderr_) ok = false;
    if (!(min_g > 0.1 * theta)) ok = false;
    if (theta == 7.0)
      std::snprintf(detail, sizeof(detail), " (theta=7: E[g]=%.4f <= 3.85)",
                    ms.mean);
  }
  report(8, ok,
         std::string("grid-start bound: E[g] <= 0.55 theta and "
                     "g > 0.1 theta at four scales") +
             detail);
}

// ---- criterion 10: analysis identities ---------------------------------

void criterion_identities(bool capacity_ok) {
  Rng rng(10000);
  int residual_violations = 0;
  int checked = 0;
  // 40 random distinct pairs plus forced overlap/disjoint cases.
  while (checked < 40) {
    const int p = 2 + static_cast<int>(rng.below(12));
    const int s = static_cast<int>(rng.below(20));
    const int s_star = static_cast<int>(rng.below(20));
    if (s == s_star) continue;
    const double x = rng.uniform_oc();
    if (mutual_delay_residual(s_star, s, p, x) >= 1e-6 * p)
      ++residual_violations;
    ++checked;
  }
  for (auto [s_star, s, p, x] :
       {std::tuple<int, int, int, double>{0, 30, 5, 0.5},   // disjoint
        std::tuple<int, int, int, double>{0, 1, 9, 0.05},   // overlapping
        std::tuple<int, int, int, double>{0, 1, 9, 0.5},
        std::tuple<int, int, int, double>{2, 3, 11, 0.09},
        std::tuple<int, int, int, double>{0, 25, 7, 0.04}}) {
    if (mutual_delay_residual(s_star, s, p, x) >= 1e-6 * p)
      ++residual_violations;
    ++checked;
  }
  int self_violations = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const int p = 2 + static_cast<int>(rng.below(12));
    const int s = static_cast<int>(rng.below(20));
    const double x = rng.uniform_oc();
    if (std::fabs(self_delay_integral(s, p, x) - 0.5 * p) >= 1e-6 * p)
      ++self_violations;
    ++checked;
  }

  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "analysis identities: %d delay integrals within 1e-6 p "
                "and shifted prefix volume <= theta on the suite",
                checked);
  report(10,
         residual_violations == 0 && self_violations == 0 && capacity_ok,
         buf);
}

// ---- criterion 11: tail bound ------------------------------------------

void criterion_tail_bound() {
  bool ok = true;
  int cells = 0;
  for (int variant : {0, 1}) {
    McReport rep = tail_bound_check(sliver_rich_rectangles(variant), 20000,
                                    11000 + variant);
    ok = ok && rep.all_pass() && !rep.entries.empty();
    for (const McEntry& e : rep.entries)
      cells += e.test_id.rfind("tail_", 0) == 0;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "tail bound: P[associated height <= 0.82] >= 0.5317 - "
                "4se on %d populated grid cells",
                cells);
  report(11, ok && cells > 0, buf);
}

// ---- criterion 12: termination -----------------------------------------

void criterion_termination() {
  bool ok = true;
  int64_t total = 0;
  for (auto& [n, iters] : g_iters) {
    const int hard_cap =
        64 + static_cast<int>(std::ceil(8.0 * std::log(std::max(1, n))));
    const int pct_cap =
        static_cast<int>(std::ceil(3.0 * std::log(std::max(1, n)))) + 5;
    std::sort(iters.begin(), iters.end());
    total += static_cast<int64_t>(iters.size());
    if (iters.back() > hard_cap) ok = false;
    const size_t idx = static_cast<size_t>(
        std::ceil(0.999 * iters.size())) - 1;
    if (iters[idx] > pct_cap) ok = false;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "termination: %lld resolves within 64 + ceil(8 ln n) "
                "iterations; 99.9th percentile <= ceil(3 ln n) + 5",
                static_cast<long long>(total));
  report(12, ok, buf);
}

}  // namespace

int main() {
  criteria_contention();
  criterion_strong_correlation();
  criterion_distribution_laws();

  // Suite criteria share the LP solves; the capacity half of criterion 10
  // is computed here and folded into its line.
  const int64_t trials = 10000;
  const double t0 = now_seconds();
  int ratio_violations = 0, lp_violations = 0, decomp_violations = 0;
  int capacity_violations = 0;
  int idx = 0;
  Rng rho_rng(6400);
  Rng theta_rng(6500);
  for (const Instance& inst : desk_suite()) {
    ++idx;
    SolveContext ctx = prepare(inst);
    const double lp = ctx.sol.objective;
    const double opt = brute_force_opt(inst).objective;
    if (lp > opt * (1.0 + 1e-6)) ++lp_violations;

    std::vector<double> alg(trials), base(trials);
    std::vector<int> iters(trials);
    const Rng root(6000 + idx);
    parallel_for_trials(trials, [&](int64_t t) {
      RoundResult rr = round_once(ctx, root.split(0xe2e, t));
      alg[t] = rr.sched.objective;
      iters[t] = rr.iterations;
      base[t] = independent_round_once(ctx, root.split(0xba5e, t)).objective;
    });
    auto& pool = g_iters[inst.job_count];
    pool.insert(pool.end(), iters.begin(), iters.end());

    MeanStderr am = mean_stderr(alg);
    MeanStderr bm = mean_stderr(base);
    if (am.mean > 1.488 * lp + 4 * am.stderr_) ++ratio_violations;
    if (am.mean > 1.488 * opt + 4 * am.stderr_) ++ratio_violations;
    if (bm.mean > 1.5 * lp + 4 * bm.stderr_) ++ratio_violations;

    for (int i = 0; i < inst.machine_count; ++i) {
      ConfigDecomposition d = config_decompose(ctx.rects, i);
      if (!decomposition_check(ctx.rects, d).all_pass())
        ++decomp_violations;
      for (int draw = 0; draw < 100; ++draw)
        if (!bad_overlap_check(ctx.rects, d, sample_rho(rho_rng))
                 .all_pass())
          ++decomp_violations;
      for (int draw = 0; draw < 100; ++draw) {
        const double theta =
            theta_rng.uniform_oc() * 1.5 * default_horizon(inst);
        double volume = 0.0;
        for (int id : ctx.rects.rects_on_machine(i)) {
          const Rect& r = ctx.rects.rects[id];
          volume += r.height *
                    shifted_prefix_length(r.start, r.len,
                                          ctx.rects.height_ij[i][r.job],
                                          theta);
        }
        if (volume > theta + 1e-9) ++capacity_violations;
      }
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "end-to-end ratio: 20 instances x %lld runs, algorithm "
                "<= 1.488 LP and baseline <= 1.5 LP within 4 sigma (%.0fs)",
                static_cast<long long>(trials), now_seconds() - t0);
  report(6, ratio_violations == 0, buf);
  report(7, lp_violations == 0,
         "LP soundness: lp_objective <= exact optimum on all 20 instances");
  criterion_grid_start();
  report(9, decomp_violations == 0,
         "configuration decomposition: weight, disjointness, "
         "reconstruction and bad-overlap checks on all suite solutions");
  criterion_identities(capacity_violations == 0);
  criterion_tail_bound();
  criterion_termination();

  std::printf("%s: %d of 12 criteria failed\n",
              g_failures == 0 ? "OK" : "FAILURE", g_failures);
  return g_failures == 0 ? 0 : 1;
}
