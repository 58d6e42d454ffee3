#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairround/contention.hpp"
#include "fairround/instance.hpp"
#include "fairround/oracle.hpp"
#include "fairround/sched_round.hpp"
#include "fairround/stats.hpp"
#include "fairround/timeidx_lp.hpp"

namespace fs = std::filesystem;
using namespace fairround;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int64_t kVerifyTrialsFloor = 10000;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string digest_hex(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_header(uint64_t seed, int64_t trials) {
  std::ostringstream ss;
  ss << "# seed=" << seed << " trials=" << trials << " version=" << kVersion
     << "\n";
  return ss.str();
}

struct SolveRow {
  std::string instance_id;
  double lp_obj = 0.0;
  double alg_mean = 0.0;
  double alg_ci95 = 0.0;
  double baseline_mean = 0.0;
  double baseline_ci95 = 0.0;
  int64_t trials = 0;
};

std::string ratio_csv(const std::vector<SolveRow>& rows, uint64_t seed,
                      int64_t trials) {
  std::ostringstream ss;
  ss.precision(10);
  ss << csv_header(seed, trials)
     << "instance_id,lp_obj,alg_mean,alg_ci95,baseline_mean,baseline_ci95,"
        "trials\n";
  for (const SolveRow& r : rows)
    ss << r.instance_id << ',' << r.lp_obj << ',' << r.alg_mean << ','
       << r.alg_ci95 << ',' << r.baseline_mean << ',' << r.baseline_ci95
       << ',' << r.trials << '\n';
  return ss.str();
}

struct SolveStats {
  SolveRow row;
  Schedule best;
  int max_iters = 0;
};

SolveStats run_solve(const std::string& instance_id, const SolveContext& ctx,
                     uint64_t seed, int64_t trials, bool baseline) {
  const Rng root(seed);
  std::vector<double> alg(trials), base(baseline ? trials : 0);
  std::vector<int> iters(trials);
  parallel_for_trials(trials, [&](int64_t t) {
    RoundResult rr = round_once(ctx, root.split(0x736f6c76, t));
    alg[t] = rr.sched.objective;
    iters[t] = rr.iterations;
    if (baseline)
      base[t] = independent_round_once(ctx, root.split(0x62617365, t))
                    .objective;
  });

  SolveStats out;
  MeanStderr am = mean_stderr(alg);
  out.row.instance_id = instance_id;
  out.row.lp_obj = ctx.sol.objective;
  out.row.alg_mean = am.mean;
  out.row.alg_ci95 = 1.96 * am.stderr_;
  out.row.trials = trials;
  if (baseline) {
    MeanStderr bm = mean_stderr(base);
    out.row.baseline_mean = bm.mean;
    out.row.baseline_ci95 = 1.96 * bm.stderr_;
  }
  const int64_t best_t = static_cast<int64_t>(
      std::min_element(alg.begin(), alg.end()) - alg.begin());
  out.best = round_once(ctx, root.split(0x736f6c76, best_t)).sched;
  out.max_iters = *std::max_element(iters.begin(), iters.end());
  return out;
}

// Canonical synthetic configurations for the rounding certification.
struct SyntheticCase {
  std::string name;
  FracAssignment frac;
  Grouping groups;
};

std::vector<SyntheticCase> synthetic_suite(const std::string& name) {
  std::vector<SyntheticCase> cases;
  if (name == "pairs" || name == "all") {
    // Grouped pair with x = x' = 0.09 on machine 0; remaining mass lives
    // on private machines, so the pair's interaction is isolated.
    SyntheticCase c;
    c.name = "pairs";
    c.frac = FracAssignment::zeros(3, 2);
    c.frac.x[0][0] = 0.09;
    c.frac.x[0][1] = 0.09;
    c.frac.x[1][0] = 0.91;
    c.frac.x[2][1] = 0.91;
    c.groups = Grouping::singletons(3);
    c.groups.groups[0].push_back({0, 1});
    cases.push_back(std::move(c));
  }
  if (name == "random" || name == "all") {
    Rng rng(0x73796e74);
    for (int rep = 0; rep < 3; ++rep) {
      SyntheticCase c;
      c.name = "random" + std::to_string(rep);
      const int m = 2 + static_cast<int>(rng.below(3));
      const int n = 3 + static_cast<int>(rng.below(5));
      c.frac = FracAssignment::zeros(m, n);
      for (int j = 0; j < n; ++j) {
        std::vector<double> raw(m);
        double sum = 0.0;
        for (int i = 0; i < m; ++i) sum += raw[i] = rng.uniform_oc();
        for (int i = 0; i < m; ++i) c.frac.x[i][j] = raw[i] / sum;
      }
      c.groups = Grouping::singletons(m);
      // One legal group per machine when small heights allow it.
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
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

int cmd_gen(const GenParams& params, uint64_t seed,
            const std::string& out_path) {
  if (params.p_min > params.p_max || params.w_min > params.w_max ||
      params.p_min < 1 || params.machine_count < 1 || params.job_count < 1 ||
      params.absent_prob < 0.0 || params.absent_prob >= 1.0) {
    std::cerr << "error: invalid generator flags\n";
    return kExitUsage;
  }
  Instance inst = generate_random(params, seed);
  const std::string text = serialize_instance(inst);
  write_file(out_path, text);
  std::cout << out_path << " sha=" << digest_hex(text) << " seed=" << seed
            << " version=" << kVersion << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& instance_path, uint64_t seed,
              int64_t trials, int horizon, bool baseline,
              const std::string& out_path) {
  Instance inst;
  try {
    inst = parse_instance(read_file(instance_path));
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  SolveContext ctx;
  try {
    ctx = prepare(inst, horizon);
  } catch (const LpError& ex) {
    std::cerr << "solver error: " << ex.what() << "\n";
    return kExitSolver;
  }
  const std::string id = fs::path(instance_path).stem().string();
  SolveStats st = run_solve(id, ctx, seed, trials, baseline);

  std::cout.precision(10);
  std::cout << "lp_objective " << ctx.sol.objective << "\n";
  std::cout << "alg_mean " << st.row.alg_mean << " ci95 " << st.row.alg_ci95
            << " ratio " << st.row.alg_mean / ctx.sol.objective << "\n";
  if (baseline)
    std::cout << "baseline_mean " << st.row.baseline_mean << " ci95 "
              << st.row.baseline_ci95 << " ratio "
              << st.row.baseline_mean / ctx.sol.objective << "\n";
  std::cout << "seed " << seed << " trials " << trials << " version "
            << kVersion << "\n";

  const std::string csv = ratio_csv({st.row}, seed, trials);
  if (!out_path.empty()) {
    write_file(out_path, csv);
    write_file(out_path + ".schedule.json", serialize_schedule(st.best));
  } else {
    std::cout << csv;
  }
  return kExitOk;
}

int cmd_verify(const std::string& instance_path, const std::string& synthetic,
               uint64_t seed, int64_t trials, bool tamper,
               const std::string& out_path) {
  if (trials < kVerifyTrialsFloor) {
    std::cerr << "error: trials below statistical floor ("
              << kVerifyTrialsFloor << ")\n";
    return kExitUsage;
  }
  McReport report;
  try {
    if (!synthetic.empty()) {
      for (const SyntheticCase& c : synthetic_suite(synthetic)) {
        McReport r = verify_rounding_properties(c.frac, c.groups, trials,
                                                seed, tamper);
        for (McEntry& e : r.entries) {
          e.test_id = c.name + "." + e.test_id;
          report.entries.push_back(std::move(e));
        }
      }
      if (synthetic == "badrich" || synthetic == "all") {
        for (int variant = 0; variant < 2; ++variant) {
          McReport r = tail_bound_check(sliver_rich_rectangles(variant),
                                        trials, seed);
          for (McEntry& e : r.entries) {
            e.test_id = "badrich" + std::to_string(variant) + "." +
                        e.test_id;
            report.entries.push_back(std::move(e));
          }
        }
      }
      if (report.entries.empty()) {
        std::cerr << "error: unknown synthetic suite '" << synthetic
                  << "' (use pairs, random, badrich or all)\n";
        return kExitUsage;
      }
    } else {
      Instance inst = parse_instance(read_file(instance_path));
      SolveContext ctx = prepare(inst);

      FracAssignment frac;
      frac.machine_count = ctx.rects.machine_count;
      frac.job_count = ctx.rects.job_count;
      frac.x = ctx.rects.height_ij;
      McReport r = verify_rounding_properties(
          frac, Grouping::singletons(frac.machine_count), trials, seed,
          tamper);
      for (McEntry& e : r.entries) report.entries.push_back(std::move(e));

      r = tail_bound_check(ctx.rects, trials, seed);
      for (McEntry& e : r.entries) report.entries.push_back(std::move(e));

      Rng rho_rng = Rng(seed).split(0x76726879);
      for (int i = 0; i < inst.machine_count; ++i) {
        ConfigDecomposition decomp = config_decompose(ctx.rects, i);
        McReport d = decomposition_check(ctx.rects, decomp);
        for (McEntry& e : d.entries) report.entries.push_back(std::move(e));
        double worst = 0.0;
        for (int draw = 0; draw < 100; ++draw) {
          McReport b =
              bad_overlap_check(ctx.rects, decomp, sample_rho(rho_rng));
          worst = std::max(worst, b.entries[0].estimate);
        }
        McEntry e;
        e.test_id = "bad_overlap_m" + std::to_string(i);
        e.estimate = worst;
        e.bound = 1.0;
        e.pass = worst <= 1.0 + 1e-9;
        e.sigma_k = 0.0;
        e.trials = 100;
        e.seed = seed;
        report.entries.push_back(std::move(e));
      }
    }

    // Grid-start law: E[g] <= 0.55 theta and g > 0.1 theta for all draws.
    for (double theta : {0.3, 1.0, 7.0, 42.0}) {
      Rng rng = Rng(seed).split(0x67726964, static_cast<uint64_t>(theta * 10));
      std::vector<double> gs(trials);
      double min_g = theta;
      for (int64_t t = 0; t < trials; ++t) {
        gs[t] = grid_interval(theta, sample_rho(rng)).g;
        min_g = std::min(min_g, gs[t]);
      }
      MeanStderr ms = mean_stderr(gs);
      std::ostringstream id;
      id << "grid_mean_theta" << theta;
      report.add_one_sided(id.str(), ms.mean, ms.stderr_, 0.55 * theta,
                           trials, seed);
      McEntry e;
      e.test_id = "grid_min_theta" + std::to_string(theta);
      e.estimate = min_g;
      e.bound = 0.1 * theta;
      e.pass = min_g > 0.1 * theta;
      e.sigma_k = 0.0;
      e.trials = trials;
      e.seed = seed;
      report.entries.push_back(std::move(e));
    }
  } catch (const LpError& ex) {
    std::cerr << "solver error: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  const std::string csv = csv_header(seed, trials) + mc_report_csv(report);
  if (!out_path.empty())
    write_file(out_path, csv);
  else
    std::cout << csv;
  int failed = 0;
  for (const McEntry& e : report.entries) failed += !e.pass;
  std::cerr << report.entries.size() << " checks, " << failed << " failed\n";
  return failed == 0 ? kExitOk : kExitStatFail;
}

int cmd_bench(const std::string& dir, uint64_t seed, int64_t trials,
              bool baseline, const std::string& out_path) {
  std::vector<fs::path> files;
  try {
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  std::sort(files.begin(), files.end());

  std::vector<SolveRow> rows;
  double max_ratio = 0.0, sum_ratio = 0.0;
  for (const fs::path& f : files) {
    Instance inst;
    SolveContext ctx;
    try {
      inst = parse_instance(read_file(f.string()));
      ctx = prepare(inst);
    } catch (const std::exception& ex) {
      std::cerr << "skipping " << f.string() << ": " << ex.what() << "\n";
      continue;
    }
    SolveStats st = run_solve(f.stem().string(), ctx, seed, trials, baseline);
    const double ratio = st.row.alg_mean / st.row.lp_obj;
    max_ratio = std::max(max_ratio, ratio);
    sum_ratio += ratio;
    rows.push_back(std::move(st.row));
  }
  if (!rows.empty()) {
    SolveRow agg;
    agg.instance_id = "aggregate";
    agg.lp_obj = 1.0;
    agg.alg_mean = max_ratio;                // max empirical ratio
    agg.baseline_mean = sum_ratio / rows.size();  // mean empirical ratio
    agg.trials = trials;
    rows.push_back(agg);
  }
  const std::string csv = ratio_csv(rows, seed, trials);
  if (!out_path.empty())
    write_file(out_path, csv);
  else
    std::cout << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1.488-approximation for R||sum w_j C_j: time-indexed LP plus"
               " iterative fair contention resolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("fairround ") + kVersion);

  uint64_t seed = 1;
  int64_t trials = 0;
  int horizon = 0;
  bool baseline = false;
  bool tamper = false;
  std::string out_path, instance_path, synthetic, dir;
  GenParams gp;

  CLI::App* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--machines", gp.machine_count, "machine count");
  gen->add_option("--jobs", gp.job_count, "job count");
  gen->add_option("--pmin", gp.p_min, "minimum processing time");
  gen->add_option("--pmax", gp.p_max, "maximum processing time");
  gen->add_option("--wmin", gp.w_min, "minimum weight");
  gen->add_option("--wmax", gp.w_max, "maximum weight");
  gen->add_option("--absent", gp.absent_prob, "ineligibility probability");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--out", out_path, "output path")->required();

  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("instance", instance_path, "instance file")->required();
  solve->add_option("--seed", seed, "random seed");
  solve->add_option("--trials", trials, "Monte Carlo trials");
  solve->add_option("--horizon", horizon, "scheduling horizon override");
  solve->add_flag("--baseline", baseline, "also run the independent"
                                          " rounding baseline");
  solve->add_option("--out", out_path, "CSV output path");

  CLI::App* verify = app.add_subcommand(
      "verify", "certify the rounding guarantees statistically");
  verify->add_option("instance", instance_path, "instance file");
  verify->add_option("--synthetic", synthetic,
                     "synthetic suite: pairs, random, badrich or all");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--trials", trials, "Monte Carlo trials");
  verify
      ->add_flag("--tamper-independent", tamper,
                 "draw group recommendations independently (harness"
                 " power check; strong-correlation rows must fail)")
      ->group("");  // hidden
  verify->add_option("--out", out_path, "CSV output path");

  CLI::App* bench = app.add_subcommand("bench", "ratio report over a"
                                                " directory of instances");
  bench->add_option("dir", dir, "instance directory")->required();
  bench->add_option("--seed", seed, "random seed");
  bench->add_option("--trials", trials, "Monte Carlo trials");
  bench->add_flag("--baseline", baseline, "also run the baseline");
  bench->add_option("--out", out_path, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(gp, seed, out_path);
    if (solve->parsed())
      return cmd_solve(instance_path, seed, trials > 0 ? trials : 2000,
                       horizon, baseline, out_path);
    if (verify->parsed()) {
      if (instance_path.empty() == synthetic.empty()) {
        std::cerr << "error: give exactly one of <instance> or"
                     " --synthetic\n";
        return kExitUsage;
      }
      return cmd_verify(instance_path, synthetic, seed,
                        trials > 0 ? trials : 200000, tamper, out_path);
    }
    if (bench->parsed())
      return cmd_bench(dir, seed, trials > 0 ? trials : 2000, baseline,
                       out_path);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
