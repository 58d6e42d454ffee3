#include "fairround/sched_round.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

namespace fairround {

namespace {

constexpr double kHeavyHeight = 0.09;  // 9/100
constexpr double kShiftFactor = 0.34;

constexpr uint64_t kRepTag = 0x72657073;
constexpr uint64_t kRhoTag = 0x72686f;
constexpr uint64_t kAssocTag = 0x636f696e;
constexpr uint64_t kResolveTag = 0x7265736f;
constexpr uint64_t kBaseTag = 0x62617365;

}  // namespace

double shift_amount(int s, int p, double x_ij) {
  if (x_ij >= kHeavyHeight) return kShiftFactor * (s + x_ij * p);
  return kShiftFactor * s;
}

bool classify_good(int s, int p, double x_ij) {
  return 10 * s >= p || x_ij >= kHeavyHeight;
}

double sample_rho(Rng& rng) {
  double u;
  do {
    u = rng.uniform();
  } while (u == 0.0);
  return 0.1 + 0.9 * u;  // open on both ends
}

GridCell grid_interval(double theta, double rho) {
  GridCell cell;
  cell.k = static_cast<int>(std::floor(std::log10(theta / rho)));
  cell.g = rho * std::pow(10.0, cell.k);
  while (cell.g >= theta) {
    --cell.k;
    cell.g /= 10.0;
  }
  while (theta > cell.g * 10.0) {
    ++cell.k;
    cell.g *= 10.0;
  }
  return cell;
}

RepSet choose_representatives(const RectangleSet& rects, const Rng& stream) {
  RepSet out;
  out.machine_count = rects.machine_count;
  out.job_count = rects.job_count;
  out.index.assign(rects.machine_count,
                   std::vector<int>(rects.job_count, -1));

  // Rectangles of one (machine, job) pair, in file order.
  std::vector<std::vector<int>> by_pair(rects.machine_count *
                                        rects.job_count);
  for (int r = 0; r < static_cast<int>(rects.rects.size()); ++r) {
    const Rect& rect = rects.rects[r];
    by_pair[rect.machine * rects.job_count + rect.job].push_back(r);
  }

  for (int i = 0; i < rects.machine_count; ++i) {
    for (int j = 0; j < rects.job_count; ++j) {
      const std::vector<int>& ids = by_pair[i * rects.job_count + j];
      if (ids.empty()) continue;
      const double total = rects.height_ij[i][j];
      Rng r = stream.split(kRepTag, i, j);

      double u = r.uniform() * total;
      int chosen = ids.back();
      for (int id : ids) {
        u -= rects.rects[id].height;
        if (u < 0.0) {
          chosen = id;
          break;
        }
      }
      const Rect& rect = rects.rects[chosen];

      Representative rep;
      rep.machine = i;
      rep.job = j;
      rep.start = rect.start;
      rep.len = rect.len;
      rep.x_ij = total;
      rep.tau = r.uniform_oc() * rect.len;
      rep.shifted = rect.start + shift_amount(rect.start, rect.len, total);
      rep.theta = rep.shifted + rep.tau;
      rep.good = classify_good(rect.start, rect.len, total);

      out.index[i][j] = static_cast<int>(out.reps.size());
      out.reps.push_back(rep);
    }
  }
  return out;
}

GridContext associate(const RepSet& reps, double rho, const Rng& stream) {
  GridContext grid;
  grid.rho = rho;
  const int nr = static_cast<int>(reps.reps.size());
  grid.associated.assign(nr, 0);
  grid.interval_k.assign(nr, 0);
  for (int r = 0; r < nr; ++r) {
    const Representative& rep = reps.reps[r];
    if (rep.good) continue;
    Rng coin = stream.split(kAssocTag, rep.machine, rep.job);
    if (!coin.coin(0.5)) continue;
    grid.associated[r] = 1;
    grid.interval_k[r] = grid_interval(rep.theta, rho).k;
  }
  return grid;
}

Grouping build_groups(const RepSet& reps, const GridContext& grid) {
  Grouping groups = Grouping::singletons(reps.machine_count);
  // Candidate members per (machine, interval).
  std::map<std::pair<int, int>, std::vector<int>> cells;
  for (int r = 0; r < static_cast<int>(reps.reps.size()); ++r) {
    if (!grid.associated[r]) continue;
    const Representative& rep = reps.reps[r];
    cells[{rep.machine, grid.interval_k[r]}].push_back(rep.job);
  }
  for (auto& [key, jobs] : cells) {
    if (jobs.size() < 2) continue;
    double mass = 0.0;
    for (int j : jobs) mass += reps.reps[reps.index[key.first][j]].x_ij;
    if (mass <= 1.0) groups.groups[key.first].push_back(jobs);
    // Overfull candidates revert to singletons: simply not listed.
  }
  return groups;
}

Schedule assemble_schedule(const Assignment& assign, const RepSet& reps,
                           const Instance& inst) {
  Schedule sched;
  sched.machines.assign(inst.machine_count, {});

  std::vector<std::vector<int>> on_machine(inst.machine_count);
  for (int j = 0; j < inst.job_count; ++j)
    on_machine[assign.machine_of[j]].push_back(j);

  for (int i = 0; i < inst.machine_count; ++i) {
    std::vector<int>& jobs = on_machine[i];
    std::sort(jobs.begin(), jobs.end(), [&](int a, int b) {
      const double ta = reps.reps[reps.index[i][a]].theta;
      const double tb = reps.reps[reps.index[i][b]].theta;
      if (ta != tb) return ta < tb;
      return a < b;
    });
    int t = 0;
    for (int j : jobs) {
      const int p = inst.proc_time(i, j);
      sched.machines[i].push_back({j, t, t + p});
      sched.objective += inst.weight[j] * (t + p);
      t += p;
    }
  }
  return sched;
}

SolveContext prepare(const Instance& inst, int horizon) {
  SolveContext ctx;
  ctx.inst = inst;
  if (horizon <= 0) horizon = default_horizon(inst);
  LpProblem prob = build_lp(inst, horizon);
  ctx.sol = solve_lp(prob);
  if (ctx.sol.status != LpSolution::Status::kOptimal)
    throw LpError("time-indexed relaxation is infeasible");
  ctx.rects = extract_rectangles(ctx.sol);
  return ctx;
}

RoundResult round_once(const SolveContext& ctx, const Rng& stream) {
  RepSet reps = choose_representatives(ctx.rects, stream);
  Rng rho_rng = stream.split(kRhoTag);
  const double rho = sample_rho(rho_rng);
  GridContext grid = associate(reps, rho, stream);
  Grouping groups = build_groups(reps, grid);

  FracAssignment frac;
  frac.machine_count = ctx.rects.machine_count;
  frac.job_count = ctx.rects.job_count;
  frac.x = ctx.rects.height_ij;

  Assignment assign = resolve(frac, groups, stream.split(kResolveTag));

  RoundResult out;
  out.sched = assemble_schedule(assign, reps, ctx.inst);
  out.iterations = assign.iterations;
  return out;
}

Schedule independent_round_once(const SolveContext& ctx, const Rng& stream) {
  const Instance& inst = ctx.inst;
  const LpSolution& sol = ctx.sol;

  struct Placed {
    int job;
    double theta;
  };
  std::vector<std::vector<Placed>> on_machine(inst.machine_count);

  // Columns of one job, in file order.
  std::vector<std::vector<int>> by_job(inst.job_count);
  for (int c = 0; c < static_cast<int>(sol.x.size()); ++c)
    if (sol.x[c] > 0.0) by_job[sol.vars[c].job].push_back(c);

  for (int j = 0; j < inst.job_count; ++j) {
    Rng r = stream.split(kBaseTag, j);
    double u = r.uniform();
    int chosen = by_job[j].back();
    for (int c : by_job[j]) {
      u -= sol.x[c];
      if (u < 0.0) {
        chosen = c;
        break;
      }
    }
    const LpVar& v = sol.vars[chosen];
    const double tau = r.uniform_oc() * sol.len[chosen];
    on_machine[v.machine].push_back({j, v.start + tau});
  }

  Schedule sched;
  sched.machines.assign(inst.machine_count, {});
  for (int i = 0; i < inst.machine_count; ++i) {
    std::sort(on_machine[i].begin(), on_machine[i].end(),
              [](const Placed& a, const Placed& b) {
                if (a.theta != b.theta) return a.theta < b.theta;
                return a.job < b.job;
              });
    int t = 0;
    for (const Placed& pl : on_machine[i]) {
      const int p = inst.proc_time(i, pl.job);
      sched.machines[i].push_back({pl.job, t, t + p});
      sched.objective += inst.weight[pl.job] * (t + p);
      t += p;
    }
  }
  return sched;
}

Schedule approx_solve(const Instance& inst, const Rng& stream) {
  SolveContext ctx = prepare(inst);
  return round_once(ctx, stream).sched;
}

double schedule_objective(const Schedule& sched, const Instance& inst) {
  double obj = 0.0;
  for (const auto& machine : sched.machines)
    for (const SchedEntry& e : machine) obj += inst.weight[e.job] * e.end;
  return obj;
}

std::string serialize_schedule(const Schedule& sched) {
  using nlohmann::json;
  json machines = json::array();
  for (const auto& machine : sched.machines) {
    json list = json::array();
    for (const SchedEntry& e : machine)
      list.push_back(
          {{"job", e.job + 1}, {"start", e.start}, {"end", e.end}});
    machines.push_back(std::move(list));
  }
  json doc = {{"objective", sched.objective},
              {"machines", std::move(machines)}};
  return doc.dump(2) + "\n";
}

}  // namespace fairround
