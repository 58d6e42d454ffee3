#include "fairround/timeidx_lp.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fairround/simplex.hpp"

namespace fairround {

int default_horizon(const Instance& inst) {
  int t = 0;
  for (int j = 0; j < inst.job_count; ++j) t += inst.max_proc(j);
  return t;
}

LpProblem build_lp(const Instance& inst, int horizon) {
  for (int j = 0; j < inst.job_count; ++j) {
    if (inst.min_proc(j) > horizon)
      throw LpError("infeasible horizon: job " + std::to_string(j + 1) +
                    " cannot finish by T=" + std::to_string(horizon));
  }
  LpProblem prob;
  prob.inst = inst;
  prob.horizon = horizon;
  for (int i = 0; i < inst.machine_count; ++i) {
    for (int j = 0; j < inst.job_count; ++j) {
      if (!inst.eligible(i, j)) continue;
      const int p = inst.proc_time(i, j);
      for (int s = 0; s + p <= horizon; ++s) {
        prob.vars.push_back({i, j, s});
        prob.cost.push_back(inst.weight[j] * (s + p));
      }
    }
  }
  return prob;
}

LpSolution solve_lp(const LpProblem& prob) {
  const Instance& inst = prob.inst;
  const int nv = prob.num_vars();
  const int T = prob.horizon;

  SimplexProblem sp;
  sp.num_vars = nv;
  sp.cost = prob.cost;

  // Coverage rows, one per job.
  sp.eq_rows.assign(inst.job_count, std::vector<double>(nv, 0.0));
  sp.eq_rhs.assign(inst.job_count, 1.0);
  for (int c = 0; c < nv; ++c) sp.eq_rows[prob.vars[c].job][c] = 1.0;

  // Capacity rows, one per machine and time t in [0, T): columns whose
  // window (s, s + p] seen on the unit grid covers t, i.e. s <= t < s + p.
  sp.le_rows.assign(inst.machine_count * T, std::vector<double>(nv, 0.0));
  sp.le_rhs.assign(inst.machine_count * T, 1.0);
  for (int c = 0; c < nv; ++c) {
    const LpVar& v = prob.vars[c];
    const int p = inst.proc_time(v.machine, v.job);
    for (int t = v.start; t < v.start + p; ++t)
      sp.le_rows[v.machine * T + t][c] = 1.0;
  }

  SimplexResult sr = solve_simplex(sp);
  LpSolution sol;
  sol.vars = prob.vars;
  sol.cost = prob.cost;
  sol.len.reserve(nv);
  for (const LpVar& v : prob.vars)
    sol.len.push_back(inst.proc_time(v.machine, v.job));
  sol.machine_count = inst.machine_count;
  sol.job_count = inst.job_count;
  if (sr.status != SimplexResult::Status::kOptimal) {
    sol.status = LpSolution::Status::kInfeasible;
    return sol;
  }
  sol.status = LpSolution::Status::kOptimal;
  sol.x = std::move(sr.x);

  // Cleanup: clamp tiny values and renormalize each job's total to 1.
  for (double& v : sol.x)
    if (std::fabs(v) < 1e-12) v = 0.0;
  std::vector<double> job_sum(inst.job_count, 0.0);
  for (int c = 0; c < nv; ++c) job_sum[prob.vars[c].job] += sol.x[c];
  for (int c = 0; c < nv; ++c) {
    const double s = job_sum[prob.vars[c].job];
    if (s > 0.0) sol.x[c] /= s;
  }
  sol.objective = lp_objective(sol);
  return sol;
}

double lp_objective(const LpSolution& sol) {
  double obj = 0.0;
  for (size_t c = 0; c < sol.x.size(); ++c) obj += sol.cost[c] * sol.x[c];
  return obj;
}

RectangleSet extract_rectangles(const LpSolution& sol) {
  RectangleSet rs;
  rs.machine_count = sol.machine_count;
  rs.job_count = sol.job_count;
  rs.height_ij.assign(sol.machine_count,
                      std::vector<double>(sol.job_count, 0.0));
  for (size_t c = 0; c < sol.x.size(); ++c) {
    if (sol.x[c] <= 0.0) continue;
    const LpVar& v = sol.vars[c];
    rs.rects.push_back({v.machine, v.job, v.start, sol.len[c], sol.x[c]});
    rs.height_ij[v.machine][v.job] += sol.x[c];
  }
  return rs;
}

std::vector<int> RectangleSet::rects_on_machine(int i) const {
  std::vector<int> out;
  for (int r = 0; r < static_cast<int>(rects.size()); ++r)
    if (rects[r].machine == i) out.push_back(r);
  return out;
}

std::string serialize_solution(const LpSolution& sol) {
  using nlohmann::json;
  json xs = json::array();
  for (size_t c = 0; c < sol.x.size(); ++c) {
    if (sol.x[c] <= 0.0) continue;
    const LpVar& v = sol.vars[c];
    xs.push_back({{"i", v.machine + 1},
                  {"j", v.job + 1},
                  {"s", v.start},
                  {"v", sol.x[c]}});
  }
  json doc = {{"objective", sol.objective}, {"x", std::move(xs)}};
  return doc.dump(2) + "\n";
}

}  // namespace fairround
