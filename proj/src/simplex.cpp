#include "fairround/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairround {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr int kStallLimit = 64;

struct Tableau {
  int rows = 0;
  int cols = 0;  // structural + slack + artificial
  int num_struct = 0;
  int art_begin = 0;
  std::vector<std::vector<double>> a;  // rows x (cols + 1), last is rhs
  std::vector<double> z;               // reduced-cost row, size cols + 1
  std::vector<int> basis;              // basic column per row

  void pivot(int pr, int pc) {
    std::vector<double>& prow = a[pr];
    const double inv = 1.0 / prow[pc];
    for (double& v : prow) v *= inv;
    prow[pc] = 1.0;
    for (int r = 0; r < rows; ++r) {
      if (r == pr) continue;
      const double f = a[r][pc];
      if (f == 0.0) continue;
      std::vector<double>& row = a[r];
      for (int c = 0; c <= cols; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    const double f = z[pc];
    if (f != 0.0) {
      for (int c = 0; c <= cols; ++c) z[c] -= f * prow[c];
      z[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  // Returns false when no entering column exists (optimal).
  bool choose_entering(int limit_cols, bool bland, int* out) const {
    int best = -1;
    double best_cost = -kCostTol;
    for (int c = 0; c < limit_cols; ++c) {
      if (z[c] < best_cost) {
        if (bland) {
          *out = c;
          return true;
        }
        best = c;
        best_cost = z[c];
      }
    }
    if (best < 0) return false;
    *out = best;
    return true;
  }

  // Ratio test; ties broken by lowest basic column index (Bland).
  int choose_leaving(int pc) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) {
      const double coef = a[r][pc];
      if (coef <= kPivotTol) continue;
      const double ratio = a[r][cols] / coef;
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 &&
           (best < 0 || basis[r] < basis[best]))) {
        best = r;
        best_ratio = ratio;
      }
    }
    return best;
  }

  // Runs the simplex loop over the first limit_cols columns until the
  // reduced-cost row is nonnegative. Returns false on unboundedness.
  bool iterate(int limit_cols) {
    int stall = 0;
    bool bland = false;
    double last_obj = z[cols];
    for (;;) {
      int pc;
      if (!choose_entering(limit_cols, bland, &pc)) return true;
      const int pr = choose_leaving(pc);
      if (pr < 0) return false;
      pivot(pr, pc);
      if (z[cols] > last_obj + 1e-12) {
        last_obj = z[cols];
        stall = 0;
        bland = false;
      } else if (++stall > kStallLimit) {
        bland = true;
      }
    }
  }
};

}  // namespace

SimplexResult solve_simplex(const SimplexProblem& prob) {
  const int neq = static_cast<int>(prob.eq_rows.size());
  const int nle = static_cast<int>(prob.le_rows.size());
  const int nv = prob.num_vars;

  Tableau t;
  t.rows = neq + nle;
  t.num_struct = nv;
  t.art_begin = nv + nle;
  t.cols = nv + nle + neq;
  t.a.assign(t.rows, std::vector<double>(t.cols + 1, 0.0));
  t.basis.assign(t.rows, -1);

  for (int r = 0; r < neq; ++r) {
    double sign = prob.eq_rhs[r] < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < nv; ++c) t.a[r][c] = sign * prob.eq_rows[r][c];
    t.a[r][t.cols] = sign * prob.eq_rhs[r];
    t.a[r][t.art_begin + r] = 1.0;
    t.basis[r] = t.art_begin + r;
  }
  for (int r = 0; r < nle; ++r) {
    if (prob.le_rhs[r] < 0.0)
      throw std::invalid_argument("le rows require nonnegative rhs");
    const int row = neq + r;
    for (int c = 0; c < nv; ++c) t.a[row][c] = prob.le_rows[r][c];
    t.a[row][t.cols] = prob.le_rhs[r];
    t.a[row][nv + r] = 1.0;
    t.basis[row] = nv + r;
  }

  SimplexResult res;

  // Phase 1: minimize the sum of artificials. Reduced costs start as
  // -(sum of artificial-basic rows); the tableau z row stores -objective
  // in its rhs slot so larger is better during iterate().
  t.z.assign(t.cols + 1, 0.0);
  for (int r = 0; r < neq; ++r)
    for (int c = 0; c <= t.cols; ++c) t.z[c] -= t.a[r][c];
  for (int r = 0; r < neq; ++r) t.z[t.art_begin + r] = 0.0;

  if (!t.iterate(t.cols))
    throw std::logic_error("phase-1 simplex reported unbounded");
  const double phase1 = -t.z[t.cols];
  if (phase1 > kPhase1Tol) {
    res.status = SimplexResult::Status::kInfeasible;
    return res;
  }

  // Drive any zero-valued artificial out of the basis when possible.
  for (int r = 0; r < t.rows; ++r) {
    if (t.basis[r] < t.art_begin) continue;
    int pc = -1;
    for (int c = 0; c < t.art_begin; ++c) {
      if (std::fabs(t.a[r][c]) > kPivotTol) {
        pc = c;
        break;
      }
    }
    if (pc >= 0) t.pivot(r, pc);
    // else: redundant row; the artificial stays basic at value zero.
  }

  // Phase 2 over structural + slack columns only.
  t.z.assign(t.cols + 1, 0.0);
  for (int c = 0; c < nv; ++c) t.z[c] = prob.cost[c];
  for (int r = 0; r < t.rows; ++r) {
    const int b = t.basis[r];
    if (b < nv && prob.cost[b] != 0.0) {
      const double f = prob.cost[b];
      for (int c = 0; c <= t.cols; ++c) t.z[c] -= f * t.a[r][c];
    }
  }
  for (int r = 0; r < t.rows; ++r) t.z[t.basis[r]] = 0.0;

  if (!t.iterate(t.art_begin))
    throw std::logic_error("box-bounded LP reported unbounded");

  res.status = SimplexResult::Status::kOptimal;
  res.x.assign(nv, 0.0);
  for (int r = 0; r < t.rows; ++r)
    if (t.basis[r] < nv) res.x[t.basis[r]] = t.a[r][t.cols];
  double obj = 0.0;
  for (int c = 0; c < nv; ++c) obj += prob.cost[c] * res.x[c];
  res.objective = obj;
  return res;
}

}  // namespace fairround
