#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fairround/instance.hpp"
#include "fairround/oracle.hpp"
#include "fairround/simplex.hpp"
#include "fairround/timeidx_lp.hpp"

using namespace fairround;

namespace {

Instance make_instance(int m, int n, std::vector<std::vector<int>> p,
                       std::vector<double> w) {
  Instance inst;
  inst.machine_count = m;
  inst.job_count = n;
  inst.proc = std::move(p);
  inst.weight = std::move(w);
  REQUIRE(validate(inst).empty());
  return inst;
}

}  // namespace

TEST_CASE("simplex solves a basic LP") {
  // min -x - y  s.t.  x + y <= 1, x <= 0.6  ->  objective -1.
  SimplexProblem p;
  p.num_vars = 2;
  p.cost = {-1.0, -1.0};
  p.le_rows = {{1.0, 1.0}, {1.0, 0.0}};
  p.le_rhs = {1.0, 0.6};
  SimplexResult r = solve_simplex(p);
  REQUIRE(r.status == SimplexResult::Status::kOptimal);
  CHECK(r.objective == doctest::Approx(-1.0));
  CHECK(r.x[0] + r.x[1] == doctest::Approx(1.0));
}

TEST_CASE("simplex detects infeasibility") {
  // x = 2 with x <= 1.
  SimplexProblem p;
  p.num_vars = 1;
  p.cost = {0.0};
  p.eq_rows = {{1.0}};
  p.eq_rhs = {2.0};
  p.le_rows = {{1.0}};
  p.le_rhs = {1.0};
  CHECK(solve_simplex(p).status == SimplexResult::Status::kInfeasible);
}

TEST_CASE("simplex handles degenerate ties deterministically") {
  SimplexProblem p;
  p.num_vars = 3;
  p.cost = {-2.0, -2.0, -1.0};
  p.le_rows = {{1.0, 1.0, 1.0}, {1.0, 1.0, 0.0}, {1.0, 0.0, 0.0}};
  p.le_rhs = {1.0, 1.0, 1.0};
  SimplexResult a = solve_simplex(p);
  SimplexResult b = solve_simplex(p);
  REQUIRE(a.status == SimplexResult::Status::kOptimal);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
  CHECK(a.objective == doctest::Approx(-2.0));
}

TEST_CASE("default horizon sums per-job maxima") {
  CHECK(default_horizon(make_instance(1, 1, {{3}}, {1.0})) == 3);
  CHECK(default_horizon(make_instance(1, 2, {{3, 4}}, {1.0, 1.0})) == 7);
  CHECK(default_horizon(
            make_instance(2, 3, {{2, 2, 2}, {2, 2, 2}}, {1, 1, 1})) == 6);
}

TEST_CASE("build_lp column counts match the horizon formula") {
  LpProblem p1 = build_lp(make_instance(1, 1, {{3}}, {1.0}), 3);
  CHECK(p1.num_vars() == 1);
  CHECK(p1.vars[0].start == 0);

  LpProblem p2 = build_lp(make_instance(1, 2, {{1, 1}}, {1.0, 1.0}), 2);
  CHECK(p2.num_vars() == 4);
}

TEST_CASE("build_lp rejects an infeasible horizon") {
  CHECK_THROWS_AS(build_lp(make_instance(1, 1, {{3}}, {1.0}), 2), LpError);
}

TEST_CASE("single-job LP is forced") {
  Instance inst = make_instance(1, 1, {{3}}, {1.0});
  LpSolution sol = solve_lp(build_lp(inst, 3));
  REQUIRE(sol.status == LpSolution::Status::kOptimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
}

TEST_CASE("two jobs order by Smith's rule in the LP") {
  Instance inst = make_instance(1, 2, {{1, 2}}, {1.0, 1.0});
  LpSolution sol = solve_lp(build_lp(inst, 3));
  REQUIRE(sol.status == LpSolution::Status::kOptimal);
  CHECK(sol.objective == doctest::Approx(4.0));
}

TEST_CASE("solution invariants hold on random instances") {
  GenParams gp;
  gp.machine_count = 2;
  gp.job_count = 5;
  gp.p_max = 4;
  gp.w_max = 3.0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Instance inst = generate_random(gp, seed);
    LpProblem prob = build_lp(inst, default_horizon(inst));
    LpSolution sol = solve_lp(prob);
    REQUIRE(sol.status == LpSolution::Status::kOptimal);

    std::vector<double> job_sum(inst.job_count, 0.0);
    std::vector<std::vector<double>> load(
        inst.machine_count, std::vector<double>(prob.horizon, 0.0));
    for (size_t c = 0; c < sol.x.size(); ++c) {
      CHECK(sol.x[c] >= 0.0);
      job_sum[sol.vars[c].job] += sol.x[c];
      for (int t = sol.vars[c].start; t < sol.vars[c].start + sol.len[c];
           ++t)
        load[sol.vars[c].machine][t] += sol.x[c];
    }
    for (double s : job_sum) CHECK(s == doctest::Approx(1.0).epsilon(1e-7));
    for (const auto& row : load)
      for (double l : row) CHECK(l <= 1.0 + 1e-7);

    // Deterministic pivoting: identical objective on a re-solve.
    CHECK(solve_lp(prob).objective == sol.objective);
  }
}

TEST_CASE("LP lower-bounds the exact optimum") {
  GenParams gp;
  gp.machine_count = 3;
  gp.job_count = 5;
  gp.p_max = 5;
  gp.w_max = 4.0;
  gp.absent_prob = 0.2;
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    Instance inst = generate_random(gp, seed);
    LpSolution sol = solve_lp(build_lp(inst, default_horizon(inst)));
    REQUIRE(sol.status == LpSolution::Status::kOptimal);
    const double opt = brute_force_opt(inst).objective;
    CHECK(sol.objective <= opt * (1.0 + 1e-6));
  }
}

TEST_CASE("extract_rectangles keeps only positive heights") {
  Instance inst = make_instance(2, 1, {{3}, {3}}, {1.0});
  LpSolution sol = solve_lp(build_lp(inst, 3));
  RectangleSet rs = extract_rectangles(sol);
  double total = 0.0;
  for (const Rect& r : rs.rects) {
    CHECK(r.height > 0.0);
    CHECK(r.len == 3);
    total += r.height;
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(rs.height_ij[0][0] + rs.height_ij[1][0] == doctest::Approx(1.0));
}

TEST_CASE("lp_objective evaluates the weighted completion sum") {
  Instance inst = make_instance(1, 1, {{3}}, {2.0});
  LpSolution sol = solve_lp(build_lp(inst, 3));
  CHECK(lp_objective(sol) == doctest::Approx(6.0));

  LpSolution manual;
  manual.cost = {2.0, 4.0};  // two half rectangles at s=0 and s=2, p=2, w=1
  manual.x = {0.5, 0.5};
  CHECK(lp_objective(manual) == doctest::Approx(3.0));

  LpSolution empty;
  CHECK(lp_objective(empty) == 0.0);
}

TEST_CASE("solution serialization lists positive entries sorted") {
  Instance inst = make_instance(1, 2, {{1, 2}}, {1.0, 1.0});
  LpSolution sol = solve_lp(build_lp(inst, 3));
  const std::string text = serialize_solution(sol);
  CHECK(text.find("\"objective\"") != std::string::npos);
  CHECK(text.find("\"i\": 1") != std::string::npos);
  // 1-based indices only.
  CHECK(text.find("\"i\": 0") == std::string::npos);
}
