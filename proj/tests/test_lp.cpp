#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "drrp/linear_program.hpp"
#include "drrp/rng.hpp"
#include "drrp/simplex.hpp"

using namespace drrp;

namespace {

// Exhaustive oracle for small integer programs: enumerate every integer
// point in the box and keep the best feasible one.
double brute_force_mip(const LinearProgram& lp, bool* feasible) {
  std::vector<std::vector<double>> rows(lp.num_rows(),
                                        std::vector<double>(lp.num_vars()));
  for (const auto& e : lp.entries) rows[e.row][e.col] += e.value;
  std::vector<int> x(lp.num_vars());
  double best = 0.0;
  *feasible = false;
  std::function<void(int)> rec = [&](int v) {
    if (v == lp.num_vars()) {
      for (int r = 0; r < lp.num_rows(); ++r) {
        double lhs = 0.0;
        for (int c = 0; c < lp.num_vars(); ++c) lhs += rows[r][c] * x[c];
        if (lp.sense[r] == RowSense::kLe && lhs > lp.rhs[r] + 1e-9) return;
        if (lp.sense[r] == RowSense::kGe && lhs < lp.rhs[r] - 1e-9) return;
        if (lp.sense[r] == RowSense::kEq && std::abs(lhs - lp.rhs[r]) > 1e-9)
          return;
      }
      double obj = 0.0;
      for (int c = 0; c < lp.num_vars(); ++c) obj += lp.obj[c] * x[c];
      if (!*feasible || obj < best) best = obj;
      *feasible = true;
      return;
    }
    for (int k = static_cast<int>(lp.lb[v]); k <= static_cast<int>(lp.ub[v]);
         ++k) {
      x[v] = k;
      rec(v + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace

TEST_CASE("simple lp with known optimum and duals") {
  // min -x - 2y  s.t. x + y <= 4, y <= 3, x,y >= 0  -> (1,3), obj -7.
  LinearProgram lp;
  int x = lp.add_var(0, kLpInfinity, -1);
  int y = lp.add_var(0, kLpInfinity, -2);
  int r0 = lp.add_row(RowSense::kLe, 4);
  int r1 = lp.add_row(RowSense::kLe, 3);
  lp.add_entry(r0, x, 1);
  lp.add_entry(r0, y, 1);
  lp.add_entry(r1, y, 1);
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(-7.0));
  CHECK(s.x[x] == doctest::Approx(1.0));
  CHECK(s.x[y] == doctest::Approx(3.0));
  // Duals: tight rows with y0 = -1 (from x's reduced cost) and y1 = -1.
  CHECK(s.duals[r0] == doctest::Approx(-1.0));
  CHECK(s.duals[r1] == doctest::Approx(-1.0));
}

TEST_CASE("equality and >= rows with bounded variables") {
  // min 2a + b  s.t. a + b = 5, a >= 1, b <= 3  -> a=2, b=3, obj 7.
  LinearProgram lp;
  int a = lp.add_var(1, kLpInfinity, 2);
  int b = lp.add_var(0, 3, 1);
  int r = lp.add_row(RowSense::kEq, 5);
  lp.add_entry(r, a, 1);
  lp.add_entry(r, b, 1);
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::kOptimal);
  CHECK(s.objective == doctest::Approx(7.0));
  CHECK(s.x[a] == doctest::Approx(2.0));
  CHECK(s.x[b] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded detection") {
  LinearProgram bad;
  int x = bad.add_var(0, 10, 1);
  int r0 = bad.add_row(RowSense::kGe, 20);
  bad.add_entry(r0, x, 1);
  CHECK(solve_lp(bad).status == LpStatus::kInfeasible);

  LinearProgram unb;
  int y = unb.add_var(0, kLpInfinity, -1);
  int r1 = unb.add_row(RowSense::kGe, 0);
  unb.add_entry(r1, y, 1);
  CHECK(solve_lp(unb).status == LpStatus::kUnbounded);
}

TEST_CASE("validate rejects malformed programs") {
  LinearProgram lp;
  lp.add_var(0, 1, 1);
  CHECK(lp.validate().empty());
  LinearProgram free_var;
  free_var.add_var(-kLpInfinity, kLpInfinity, 1);
  CHECK_FALSE(free_var.validate().empty());
  LinearProgram crossed;
  crossed.add_var(2, 1, 1);
  CHECK_FALSE(crossed.validate().empty());
}

TEST_CASE("duals price the rhs: perturbation oracle") {
  RngStream rng(17, RngStreamId::kInstance);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp;
    int n = 3 + trial % 3, m = 2 + trial % 3;
    for (int v = 0; v < n; ++v)
      lp.add_var(0, rng.uniform_int(1, 6), rng.uniform_int(-5, 5));
    for (int r = 0; r < m; ++r) {
      lp.add_row(r % 2 ? RowSense::kLe : RowSense::kGe,
                 rng.uniform_int(-2, 8));
      for (int v = 0; v < n; ++v) {
        int c = rng.uniform_int(-2, 3);
        if (c != 0) lp.add_entry(r, v, c);
      }
    }
    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::kOptimal) continue;
    ++checked;
    for (int r = 0; r < m; ++r) {
      const double eps = 0.25;
      LinearProgram p = lp;
      p.rhs[r] += eps;
      LpSolution sp = solve_lp(p);
      if (sp.status != LpStatus::kOptimal) continue;
      // LP sensitivity: V(b + e) >= V(b) + y_r * e for any optimal dual y.
      CHECK(sp.objective >= s.objective + s.duals[r] * eps - 1e-7);
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("knapsack mip solves to the enumerated optimum") {
  // max 10a + 13b + 7c with 3a + 4b + 2c <= 6, binaries
  // = min of the negation; optimum picks a and c (17) vs b+c (20) -> 20.
  LinearProgram lp;
  int a = lp.add_var(0, 1, -10, true);
  int b = lp.add_var(0, 1, -13, true);
  int c = lp.add_var(0, 1, -7, true);
  int r = lp.add_row(RowSense::kLe, 6);
  lp.add_entry(r, a, 3);
  lp.add_entry(r, b, 4);
  lp.add_entry(r, c, 2);
  MipResult res = solve_mip(lp, {});
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(-20.0));
  CHECK(res.x[b] == doctest::Approx(1.0));
  CHECK(res.x[c] == doctest::Approx(1.0));
  CHECK(res.best_bound <= res.objective + 1e-9);
}

TEST_CASE("random mips agree with exhaustive enumeration") {
  RngStream rng(23, RngStreamId::kInstance);
  int feasible_count = 0;
  for (int trial = 0; trial < 150; ++trial) {
    LinearProgram lp;
    int n = 2 + trial % 4;
    for (int v = 0; v < n; ++v)
      lp.add_var(0, rng.uniform_int(1, 3), rng.uniform_int(-6, 6), true);
    int m = 1 + trial % 3;
    for (int r = 0; r < m; ++r) {
      RowSense sense = static_cast<RowSense>(rng.uniform_int(0, 2));
      lp.add_row(sense, rng.uniform_int(-1, 6));
      for (int v = 0; v < n; ++v) {
        int c = rng.uniform_int(-2, 3);
        if (c != 0) lp.add_entry(r, v, c);
      }
    }
    bool feasible = false;
    double want = brute_force_mip(lp, &feasible);
    MipOptions opt;
    opt.rel_gap = 0.0;  // exact for the oracle comparison
    MipResult res = solve_mip(lp, opt);
    if (!feasible) {
      CHECK(res.status == LpStatus::kInfeasible);
      continue;
    }
    ++feasible_count;
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(want).epsilon(1e-7));
    for (int v = 0; v < n; ++v)
      CHECK(std::abs(res.x[v] - std::round(res.x[v])) < 1e-6);
  }
  CHECK(feasible_count > 60);
}

TEST_CASE("mip respects its time limit and flags it") {
  // A deliberately fiddly equality knapsack; tiny limit forces a timeout
  // (or an instant optimum on fast machines - both are legal, but the
  // timed_out flag must match the status).
  RngStream rng(41, RngStreamId::kInstance);
  LinearProgram lp;
  const int n = 24;
  int r = lp.add_row(RowSense::kEq, 53);
  for (int v = 0; v < n; ++v) {
    lp.add_var(0, 1, -rng.uniform_int(3, 19), true);
    lp.add_entry(r, v, rng.uniform_int(3, 17));
  }
  MipOptions opt;
  opt.rel_gap = 0.0;
  opt.time_limit_s = 1e-4;
  MipResult res = solve_mip(lp, opt);
  if (res.status == LpStatus::kTimeLimit) {
    CHECK(res.timed_out);
  } else {
    CHECK(res.status == LpStatus::kOptimal);
  }
}

TEST_CASE("mps export contains required sections and markers") {
  LinearProgram lp;
  lp.add_var(0, 1, -10, true, "a");
  lp.add_var(0, 5, 2, false, "b");
  int r = lp.add_row(RowSense::kLe, 6, "cap");
  lp.add_entry(r, 0, 3);
  lp.add_entry(r, 1, 1);
  std::string mps = lp_to_mps(lp, "test");
  CHECK(mps.find("ROWS") != std::string::npos);
  CHECK(mps.find("COLUMNS") != std::string::npos);
  CHECK(mps.find("RHS") != std::string::npos);
  CHECK(mps.find("BOUNDS") != std::string::npos);
  CHECK(mps.find("MARKER") != std::string::npos);
  CHECK(mps.find("INTORG") != std::string::npos);
  CHECK(mps.find("ENDATA") != std::string::npos);
  CHECK(mps.find("cap") != std::string::npos);
}
