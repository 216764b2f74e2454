#pragma once

#include <memory>
#include <vector>

#include "drrp/linear_program.hpp"

namespace drrp {

struct SimplexOptions {
  double feas_tol = 1e-7;   // primal feasibility / ratio-test tolerance
  double opt_tol = 1e-9;    // reduced-cost optimality tolerance
  long max_iters = 200000;
  int refactor_every = 120; // rebuild the basis inverse after this many pivots
};

/// Bounded-variable revised simplex over the LP's structural columns plus
/// one slack per row. Supports warm restarts after bound changes via the
/// dual simplex, which is what the branch-and-bound layer leans on.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, SimplexOptions opts = {});
  ~SimplexSolver();
  SimplexSolver(const SimplexSolver&) = delete;
  SimplexSolver& operator=(const SimplexSolver&) = delete;

  /// Phase-1 (artificial variables) + phase-2 solve from scratch.
  LpStatus solve();

  /// Tightens/relaxes a structural variable's bounds in place. A nonbasic
  /// variable is snapped to the nearest new bound; dual feasibility of the
  /// current basis is preserved, so resolve_dual() reoptimizes cheaply.
  void set_bounds(int var, double lower, double upper);

  /// Dual simplex from the current basis; requires a prior successful
  /// solve(). Returns kInfeasible when the new bounds admit no solution.
  LpStatus resolve_dual();

  double objective() const;
  LpSolution extract(LpStatus status) const;

  /// Opaque basis snapshot for tree search.
  struct Basis;
  std::shared_ptr<const Basis> save_basis() const;
  /// Restores a snapshot taken on this solver (same LP shape). Bounds are
  /// not part of the snapshot; set them separately.
  void load_basis(const Basis& basis);

  long iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot LP solve.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {});

struct MipOptions {
  double rel_gap = 5e-3;
  double int_tol = 1e-6;
  double time_limit_s = 0.0;  // 0 = unlimited
  SimplexOptions lp;
};

struct MipResult {
  LpStatus status = LpStatus::kIterLimit;  // kTimeLimit = best-at-timeout
  double objective = 0.0;     // incumbent (minimization)
  double best_bound = 0.0;    // proven lower bound
  std::vector<double> x;
  long nodes = 0;
  bool timed_out = false;

  double gap() const;  // relative gap of incumbent vs bound
};

/// Best-first branch and bound over the integer-marked variables, with
/// pseudocost branching and periodic rounding dives for incumbents.
MipResult solve_mip(const LinearProgram& lp, const MipOptions& opts = {});

}  // namespace drrp
