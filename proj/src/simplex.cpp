#include "drrp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include <lapacke.h>

namespace drrp {

namespace {
constexpr double kInf = kLpInfinity;
constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateLimit = 80;  // consecutive zero-step pivots before Bland
}  // namespace

enum : signed char { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

struct SimplexSolver::Basis {
  std::vector<int> basic;
  std::vector<signed char> stat;
};

struct SimplexSolver::Impl {
  SimplexOptions opts;
  int m = 0;      // rows
  int n = 0;      // structural variables
  int ncols = 0;  // n + 2m (slacks, then artificials)

  // Column-compressed matrix over all columns.
  std::vector<int> col_start;
  std::vector<int> col_row;
  std::vector<double> col_val;

  std::vector<double> obj;    // phase-2 costs (zero on slacks/artificials)
  std::vector<double> pcost;  // costs of the active phase
  std::vector<double> lb, ub;
  std::vector<double> rhs;

  std::vector<int> basic;         // basis position -> column
  std::vector<signed char> stat;  // column -> status
  std::vector<double> xB;         // basic values
  std::vector<double> binv;       // m*m, column-major inverse of the basis
  std::vector<double> y;          // row duals for pcost
  std::vector<double> alpha;      // ftran scratch
  std::vector<double> scratch;

  long iters = 0;
  int pivots_since_refactor = 0;
  int degenerate_run = 0;
  bool bland = false;
  bool have_solution = false;

  int art_col(int row) const { return n + m + row; }
  int slack_col(int row) const { return n + row; }

  double nb_value(int j) const { return stat[j] == kAtUpper ? ub[j] : lb[j]; }

  bool refactorize();
  void compute_xB();
  void compute_y();
  void ftran(int j, std::vector<double>& out) const;
  void apply_eta(int r);
  void pivot(int q, int r, double entering_value, signed char leaving_stat);

  enum class StepResult { kOptimal, kUnbounded, kContinue, kStuck };
  StepResult primal_step();
  LpStatus primal_loop();
  LpStatus dual_loop();

  void setup_initial_basis();
  double structural_value(int j) const;
};

SimplexSolver::SimplexSolver(const LinearProgram& lp, SimplexOptions opts)
    : impl_(new Impl) {
  Impl& s = *impl_;
  s.opts = opts;
  s.m = lp.num_rows();
  s.n = lp.num_vars();
  s.ncols = s.n + 2 * s.m;

  // Structural columns from triplets, then slack and artificial identities.
  std::vector<std::vector<std::pair<int, double>>> cols(s.n);
  for (const auto& t : lp.entries) cols[t.col].push_back({t.row, t.value});
  s.col_start.assign(s.ncols + 1, 0);
  for (int j = 0; j < s.n; ++j) {
    auto& c = cols[j];
    std::sort(c.begin(), c.end());
    // Merge duplicate (row, col) triplets additively.
    std::vector<std::pair<int, double>> merged;
    for (auto& [r, v] : c) {
      if (!merged.empty() && merged.back().first == r)
        merged.back().second += v;
      else
        merged.push_back({r, v});
    }
    c = std::move(merged);
    s.col_start[j + 1] = s.col_start[j] + static_cast<int>(c.size());
  }
  for (int j = s.n; j < s.ncols; ++j)
    s.col_start[j + 1] = s.col_start[j] + 1;
  s.col_row.resize(s.col_start[s.ncols]);
  s.col_val.resize(s.col_start[s.ncols]);
  for (int j = 0; j < s.n; ++j) {
    int at = s.col_start[j];
    for (auto& [r, v] : cols[j]) {
      s.col_row[at] = r;
      s.col_val[at] = v;
      ++at;
    }
  }
  for (int r = 0; r < s.m; ++r) {
    s.col_row[s.col_start[s.slack_col(r)]] = r;
    s.col_val[s.col_start[s.slack_col(r)]] = 1.0;
    s.col_row[s.col_start[s.art_col(r)]] = r;
    s.col_val[s.col_start[s.art_col(r)]] = 1.0;
  }

  s.obj.assign(s.ncols, 0.0);
  s.lb.assign(s.ncols, 0.0);
  s.ub.assign(s.ncols, 0.0);
  for (int j = 0; j < s.n; ++j) {
    s.obj[j] = lp.obj[j];
    s.lb[j] = lp.lb[j];
    s.ub[j] = lp.ub[j];
  }
  s.rhs = lp.rhs;
  for (int r = 0; r < s.m; ++r) {
    switch (lp.sense[r]) {
      case RowSense::kLe:
        s.lb[s.slack_col(r)] = 0.0;
        s.ub[s.slack_col(r)] = kInf;
        break;
      case RowSense::kEq:
        s.lb[s.slack_col(r)] = 0.0;
        s.ub[s.slack_col(r)] = 0.0;
        break;
      case RowSense::kGe:
        s.lb[s.slack_col(r)] = -kInf;
        s.ub[s.slack_col(r)] = 0.0;
        break;
    }
  }

  s.pcost = s.obj;
  s.basic.assign(s.m, -1);
  s.stat.assign(s.ncols, kAtLower);
  s.xB.assign(s.m, 0.0);
  s.binv.assign(static_cast<std::size_t>(s.m) * s.m, 0.0);
  s.y.assign(s.m, 0.0);
  s.alpha.assign(s.m, 0.0);
  s.scratch.assign(s.m, 0.0);
}

SimplexSolver::~SimplexSolver() = default;

bool SimplexSolver::Impl::refactorize() {
  if (m == 0) return true;
  std::vector<double> B(static_cast<std::size_t>(m) * m, 0.0);
  for (int p = 0; p < m; ++p) {
    int j = basic[p];
    for (int a = col_start[j]; a < col_start[j + 1]; ++a)
      B[static_cast<std::size_t>(p) * m + col_row[a]] = col_val[a];
  }
  std::vector<lapack_int> ipiv(m);
  lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, m, m, B.data(), m,
                                   ipiv.data());
  if (info != 0) return false;
  info = LAPACKE_dgetri(LAPACK_COL_MAJOR, m, B.data(), m, ipiv.data());
  if (info != 0) return false;
  binv = std::move(B);
  pivots_since_refactor = 0;
  return true;
}

void SimplexSolver::Impl::compute_xB() {
  std::vector<double>& r = scratch;
  r = rhs;
  for (int j = 0; j < ncols; ++j) {
    if (stat[j] == kBasic) continue;
    double v = nb_value(j);
    if (v == 0.0) continue;
    for (int a = col_start[j]; a < col_start[j + 1]; ++a)
      r[col_row[a]] -= col_val[a] * v;
  }
  std::fill(xB.begin(), xB.end(), 0.0);
  for (int c = 0; c < m; ++c) {
    double rc = r[c];
    if (rc == 0.0) continue;
    const double* col = &binv[static_cast<std::size_t>(c) * m];
    for (int i = 0; i < m; ++i) xB[i] += col[i] * rc;
  }
}

void SimplexSolver::Impl::compute_y() {
  for (int c = 0; c < m; ++c) {
    const double* col = &binv[static_cast<std::size_t>(c) * m];
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      double cb = pcost[basic[i]];
      if (cb != 0.0) acc += cb * col[i];
    }
    y[c] = acc;
  }
}

void SimplexSolver::Impl::ftran(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (int a = col_start[j]; a < col_start[j + 1]; ++a) {
    double v = col_val[a];
    const double* col = &binv[static_cast<std::size_t>(col_row[a]) * m];
    for (int i = 0; i < m; ++i) out[i] += v * col[i];
  }
}

// Rank-one update of binv after `alpha` enters at basis position r.
void SimplexSolver::Impl::apply_eta(int r) {
  const double piv = alpha[r];
  for (int c = 0; c < m; ++c) {
    double* col = &binv[static_cast<std::size_t>(c) * m];
    double pr = col[r] / piv;
    if (pr == 0.0) continue;
    col[r] = pr;
    for (int i = 0; i < m; ++i)
      if (i != r) col[i] -= alpha[i] * pr;
  }
  ++pivots_since_refactor;
}

void SimplexSolver::Impl::pivot(int q, int r, double entering_value,
                                signed char leaving_stat) {
  int leaving = basic[r];
  stat[leaving] = leaving_stat;
  basic[r] = q;
  stat[q] = kBasic;
  apply_eta(r);
  xB[r] = entering_value;
  if (pivots_since_refactor >= opts.refactor_every) {
    refactorize();
    compute_xB();
  }
}

SimplexSolver::Impl::StepResult SimplexSolver::Impl::primal_step() {
  compute_y();

  // Pricing: Dantzig by default, Bland while escaping degeneracy.
  int q = -1;
  double best = opts.opt_tol;
  int dir = 0;
  for (int j = 0; j < ncols; ++j) {
    if (stat[j] == kBasic || lb[j] == ub[j]) continue;
    double d = pcost[j];
    for (int a = col_start[j]; a < col_start[j + 1]; ++a)
      d -= y[col_row[a]] * col_val[a];
    double viol = 0.0;
    int jdir = 0;
    if (stat[j] == kAtLower && d < -opts.opt_tol) {
      viol = -d;
      jdir = +1;
    } else if (stat[j] == kAtUpper && d > opts.opt_tol) {
      viol = d;
      jdir = -1;
    } else {
      continue;
    }
    if (bland) {
      q = j;
      dir = jdir;
      break;
    }
    if (viol > best) {
      best = viol;
      q = j;
      dir = jdir;
    }
  }
  if (q < 0) return StepResult::kOptimal;

  ftran(q, alpha);

  // Ratio test: smallest step at which a basic variable (or the entering
  // variable itself) hits a bound. Ties go to the largest pivot magnitude.
  const double limit = ub[q] - lb[q];  // bound-flip step, possibly infinite
  int r = -1;
  double step = kInf;
  double r_piv = 0.0;
  signed char r_stat = kAtLower;
  for (int i = 0; i < m; ++i) {
    double rate = -dir * alpha[i];  // d(xB_i)/d(step)
    if (std::abs(rate) <= kPivotTol) continue;
    int bj = basic[i];
    double ratio;
    signed char hit;
    if (rate < 0.0) {
      if (lb[bj] == -kInf) continue;
      ratio = (xB[i] - lb[bj]) / -rate;
      hit = kAtLower;
    } else {
      if (ub[bj] == kInf) continue;
      ratio = (ub[bj] - xB[i]) / rate;
      hit = kAtUpper;
    }
    if (ratio < 0.0) ratio = 0.0;
    if (ratio < step - 1e-12 ||
        (ratio < step + 1e-12 && std::abs(alpha[i]) > std::abs(r_piv))) {
      step = std::min(step, ratio);
      r = i;
      r_piv = alpha[i];
      r_stat = hit;
    }
  }

  if (r < 0 && limit == kInf) return StepResult::kUnbounded;

  ++iters;
  if (limit <= step) {
    // Bound flip: the entering variable crosses its whole range.
    for (int i = 0; i < m; ++i) xB[i] -= dir * alpha[i] * limit;
    stat[q] = stat[q] == kAtLower ? kAtUpper : kAtLower;
    degenerate_run = 0;
    bland = false;
    return StepResult::kContinue;
  }

  if (step <= opts.feas_tol) {
    if (++degenerate_run > kDegenerateLimit) bland = true;
  } else {
    degenerate_run = 0;
    bland = false;
  }

  double entering_value = nb_value(q) + dir * step;
  for (int i = 0; i < m; ++i) xB[i] -= dir * alpha[i] * step;
  pivot(q, r, entering_value, r_stat);
  return StepResult::kContinue;
}

LpStatus SimplexSolver::Impl::primal_loop() {
  for (; iters < opts.max_iters;) {
    StepResult sr = primal_step();
    if (sr == StepResult::kOptimal) return LpStatus::kOptimal;
    if (sr == StepResult::kUnbounded) return LpStatus::kUnbounded;
  }
  return LpStatus::kIterLimit;
}

double SimplexSolver::Impl::structural_value(int j) const {
  if (stat[j] == kBasic) {
    for (int i = 0; i < m; ++i)
      if (basic[i] == j) return xB[i];
  }
  return nb_value(j);
}

void SimplexSolver::Impl::setup_initial_basis() {
  // Nonbasic structurals parked on a finite bound.
  for (int j = 0; j < n; ++j)
    stat[j] = lb[j] > -kInf ? kAtLower : kAtUpper;

  // Row residuals with only structural contributions.
  std::vector<double> r = rhs;
  for (int j = 0; j < n; ++j) {
    double v = nb_value(j);
    if (v == 0.0) continue;
    for (int a = col_start[j]; a < col_start[j + 1]; ++a)
      r[col_row[a]] -= col_val[a] * v;
  }

  pcost.assign(ncols, 0.0);
  for (int row = 0; row < m; ++row) {
    int sj = slack_col(row);
    int aj = art_col(row);
    if (r[row] >= lb[sj] && r[row] <= ub[sj]) {
      // Slack absorbs the residual; artificial pinned at zero.
      basic[row] = sj;
      stat[sj] = kBasic;
      lb[aj] = ub[aj] = 0.0;
      stat[aj] = kAtLower;
      xB[row] = r[row];
    } else {
      double sv = r[row] > ub[sj] ? ub[sj] : lb[sj];
      stat[sj] = r[row] > ub[sj] ? kAtUpper : kAtLower;
      double d = r[row] - sv;
      basic[row] = aj;
      stat[aj] = kBasic;
      lb[aj] = std::min(d, 0.0);
      ub[aj] = std::max(d, 0.0);
      pcost[aj] = d > 0.0 ? 1.0 : -1.0;
      xB[row] = d;
    }
  }
  // B is the identity.
  std::fill(binv.begin(), binv.end(), 0.0);
  for (int i = 0; i < m; ++i) binv[static_cast<std::size_t>(i) * m + i] = 1.0;
  pivots_since_refactor = 0;
  degenerate_run = 0;
  bland = false;
}

LpStatus SimplexSolver::solve() {
  Impl& s = *impl_;
  s.iters = 0;
  s.have_solution = false;
  s.setup_initial_basis();

  // Phase 1: drive the artificial variables to zero.
  LpStatus st = s.primal_loop();
  if (st != LpStatus::kOptimal) return st;
  double infeas = 0.0;
  for (int i = 0; i < s.m; ++i)
    if (s.basic[i] >= s.n + s.m) infeas += std::abs(s.xB[i]);
  // Artificials may also end phase 1 nonbasic at a nonzero bound.
  for (int row = 0; row < s.m; ++row) {
    int aj = s.art_col(row);
    if (s.stat[aj] != kBasic) infeas += std::abs(s.nb_value(aj));
  }
  double scale = 1.0;
  for (double b : s.rhs) scale = std::max(scale, std::abs(b));
  if (infeas > s.opts.feas_tol * scale * 10.0) return LpStatus::kInfeasible;

  // Pin artificials and switch to the true objective.
  for (int row = 0; row < s.m; ++row) {
    int aj = s.art_col(row);
    s.lb[aj] = s.ub[aj] = 0.0;
    if (s.stat[aj] != kBasic) s.stat[aj] = kAtLower;
  }
  s.pcost = s.obj;
  s.bland = false;
  s.degenerate_run = 0;
  st = s.primal_loop();
  if (st == LpStatus::kOptimal) s.have_solution = true;
  return st;
}

void SimplexSolver::set_bounds(int var, double lower, double upper) {
  Impl& s = *impl_;
  s.lb[var] = lower;
  s.ub[var] = upper;
  if (s.stat[var] == kAtLower && lower == -kInf) s.stat[var] = kAtUpper;
  if (s.stat[var] == kAtUpper && upper == kInf) s.stat[var] = kAtLower;
}

LpStatus SimplexSolver::resolve_dual() {
  Impl& s = *impl_;
  LpStatus st = s.dual_loop();
  if (st != LpStatus::kOptimal) return st;
  // Dual pass ends primal feasible; a short primal pass certifies
  // optimality (usually zero iterations).
  st = s.primal_loop();
  s.have_solution = st == LpStatus::kOptimal;
  return st;
}

LpStatus SimplexSolver::Impl::dual_loop() {
  compute_xB();
  long start = iters;
  while (iters - start < opts.max_iters) {
    // Most-violated basic variable leaves.
    int r = -1;
    double worst = opts.feas_tol;
    int sigma = 0;
    for (int i = 0; i < m; ++i) {
      int bj = basic[i];
      double over = xB[i] - ub[bj];
      double under = lb[bj] - xB[i];
      if (over > worst) {
        worst = over;
        r = i;
        sigma = +1;
      }
      if (under > worst) {
        worst = under;
        r = i;
        sigma = -1;
      }
    }
    if (r < 0) return LpStatus::kOptimal;

    compute_y();
    // Row r of binv.
    std::vector<double>& rho = scratch;
    for (int c = 0; c < m; ++c)
      rho[c] = binv[static_cast<std::size_t>(c) * m + r];

    int q = -1;
    double best_ratio = kInf;
    double q_alpha = 0.0;
    for (int j = 0; j < ncols; ++j) {
      if (stat[j] == kBasic || lb[j] == ub[j]) continue;
      double aj = 0.0;
      for (int a = col_start[j]; a < col_start[j + 1]; ++a)
        aj += rho[col_row[a]] * col_val[a];
      if (std::abs(aj) <= kPivotTol) continue;
      bool eligible =
          stat[j] == kAtLower ? (sigma > 0 ? aj > 0.0 : aj < 0.0)
                              : (sigma > 0 ? aj < 0.0 : aj > 0.0);
      if (!eligible) continue;
      double d = pcost[j];
      for (int a = col_start[j]; a < col_start[j + 1]; ++a)
        d -= y[col_row[a]] * col_val[a];
      double ratio = std::abs(d) / std::abs(aj);
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 &&
           (q < 0 || std::abs(aj) > std::abs(q_alpha)))) {
        best_ratio = ratio;
        q = j;
        q_alpha = aj;
      }
    }
    if (q < 0) return LpStatus::kInfeasible;

    ftran(q, alpha);
    int bj = basic[r];
    double target = sigma > 0 ? ub[bj] : lb[bj];
    double change = target - xB[r];
    double move = -change / alpha[r];  // signed move of the entering variable
    double entering_value = nb_value(q) + move;
    for (int i = 0; i < m; ++i) xB[i] -= alpha[i] * move;
    ++iters;
    pivot(q, r, entering_value, sigma > 0 ? kAtUpper : kAtLower);
  }
  return LpStatus::kIterLimit;
}

double SimplexSolver::objective() const {
  const Impl& s = *impl_;
  double total = 0.0;
  for (int i = 0; i < s.m; ++i) {
    int j = s.basic[i];
    if (j < s.n && s.obj[j] != 0.0) total += s.obj[j] * s.xB[i];
  }
  for (int j = 0; j < s.n; ++j)
    if (s.stat[j] != kBasic && s.obj[j] != 0.0)
      total += s.obj[j] * s.nb_value(j);
  return total;
}

LpSolution SimplexSolver::extract(LpStatus status) const {
  Impl& s = *impl_;
  LpSolution out;
  out.status = status;
  out.x.assign(s.n, 0.0);
  out.duals.assign(s.m, 0.0);
  out.reduced_costs.assign(s.n, 0.0);
  if (status != LpStatus::kOptimal && status != LpStatus::kIterLimit)
    return out;
  for (int i = 0; i < s.m; ++i)
    if (s.basic[i] < s.n) out.x[s.basic[i]] = s.xB[i];
  for (int j = 0; j < s.n; ++j)
    if (s.stat[j] != kBasic) out.x[j] = s.nb_value(j);
  s.pcost = s.obj;
  s.compute_y();
  out.duals = s.y;
  for (int j = 0; j < s.n; ++j) {
    double d = s.obj[j];
    for (int a = s.col_start[j]; a < s.col_start[j + 1]; ++a)
      d -= s.y[s.col_row[a]] * s.col_val[a];
    out.reduced_costs[j] = d;
  }
  out.objective = objective();
  return out;
}

std::shared_ptr<const SimplexSolver::Basis> SimplexSolver::save_basis() const {
  auto b = std::make_shared<Basis>();
  b->basic = impl_->basic;
  b->stat = impl_->stat;
  return b;
}

void SimplexSolver::load_basis(const Basis& basis) {
  Impl& s = *impl_;
  s.basic = basis.basic;
  s.stat = basis.stat;
  if (!s.refactorize()) {
    // Degenerate snapshot (should not happen); rebuild from scratch.
    s.setup_initial_basis();
    s.pcost = s.obj;
  }
  s.compute_xB();
}

long SimplexSolver::iterations() const { return impl_->iters; }

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& opts) {
  SimplexSolver solver(lp, opts);
  LpStatus st = solver.solve();
  return solver.extract(st);
}

}  // namespace drrp
