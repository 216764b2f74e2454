#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <queue>
#include <vector>

#include "drrp/simplex.hpp"

namespace drrp {

namespace {

using Clock = std::chrono::steady_clock;

struct BoundChange {
  int var = 0;
  double lb = 0.0;
  double ub = 0.0;
};

struct Node {
  double bound = 0.0;  // parent LP objective, a valid lower bound
  long id = 0;
  int branch_var = -1;    // variable branched to create this node
  double branch_frac = 0.0;  // fractional distance rounded away
  std::shared_ptr<const std::vector<BoundChange>> changes;
  std::shared_ptr<const SimplexSolver::Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

// Per-variable average objective degradation per unit of rounded-away
// fraction, kept separately for the down and up branches.
struct Pseudocost {
  double sum_down = 0.0, sum_up = 0.0;
  int n_down = 0, n_up = 0;
};

class Brancher {
 public:
  explicit Brancher(int num_vars) : pc_(num_vars) {}

  void observe(int var, bool up, double degradation, double frac) {
    if (var < 0 || frac <= 1e-9) return;
    double unit = std::max(0.0, degradation) / frac;
    Pseudocost& p = pc_[var];
    if (up) {
      p.sum_up += unit;
      ++p.n_up;
    } else {
      p.sum_down += unit;
      ++p.n_down;
    }
    global_sum_ += unit;
    ++global_n_;
  }

  // Chooses among fractional integer variables. With no history this
  // degenerates to most-fractional selection; with history it prefers the
  // variable whose weaker branch promises the largest bound improvement.
  int pick(const std::vector<double>& x, const std::vector<int>& int_vars,
           double int_tol) const {
    const double fallback = global_n_ ? global_sum_ / global_n_ : 1.0;
    int best = -1;
    double best_score = -1.0;
    for (int j : int_vars) {
      double f = x[j] - std::floor(x[j]);
      double dist = std::min(f, 1.0 - f);
      if (dist <= int_tol) continue;
      const Pseudocost& p = pc_[j];
      double down = (p.n_down ? p.sum_down / p.n_down : fallback) * f;
      double up = (p.n_up ? p.sum_up / p.n_up : fallback) * (1.0 - f);
      double score = std::min(down, up) + 1e-3 * std::max(down, up) + dist;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

 private:
  std::vector<Pseudocost> pc_;
  double global_sum_ = 0.0;
  long global_n_ = 0;
};

int first_fractional(const std::vector<double>& x,
                     const std::vector<int>& int_vars, double int_tol) {
  for (int j : int_vars) {
    double f = x[j] - std::floor(x[j]);
    if (std::min(f, 1.0 - f) > int_tol) return j;
  }
  return -1;
}

}  // namespace

double MipResult::gap() const {
  return (objective - best_bound) / std::max(1.0, std::abs(objective));
}

MipResult solve_mip(const LinearProgram& lp, const MipOptions& opts) {
  MipResult res;
  const auto t0 = Clock::now();
  auto out_of_time = [&] {
    if (opts.time_limit_s <= 0.0) return false;
    return std::chrono::duration<double>(Clock::now() - t0).count() >
           opts.time_limit_s;
  };

  std::vector<int> int_vars;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.is_integer[j]) int_vars.push_back(j);

  SimplexSolver solver(lp, opts.lp);
  LpStatus root = solver.solve();
  if (root != LpStatus::kOptimal) {
    res.status = root;
    return res;
  }
  LpSolution root_sol = solver.extract(root);

  double incumbent = kLpInfinity;
  std::vector<double> best_x;
  double pruned_bound = kLpInfinity;  // lowest bound discarded by the gap rule
  Brancher brancher(lp.num_vars());

  // Bounds currently applied on top of the original LP.
  std::vector<int> touched;
  auto apply_changes = [&](const std::vector<BoundChange>& changes) {
    for (int v : touched) solver.set_bounds(v, lp.lb[v], lp.ub[v]);
    touched.clear();
    for (const auto& ch : changes) {
      solver.set_bounds(ch.var, ch.lb, ch.ub);
      touched.push_back(ch.var);
    }
  };

  auto accept_if_integral = [&](const std::vector<double>& x, double obj) {
    if (first_fractional(x, int_vars, opts.int_tol) >= 0) return false;
    if (obj < incumbent - 1e-12) {
      incumbent = obj;
      best_x = x;
      // Snap near-integers exactly.
      for (int j : int_vars) best_x[j] = std::round(best_x[j]);
    }
    return true;
  };

  // Rounding dive from the solver's current state: repeatedly fix the
  // first fractional variable to its nearer side and reoptimize. Runs on
  // top of whatever bound changes are already applied; the caller's
  // `touched` bookkeeping restores them on the next node. Fixing in index
  // order works well on time-staged models, where it settles early
  // decisions before the later ones that depend on them.
  auto dive = [&](std::vector<double> x) {
    for (std::size_t depth = 0; depth < int_vars.size() + 8; ++depth) {
      if (out_of_time()) return;
      int v = first_fractional(x, int_vars, opts.int_tol);
      if (v < 0) {
        accept_if_integral(x, solver.objective());
        return;
      }
      double target = std::round(x[v]);
      solver.set_bounds(v, target, target);
      touched.push_back(v);
      if (solver.resolve_dual() != LpStatus::kOptimal) return;
      x = solver.extract(LpStatus::kOptimal).x;
    }
  };

  long next_id = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  if (!int_vars.empty()) {
    if (!accept_if_integral(root_sol.x, root_sol.objective)) {
      Node n;
      n.bound = root_sol.objective;
      n.id = next_id++;
      n.changes = std::make_shared<std::vector<BoundChange>>();
      n.basis = solver.save_basis();
      open.push(n);
      dive(root_sol.x);
    }
  } else {
    incumbent = root_sol.objective;
    best_x = root_sol.x;
  }

  bool timed_out = false;
  long since_dive = 0;
  while (!open.empty()) {
    if (out_of_time()) {
      timed_out = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (incumbent < kLpInfinity &&
        incumbent - node.bound <=
            opts.rel_gap * std::max(1.0, std::abs(incumbent))) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }

    apply_changes(*node.changes);
    solver.load_basis(*node.basis);
    LpStatus st = solver.resolve_dual();
    ++res.nodes;
    if (st == LpStatus::kInfeasible) continue;
    if (st != LpStatus::kOptimal) {
      pruned_bound = std::min(pruned_bound, node.bound);
      continue;
    }
    LpSolution sol = solver.extract(st);
    if (node.branch_var >= 0) {
      bool up = (*node.changes).back().lb > lp.lb[node.branch_var];
      brancher.observe(node.branch_var, up, sol.objective - node.bound,
                       node.branch_frac);
    }
    if (incumbent < kLpInfinity &&
        incumbent - sol.objective <=
            opts.rel_gap * std::max(1.0, std::abs(incumbent))) {
      pruned_bound = std::min(pruned_bound, sol.objective);
      continue;
    }
    if (accept_if_integral(sol.x, sol.objective)) continue;

    int v = brancher.pick(sol.x, int_vars, opts.int_tol);
    double fl = std::floor(sol.x[v]);
    auto basis = solver.save_basis();
    // Child bounds inherit the tightest limits seen on this path.
    double cur_lb = lp.lb[v], cur_ub = lp.ub[v];
    for (const auto& ch : *node.changes)
      if (ch.var == v) {
        cur_lb = ch.lb;
        cur_ub = ch.ub;
      }
    for (int side = 0; side < 2; ++side) {
      BoundChange ch;
      ch.var = v;
      if (side == 0) {
        ch.lb = cur_lb;
        ch.ub = fl;
      } else {
        ch.lb = fl + 1.0;
        ch.ub = cur_ub;
      }
      if (ch.lb > ch.ub) continue;
      Node child;
      child.bound = sol.objective;
      child.id = next_id++;
      child.branch_var = v;
      child.branch_frac =
          side == 0 ? sol.x[v] - fl : fl + 1.0 - sol.x[v];
      auto changes = std::make_shared<std::vector<BoundChange>>(*node.changes);
      changes->push_back(ch);
      child.changes = std::move(changes);
      child.basis = basis;
      open.push(child);
    }

    // Refresh the incumbent with an occasional dive from this node; good
    // integer solutions let best-first search prune aggressively.
    if (++since_dive >= 25) {
      since_dive = 0;
      dive(sol.x);
    }
  }

  double open_bound = kLpInfinity;
  while (!open.empty()) {
    open_bound = std::min(open_bound, open.top().bound);
    open.pop();
  }

  res.timed_out = timed_out;
  if (incumbent < kLpInfinity) {
    res.objective = incumbent;
    res.x = best_x;
    res.best_bound = std::min({incumbent, open_bound, pruned_bound});
    res.status = timed_out ? LpStatus::kTimeLimit : LpStatus::kOptimal;
  } else {
    res.status = timed_out ? LpStatus::kTimeLimit : LpStatus::kInfeasible;
    res.best_bound = root_sol.objective;
  }
  return res;
}

}  // namespace drrp
