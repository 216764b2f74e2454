#include "drrp/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <utility>

#include "drrp/rng.hpp"
#include "drrp/simplex.hpp"

namespace drrp {

namespace {

// Shared routing/action skeleton: z and b flows on the RV graph, y at the
// actionable stations, vehicle-capacity coupling b <= b_cap * z.
struct Skeleton {
  std::map<EdgeStep, int> z_var, b_var;
  std::map<ActionSlot, int> yp_var, ym_var;
};

Skeleton add_routing_core(const NetworkInstance& inst, LinearProgram& lp) {
  Skeleton sk;
  const int T = inst.horizon_T;
  const double z_cap = inst.fleet_size;
  const double b_cap =
      static_cast<double>(inst.rv_capacity) * inst.fleet_size;
  const double y_cap = inst.max_load_action;

  for (int t = 1; t <= T; ++t) {
    for (const auto& [i, j] : inst.rv_edges) {
      sk.z_var[{i, j, t}] =
          lp.add_var(0.0, z_cap, inst.move_cost(i, j, t).dollars());
      sk.b_var[{i, j, t}] = lp.add_var(0.0, b_cap, 0.0);
    }
  }
  for (NodeId i : inst.action_nodes()) {
    for (int t = 1; t <= T; ++t) {
      double r = inst.unload_load_cost(i, t).dollars();
      sk.yp_var[{i, t}] = lp.add_var(0.0, y_cap, r);
      sk.ym_var[{i, t}] = lp.add_var(0.0, y_cap, r);
    }
  }

  std::set<NodeId> actionable;
  for (NodeId n : inst.action_nodes()) actionable.insert(n);

  for (int t = 1; t <= T; ++t) {
    for (NodeId i : inst.rv_nodes) {
      // RV conservation.
      double z0 = 0.0, b0 = 0.0;
      int zr = lp.add_row(RowSense::kEq, 0.0);
      int br = lp.add_row(RowSense::kEq, 0.0);
      for (const auto& [a, b] : inst.rv_edges) {
        if (a == i) {
          lp.add_entry(zr, sk.z_var[{a, b, t}], 1.0);
          lp.add_entry(br, sk.b_var[{a, b, t}], 1.0);
        }
        if (b == i) {
          if (t == 1) {
            auto it = inst.initial_rv_position.find(Edge{a, b});
            if (it != inst.initial_rv_position.end()) z0 += it->second;
            auto ib = inst.initial_onboard.find(Edge{a, b});
            if (ib != inst.initial_onboard.end()) b0 += ib->second;
          } else {
            lp.add_entry(zr, sk.z_var[{a, b, t - 1}], -1.0);
            lp.add_entry(br, sk.b_var[{a, b, t - 1}], -1.0);
          }
        }
      }
      lp.rhs[zr] = z0;
      lp.rhs[br] = b0;
      if (actionable.count(i)) {
        lp.add_entry(br, sk.yp_var[{i, t}], -1.0);
        lp.add_entry(br, sk.ym_var[{i, t}], 1.0);
      }
    }
    // Onboard SVs fit in the vehicles present on each edge.
    for (const auto& [i, j] : inst.rv_edges) {
      int vr = lp.add_row(RowSense::kLe, 0.0);
      lp.add_entry(vr, sk.b_var[{i, j, t}], 1.0);
      lp.add_entry(vr, sk.z_var[{i, j, t}],
                   -static_cast<double>(inst.rv_capacity));
    }
  }
  return sk;
}

RebalancePlan extract_plan(const Skeleton& sk, const std::vector<double>& x) {
  RebalancePlan plan;
  auto put = [&x](auto& dst, const auto& vars) {
    for (const auto& [key, var] : vars) {
      int v = static_cast<int>(std::lround(x[var]));
      if (v != 0) dst[key] = v;
    }
  };
  put(plan.z, sk.z_var);
  put(plan.b, sk.b_var);
  put(plan.y_plus, sk.yp_var);
  put(plan.y_minus, sk.ym_var);
  return plan;
}

void canonicalize_actions(RebalancePlan& plan) {
  // Keep only the net load/unload per slot; the difference (and thus
  // every conservation constraint) is unchanged and the cost never grows.
  std::set<ActionSlot> slots;
  for (const auto& [s, v] : plan.y_plus) slots.insert(s);
  for (const auto& [s, v] : plan.y_minus) slots.insert(s);
  for (const auto& s : slots) {
    int yp = plan.yp(s.i, s.t);
    int ym = plan.ym(s.i, s.t);
    int m = std::min(yp, ym);
    if (m <= 0) continue;
    if (yp - m > 0)
      plan.y_plus[s] = yp - m;
    else
      plan.y_plus.erase(s);
    if (ym - m > 0)
      plan.y_minus[s] = ym - m;
    else
      plan.y_minus.erase(s);
  }
}

void check_actions_have_vehicles(const NetworkInstance& inst,
                                 const RebalancePlan& plan,
                                 std::vector<std::string>* warnings) {
  for (const auto* ymap : {&plan.y_plus, &plan.y_minus}) {
    for (const auto& [slot, v] : *ymap) {
      if (v <= 0) continue;
      long present = 0;
      for (const auto& [a, b] : inst.rv_edges) {
        if (b != slot.i) continue;
        if (slot.t == 1) {
          auto it = inst.initial_rv_position.find(Edge{a, b});
          if (it != inst.initial_rv_position.end()) present += it->second;
        } else {
          present += plan.zv(a, b, slot.t - 1);
        }
      }
      if (present == 0)
        warnings->push_back("action at station " + std::to_string(slot.i) +
                            ", step " + std::to_string(slot.t) +
                            " with no vehicle present");
    }
  }
}

// Exact dynamic program for the single-vehicle integer problem. With one
// vehicle the routing is a path through the time-expanded RV graph, the
// onboard load is a scalar in [0, rv_capacity], and the objective separates
// across steps, so a state of (node, step, onboard load) captures everything.
// Returns nothing when the instance does not fit the single-path shape; the
// caller then falls back to the general branch-and-bound.
std::optional<Stage1Result> solve_stage1_single_vehicle(
    const NetworkInstance& inst, const ValueFunctionApprox& vfa) {
  if (inst.fleet_size != 1) return std::nullopt;
  Edge start{-1, -1};
  long placed = 0;
  for (const auto& [e, c] : inst.initial_rv_position) {
    placed += c;
    if (c == 1) start = e;
  }
  if (placed != 1 || start.second < 0) return std::nullopt;
  int b0 = 0;
  for (const auto& [e, c] : inst.initial_onboard) {
    if (c == 0) continue;
    if (e != start) return std::nullopt;  // stock away from the vehicle
    b0 += static_cast<int>(c);
  }
  const int b_cap = inst.rv_capacity;
  if (b0 < 0 || b0 > b_cap) return std::nullopt;

  const int T = inst.horizon_T;
  const int yb = vfa.y_bar;
  const int a_max = std::min(yb, inst.max_load_action);
  std::map<NodeId, int> node_index;
  for (NodeId n : inst.rv_nodes)
    node_index.emplace(n, static_cast<int>(node_index.size()));
  const int N = static_cast<int>(node_index.size());
  if (!node_index.count(start.second)) return std::nullopt;
  std::vector<std::vector<int>> out(N);  // node -> indices into rv_edges
  for (std::size_t e = 0; e < inst.rv_edges.size(); ++e) {
    if (!node_index.count(inst.rv_edges[e].second)) return std::nullopt;
    out[node_index.at(inst.rv_edges[e].first)].push_back(
        static_cast<int>(e));
  }
  std::set<NodeId> actionable;
  for (NodeId n : inst.action_nodes()) actionable.insert(n);

  // Net-action value from the slope prefix sums: positive nets take the
  // up-segments th[yb .. yb+a-1], negative nets the down-segments.
  auto net_value = [&](const std::vector<double>& th, int a) {
    double v = 0.0;
    for (int k = 0; k < a; ++k) v += th[yb + k];
    for (int k = a; k < 0; ++k) v -= th[yb + k];
    return v;
  };

  const double kInf = std::numeric_limits<double>::infinity();
  const int loads = b_cap + 1;
  // cost[t][n][beta]: best cost from step t onward, arriving at node n with
  // onboard load beta. choice stores (net action, chosen edge).
  std::vector<std::vector<double>> cost(T + 2,
                                        std::vector<double>(N * loads, kInf));
  std::vector<std::vector<std::pair<int, int>>> choice(
      T + 1, std::vector<std::pair<int, int>>(N * loads, {0, -1}));
  for (int s = 0; s < N * loads; ++s) cost[T + 1][s] = 0.0;

  for (int t = T; t >= 1; --t) {
    for (const auto& [node, n] : node_index) {
      const bool can_act = actionable.count(node) != 0;
      const double r = inst.unload_load_cost(node, t).dollars();
      std::vector<double> th;
      if (can_act) th = vfa.slopes_for(node, t);
      // Cheapest continuation per resulting load, shared by all actions.
      std::vector<double> go(loads, kInf);
      std::vector<int> go_edge(loads, -1);
      for (int e : out[n]) {
        const auto& [u, v] = inst.rv_edges[e];
        double mc = inst.move_cost(u, v, t).dollars();
        int m = node_index.at(v);
        for (int beta = 0; beta < loads; ++beta) {
          double c = mc + cost[t + 1][m * loads + beta];
          if (c < go[beta]) {
            go[beta] = c;
            go_edge[beta] = e;
          }
        }
      }
      for (int beta = 0; beta < loads; ++beta) {
        double best = kInf;
        std::pair<int, int> pick{0, -1};
        const int lo = can_act ? -a_max : 0;
        const int hi = can_act ? a_max : 0;
        for (int a = lo; a <= hi; ++a) {
          int after = beta - a;  // net a = unload - load
          if (after < 0 || after > b_cap) continue;
          if (go_edge[after] < 0) continue;
          double c = go[after];
          if (a != 0) c += r * std::abs(a) + net_value(th, a);
          if (c < best) {
            best = c;
            pick = {a, go_edge[after]};
          }
        }
        cost[t][n * loads + beta] = best;
        choice[t][n * loads + beta] = pick;
      }
    }
  }

  const int n0 = node_index.at(start.second);
  if (!std::isfinite(cost[1][n0 * loads + b0])) return std::nullopt;

  Stage1Result res;
  res.status = LpStatus::kOptimal;
  res.objective = cost[1][n0 * loads + b0];
  int n = n0, beta = b0;
  for (int t = 1; t <= T; ++t) {
    auto [a, e] = choice[t][n * loads + beta];
    NodeId node = inst.rv_edges[e].first;
    if (a > 0) res.plan.y_minus[{node, t}] = a;
    if (a < 0) res.plan.y_plus[{node, t}] = -a;
    if (a != 0) res.raw_net[{node, t}] = a;
    beta -= a;
    res.plan.z[{node, inst.rv_edges[e].second, t}] = 1;
    if (beta > 0) res.plan.b[{node, inst.rv_edges[e].second, t}] = beta;
    n = node_index.at(inst.rv_edges[e].second);
  }
  return res;
}

}  // namespace

Stage1Build build_stage1(const NetworkInstance& inst,
                         const ValueFunctionApprox& vfa) {
  Stage1Build out;
  out.y_bar = vfa.y_bar;
  Skeleton sk = add_routing_core(inst, out.lp);
  out.z_var = std::move(sk.z_var);
  out.b_var = std::move(sk.b_var);
  out.yp_var = std::move(sk.yp_var);
  out.ym_var = std::move(sk.ym_var);

  // Approximate value of the net action x = y- - y+, encoded exactly by
  // unit-capacity segment variables: x is split into up-segments (cost =
  // slope) and down-segments (cost = -slope), and convexity of the slopes
  // makes the cheapest split the correct one.
  const int yb = vfa.y_bar;
  for (const auto& [slot, ypv] : out.yp_var) {
    std::vector<double> th = vfa.slopes_for(slot.i, slot.t);
    int base = -1;
    int link = out.lp.add_row(RowSense::kEq, 0.0);
    out.lp.add_entry(link, out.ym_var[slot], 1.0);
    out.lp.add_entry(link, ypv, -1.0);
    for (int k = 0; k < 2 * yb; ++k) {
      int yprime = k - yb;
      double cost = yprime >= 0 ? th[k] : -th[k];
      int v = out.lp.add_var(0.0, 1.0, cost);
      if (base < 0) base = v;
      out.lp.add_entry(link, v, yprime >= 0 ? -1.0 : 1.0);
    }
    out.seg_var[slot] = base;
  }
  return out;
}

Stage1Result solve_stage1(const NetworkInstance& inst,
                          const ValueFunctionApprox& vfa, Stage1Mode mode,
                          double rel_gap, double time_limit_s,
                          const RebalancePlan* fixed_z) {
  if (mode == Stage1Mode::kInteger) {
    // Single-vehicle instances admit an exact path dynamic program that is
    // orders of magnitude faster than branch and bound.
    if (auto dp = solve_stage1_single_vehicle(inst, vfa)) return *dp;
  }
  Stage1Build m = build_stage1(inst, vfa);
  Stage1Result res;

  const int half = (inst.horizon_T + 1) / 2;
  bool any_int = false;
  auto mark = [&](int var) {
    m.lp.is_integer[var] = 1;
    any_int = true;
  };
  // Only the routing variables need explicit integrality: with z fixed at
  // integers the remaining system is a network flow with integer data, so
  // a basic optimum of its LP is automatically integral. The solve below
  // therefore branches on z alone and recovers (b, y) from a fixed-z
  // re-solve.
  switch (mode) {
    case Stage1Mode::kInteger:
    case Stage1Mode::kHalfInteger:
      for (const auto& [key, var] : m.z_var)
        if (mode == Stage1Mode::kInteger || std::get<2>(key) <= half)
          mark(var);
      break;
    case Stage1Mode::kRelaxed:
      break;
    case Stage1Mode::kFixedZFlow: {
      for (const auto& [key, var] : m.z_var) {
        double v = fixed_z ? fixed_z->zv(std::get<0>(key), std::get<1>(key),
                                         std::get<2>(key))
                           : 0.0;
        m.lp.lb[var] = v;
        m.lp.ub[var] = v;
      }
      break;
    }
  }

  std::vector<double> x;
  if (any_int) {
    MipOptions mo;
    mo.rel_gap = rel_gap;
    mo.time_limit_s = time_limit_s;
    MipResult r = solve_mip(m.lp, mo);
    res.status = r.status;
    res.timed_out = r.timed_out;
    if (r.status != LpStatus::kOptimal && r.status != LpStatus::kTimeLimit)
      return res;
    if (r.x.empty()) return res;
    res.objective = r.objective;
    x = std::move(r.x);
    // Pin the integral routing and re-solve to land on a basic (and hence
    // integral, for fully integral z) optimum in the remaining variables.
    LinearProgram fixed = m.lp;
    for (const auto& [key, var] : m.z_var) {
      if (!fixed.is_integer[var]) continue;
      double v = std::round(x[var]);
      fixed.lb[var] = v;
      fixed.ub[var] = v;
      fixed.is_integer[var] = 0;
    }
    LpSolution clean = solve_lp(fixed);
    if (clean.status == LpStatus::kOptimal) x = std::move(clean.x);
  } else {
    LpSolution s = solve_lp(m.lp);
    res.status = s.status;
    if (s.status != LpStatus::kOptimal) return res;
    res.objective = s.objective;
    x = std::move(s.x);
    if (mode == Stage1Mode::kRelaxed) {
      bool fractional = false;
      for (double v : x)
        if (std::abs(v - std::round(v)) > 1e-6) fractional = true;
      if (fractional)
        res.warnings.push_back(
            "relaxed solution rounded componentwise for plan output");
    }
  }

  res.plan = extract_plan(
      {m.z_var, m.b_var, m.yp_var, m.ym_var}, x);
  canonicalize_actions(res.plan);
  check_actions_have_vehicles(inst, res.plan, &res.warnings);
  for (const auto& [slot, ypv] : m.yp_var) {
    double net = x[m.ym_var.at(slot)] - x[ypv];
    if (net != 0.0) res.raw_net[slot] = net;
  }
  return res;
}

namespace {

// Variables and constant offsets of the journey-realization block shared
// by the monolithic model and its LP bound.
void add_demand_block(const NetworkInstance& inst,
                      const DemandScenario& scenario, const Skeleton& sk,
                      LinearProgram& lp, bool integer_marks) {
  const int T = inst.horizon_T;
  std::map<std::pair<NodeId, int>, int> fill_row;  // (i,t) -> row
  std::map<ActionSlot, int> d_var;

  std::set<NodeId> actionable;
  for (NodeId n : inst.action_nodes()) actionable.insert(n);

  for (NodeId i : inst.sv_nodes) {
    double dbar = inst.capacity(i);
    for (int t = 1; t <= T; ++t)
      d_var[{i, t}] = lp.add_var(0.0, dbar, 0.0);
  }
  for (NodeId i : inst.sv_nodes) {
    for (int t = 1; t <= T; ++t) {
      int row = lp.add_row(RowSense::kEq, 0.0);
      fill_row[{i, t}] = row;
      lp.add_entry(row, d_var[{i, t}], 1.0);
      if (t > 1)
        lp.add_entry(row, d_var[{i, t - 1}], -1.0);
      else
        lp.rhs[row] += inst.fill0(i);
      if (actionable.count(i)) {
        auto yp = sk.yp_var.find({i, t});
        auto ym = sk.ym_var.find({i, t});
        if (yp != sk.yp_var.end()) lp.add_entry(row, yp->second, -1.0);
        if (ym != sk.ym_var.end()) lp.add_entry(row, ym->second, 1.0);
      }
    }
  }

  for (const auto& trip : inst.in_progress_trips) {
    int arrive = trip.t + trip.k;
    if (arrive >= 1 && arrive <= T)
      lp.rhs[fill_row[{trip.j, arrive}]] += trip.count;
  }

  for (const auto& [key, slopes] : scenario.entries) {
    for (Money val : slopes) {
      int w = lp.add_var(0.0, 1.0, -val.dollars(), integer_marks);
      // Departure consumes an SV at (i,t); arrival returns one at
      // (j,t+k) when it lands inside the horizon.
      lp.add_entry(fill_row[{key.i, key.t}], w, -1.0);
      int arrive = key.t + key.k;
      if (arrive <= T) lp.add_entry(fill_row[{key.j, arrive}], w, 1.0);
    }
  }
}

}  // namespace

Stage1Result solve_deterministic_drrp(const NetworkInstance& inst,
                                      const DemandScenario& scenario,
                                      double rel_gap, double time_limit_s) {
  LinearProgram lp;
  Skeleton sk = add_routing_core(inst, lp);
  // As in solve_stage1, integrality on the routing suffices: for fixed
  // integral z the rest of the model is a pure network flow.
  for (const auto& [key, var] : sk.z_var) lp.is_integer[var] = 1;
  add_demand_block(inst, scenario, sk, lp, false);

  MipOptions mo;
  mo.rel_gap = rel_gap;
  mo.time_limit_s = time_limit_s;
  MipResult r = solve_mip(lp, mo);

  Stage1Result res;
  res.status = r.status;
  res.timed_out = r.timed_out;
  if (r.x.empty()) return res;
  res.objective = r.objective + scenario.total_value().dollars();

  LinearProgram fixed = lp;
  for (const auto& [key, var] : sk.z_var) {
    double v = std::round(r.x[var]);
    fixed.lb[var] = v;
    fixed.ub[var] = v;
    fixed.is_integer[var] = 0;
  }
  LpSolution clean = solve_lp(fixed);
  if (clean.status == LpStatus::kOptimal) r.x = std::move(clean.x);
  res.plan = extract_plan(sk, r.x);
  canonicalize_actions(res.plan);
  check_actions_have_vehicles(inst, res.plan, &res.warnings);
  return res;
}

double deterministic_drrp_lp_bound(const NetworkInstance& inst,
                                   const DemandScenario& scenario,
                                   LpStatus* status) {
  LinearProgram lp;
  Skeleton sk = add_routing_core(inst, lp);
  add_demand_block(inst, scenario, sk, lp, false);
  LpSolution s = solve_lp(lp);
  if (status) *status = s.status;
  return s.objective + scenario.total_value().dollars();
}

RebalancePlan random_plan(const NetworkInstance& inst, std::uint64_t seed,
                          std::uint64_t substream) {
  RngStream rng(seed, RngStreamId::kRandomActions, substream);
  RebalancePlan plan;
  const int yb = inst.max_load_action;
  for (NodeId i : inst.action_nodes()) {
    for (int t = 1; t <= inst.horizon_T; ++t) {
      int net = rng.uniform_int(-yb, yb);  // net unload
      if (net > 0)
        plan.y_minus[{i, t}] = net;
      else if (net < 0)
        plan.y_plus[{i, t}] = -net;
    }
  }
  return plan;
}

}  // namespace drrp
