#include "drrp/stage2.hpp"

#include <stdexcept>

#include "drrp/simplex.hpp"

namespace drrp {

Stage2Network build_stage2_network(const NetworkInstance& inst,
                                   const DemandScenario& scenario,
                                   const RebalancePlan& plan) {
  Stage2Network net;
  FlowProblem& fp = net.problem;
  const int T = inst.horizon_T;

  for (NodeId i : inst.sv_nodes)
    for (int t = 1; t <= T; ++t)
      net.station_node[{i, t}] = fp.add_node();
  net.sink = fp.add_node();

  auto node_or_sink = [&](NodeId i, int t) {
    if (t > T) return net.sink;
    auto it = net.station_node.find({i, t});
    return it == net.station_node.end() ? net.sink : it->second;
  };

  // Horizontal fill arcs: flow on the (i,t) arc equals the fill d_i^t.
  for (NodeId i : inst.sv_nodes) {
    int cap = inst.capacity(i);
    for (int t = 1; t <= T; ++t) {
      int from = net.station_node[{i, t}];
      int to = t < T ? net.station_node[{i, t + 1}] : net.sink;
      net.fill_arc[{i, t}] = fp.add_arc(from, to, cap, 0);
    }
  }

  // One unit arc per realized journey; cost = negated journey value, so
  // the most valuable journeys are served first.
  std::int64_t total_demand = 0;
  for (const auto& [key, slopes] : scenario.entries) {
    int from = net.station_node.at({key.i, key.t});
    int to = node_or_sink(key.j, key.t + key.k);
    int first = static_cast<int>(fp.arcs.size());
    for (Money v : slopes) {
      fp.add_arc(from, to, 1, -v.micros());
      net.offset += v;
    }
    net.journey_arcs[key] = {first, static_cast<int>(fp.arcs.size())};
    total_demand += static_cast<std::int64_t>(slopes.size());
  }

  // Node supplies per the cumulative fill identity: the first step injects
  // the initial fill; each step injects the net unload y- - y+.
  for (NodeId i : inst.sv_nodes) {
    for (int t = 1; t <= T; ++t) {
      std::int64_t s = plan.ym(i, t) - plan.yp(i, t);
      if (t == 1) s += inst.fill0(i);
      fp.supply[net.station_node[{i, t}]] += s;
    }
  }

  // Journeys fixed in progress at t = 0 arrive as plain supplies.
  std::int64_t in_progress_total = 0;
  for (const auto& trip : inst.in_progress_trips) {
    int arrive = trip.t + trip.k;
    fp.supply[node_or_sink(trip.j, arrive)] += trip.count;
    in_progress_total += trip.count;
  }

  // Penalty arcs: create (sink -> node) or destroy (node -> sink) SVs at
  // cost r_p. The capacity is a loose but finite bound on any imbalance
  // the plan and scenario could produce.
  std::int64_t y_total = 0;
  for (const auto& [slot, v] : plan.y_plus) y_total += v;
  for (const auto& [slot, v] : plan.y_minus) y_total += v;
  std::int64_t d0_total = 0;
  for (NodeId i : inst.sv_nodes) d0_total += inst.fill0(i);
  std::int64_t pen_cap = total_demand + in_progress_total + d0_total +
                         y_total +
                         static_cast<std::int64_t>(inst.rv_capacity) *
                             inst.fleet_size;
  std::int64_t rp = inst.feasibility_penalty.micros();
  for (NodeId i : inst.sv_nodes) {
    for (int t = 1; t <= T; ++t) {
      int node = net.station_node[{i, t}];
      int in_arc = fp.add_arc(net.sink, node, pen_cap, rp);
      int out_arc = fp.add_arc(node, net.sink, pen_cap, rp);
      net.penalty_arcs[{i, t}] = {in_arc, out_arc};
    }
  }

  // The sink absorbs whatever the stations inject.
  std::int64_t balance = 0;
  for (int v = 0; v < fp.num_nodes; ++v)
    if (v != net.sink) balance += fp.supply[v];
  fp.supply[net.sink] = -balance;

  return net;
}

Stage2Solution solve_stage2(const NetworkInstance& inst,
                            const DemandScenario& scenario,
                            const RebalancePlan& plan) {
  Stage2Network net = build_stage2_network(inst, scenario, plan);
  FlowSolution fs = solve_flow(net.problem);
  if (fs.status != FlowStatus::kOptimal)
    throw std::logic_error("penalized second stage reported infeasible");

  Stage2Solution out;
  out.cost = Money::from_micros(fs.total_cost) + net.offset;

  for (const auto& [key, range] : net.journey_arcs) {
    int w = 0;
    for (int a = range.first; a < range.second; ++a)
      w += static_cast<int>(fs.flow[a]);
    if (w > 0) out.served[key] = w;
  }
  for (const auto& [slot, arcs] : net.penalty_arcs) {
    int pp = static_cast<int>(fs.flow[arcs.first]);
    int pm = static_cast<int>(fs.flow[arcs.second]);
    if (pp > 0 || pm > 0) out.penalties[slot] = {pp, pm};
  }
  for (const auto& [slot, arc] : net.fill_arc) {
    Money up = Money::from_micros(fs.lambda_upper(net.problem, arc));
    Money lo = Money::from_micros(fs.lambda_lower(net.problem, arc));
    out.duals[slot] = {up, lo};
  }
  return out;
}

Stage2Estimate estimate_stage2_fractional(
    const NetworkInstance& inst, const DemandScenario& scenario,
    const std::map<ActionSlot, double>& net_action) {
  Stage2Network net = build_stage2_network(inst, scenario, RebalancePlan{});
  LinearProgram lp = flow_to_lp(net.problem, 1e-6);
  // flow_to_lp lays out one equality row per node; shift the supplies by
  // the fractional nets and let the sink absorb the total.
  double total = 0.0;
  for (const auto& [slot, a] : net_action) {
    auto it = net.station_node.find({slot.i, slot.t});
    if (it == net.station_node.end()) continue;
    lp.rhs[it->second] += a;
    total += a;
  }
  lp.rhs[net.sink] -= total;

  LpSolution s = solve_lp(lp);
  Stage2Estimate out;
  out.status = s.status;
  if (s.status != LpStatus::kOptimal) return out;
  out.cost = s.objective + net.offset.dollars();
  for (const auto& [key, range] : net.journey_arcs)
    for (int a = range.first; a < range.second; ++a) out.served += s.x[a];
  long demand = scenario.total_demand();
  out.service_rate =
      demand == 0 ? 1.0 : out.served / static_cast<double>(demand);
  return out;
}

double service_rate(const DemandScenario& scenario,
                    const Stage2Solution& solution) {
  long f = scenario.total_demand();
  if (f == 0) return 1.0;
  return static_cast<double>(solution.total_served()) /
         static_cast<double>(f);
}

}  // namespace drrp
