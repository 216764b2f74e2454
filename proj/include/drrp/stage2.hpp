#pragma once

#include <map>
#include <utility>

#include "drrp/instance.hpp"
#include "drrp/linear_program.hpp"
#include "drrp/min_cost_flow.hpp"

namespace drrp {

/// The second-stage journey-realization problem as a min-cost flow on the
/// time-expanded station graph, with per-(i,t) penalty arcs that create or
/// destroy SVs at cost r_p so the problem is always feasible.
struct Stage2Network {
  FlowProblem problem;
  int sink = 0;

  // (station, step) -> flow node; step runs 1..T.
  std::map<std::pair<NodeId, int>, int> station_node;
  // Demand tuple -> [first, last) range of its unit journey arcs, one per
  // realized journey, costs = negated journey values.
  std::map<DemandKey, std::pair<int, int>> journey_arcs;
  // (i,t) -> the horizontal fill arc whose flow equals d_i^t.
  std::map<ActionSlot, int> fill_arc;
  // (i,t) -> (creation arc p+, destruction arc p-).
  std::map<ActionSlot, std::pair<int, int>> penalty_arcs;

  // Cost of serving nobody, sum of all journey values; reported loss =
  // flow cost + offset.
  Money offset;
};

/// Builds the flow network for (instance, scenario) at the plan's load and
/// unload actions y. Only y enters the second stage.
Stage2Network build_stage2_network(const NetworkInstance& instance,
                                   const DemandScenario& scenario,
                                   const RebalancePlan& plan);

/// Solves the second stage exactly. cost is in the loss convention
/// (unserved value plus penalties); duals are the multipliers of the fill
/// bounds 0 <= d_i^t <= d_bar_i, indexed by (i,t).
Stage2Solution solve_stage2(const NetworkInstance& instance,
                            const DemandScenario& scenario,
                            const RebalancePlan& plan);

/// Completed journeys over total demand; 1 when the scenario is empty.
double service_rate(const DemandScenario& scenario,
                    const Stage2Solution& solution);

/// Second-stage estimate at fractional net actions y- - y+ per slot,
/// evaluated through the LP form of the flow problem with shifted node
/// supplies. Used to score relaxed first-stage iterates without rounding
/// them to implementable plans.
struct Stage2Estimate {
  LpStatus status = LpStatus::kIterLimit;
  double cost = 0.0;          // dollars, loss convention
  double served = 0.0;        // possibly fractional journeys
  double service_rate = 1.0;  // served / demand, 1 for empty scenarios
};
Stage2Estimate estimate_stage2_fractional(
    const NetworkInstance& instance, const DemandScenario& scenario,
    const std::map<ActionSlot, double>& net_action);

}  // namespace drrp
