#pragma once

#include <compare>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "drrp/money.hpp"

namespace drrp {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;

/// Index of a potential journey: start node i, end node j, start step t,
/// duration k steps.
struct DemandKey {
  NodeId i = 0;
  NodeId j = 0;
  int t = 0;
  int k = 0;
  auto operator<=>(const DemandKey&) const = default;
};

/// Index of a load/unload action slot (station, time step).
struct ActionSlot {
  NodeId i = 0;
  int t = 0;
  auto operator<=>(const ActionSlot&) const = default;
};

using EdgeStep = std::tuple<NodeId, NodeId, int>;  // (i, j, t)

/// A journey fixed to be in progress at t = 0 (started before the horizon).
struct InProgressTrip {
  NodeId i = 0;
  NodeId j = 0;
  int t = 0;  // start step, 1-K <= t <= 0
  int k = 0;  // duration, -t < k <= K
  int count = 0;
};

/// Full deterministic problem data: both time-expanded graphs, capacities,
/// costs, fleet, and the initial state.
struct NetworkInstance {
  std::vector<NodeId> sv_nodes;
  std::vector<Edge> sv_edges;
  std::vector<NodeId> rv_nodes;
  std::vector<Edge> rv_edges;

  int horizon_T = 0;
  int max_duration_K = 0;

  std::map<NodeId, int> station_capacity;  // i -> max SVs storable
  int rv_capacity = 0;                     // SVs per RV
  int max_load_action = 0;                 // per-(i,t) load/unload cap
  int fleet_size = 0;                      // number of RVs

  // Costs are uniform in t unless an override for a specific step exists.
  std::map<Edge, Money> rv_move_cost;
  std::map<EdgeStep, Money> rv_move_cost_t;
  std::map<NodeId, Money> load_cost;
  std::map<ActionSlot, Money> load_cost_t;
  Money feasibility_penalty;  // per SV created or destroyed in stage 2

  std::map<NodeId, int> initial_fill;      // i -> SVs present at t = 0
  std::map<Edge, int> initial_rv_position; // (i,j) -> RVs on edge at t = 0
  std::map<Edge, int> initial_onboard;     // (i,j) -> SVs inside RVs at t = 0
  std::vector<InProgressTrip> in_progress_trips;

  Money move_cost(NodeId i, NodeId j, int t) const;
  Money unload_load_cost(NodeId i, int t) const;
  int capacity(NodeId i) const;
  int fill0(NodeId i) const;

  /// Stations reachable by RVs: the intersection of the two node sets,
  /// sorted ascending.
  std::vector<NodeId> action_nodes() const;

  bool has_rv_edge(NodeId i, NodeId j) const;
};

/// One realization of the uncertainty: per-tuple journey counts together
/// with the per-journey value slopes (ascending), which define the convex
/// piecewise affine loss through the origin. Tuples with zero demand are
/// not materialized.
struct DemandScenario {
  std::map<DemandKey, std::vector<Money>> entries;

  int demand(const DemandKey& k) const {
    auto it = entries.find(k);
    return it == entries.end() ? 0 : static_cast<int>(it->second.size());
  }
  long total_demand() const;
  Money total_value() const;  // sum of all slopes = cost of serving nobody
};

/// First-stage decision over the horizon. Absent entries are zero.
struct RebalancePlan {
  std::map<EdgeStep, int> z;           // RV movements
  std::map<ActionSlot, int> y_plus;    // SVs loaded onto RVs
  std::map<ActionSlot, int> y_minus;   // SVs unloaded from RVs
  std::map<EdgeStep, int> b;           // SVs riding inside RVs

  int zv(NodeId i, NodeId j, int t) const;
  int bv(NodeId i, NodeId j, int t) const;
  int yp(NodeId i, int t) const;
  int ym(NodeId i, int t) const;
};

/// Outcome of a second-stage solve.
struct Stage2Solution {
  std::map<DemandKey, int> served;                     // w
  std::map<ActionSlot, std::pair<int, int>> penalties; // (p+, p-)
  Money cost;                                          // loss convention
  std::map<ActionSlot, std::pair<Money, Money>> duals; // (lambda+, lambda-)

  long total_served() const;
  long total_penalty() const;
};

/// Checks every structural invariant of the instance; returns one message
/// per violation (empty means valid). Never throws.
std::vector<std::string> validate_instance(const NetworkInstance& instance);

/// Deterministic index over the instance's demand tuples and action slots,
/// ordered lexicographically by t, then i, then j, then k. All solver
/// modules build their variable orderings from this.
struct TupleIndex {
  std::vector<DemandKey> demand_tuples;  // all of E_SV x {1..T} x {0..K}
  std::vector<ActionSlot> action_slots;  // (N_SV ∩ N_RV) x {1..T}
};
TupleIndex enumerate_tuples(const NetworkInstance& instance);

/// True iff the plan satisfies RV/onboard conservation, nesting bounds
/// 0 <= b <= rv_capacity * z, action bounds 0 <= y <= max_load_action,
/// nonnegativity, and edge membership. Violations, when requested, name
/// the offending index.
bool check_plan_feasible(const NetworkInstance& instance,
                         const RebalancePlan& plan,
                         std::vector<std::string>* violations = nullptr);

/// First-stage direct cost sum(c*z) + sum(r*(y+ + y-)).
Money plan_direct_cost(const NetworkInstance& instance,
                       const RebalancePlan& plan);

}  // namespace drrp
