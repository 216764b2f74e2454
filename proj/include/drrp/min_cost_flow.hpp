#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace drrp {

/// Directed arc with integer capacity and cost. Lower bounds are zero.
struct FlowArc {
  int tail = 0;
  int head = 0;
  std::int64_t capacity = 0;
  std::int64_t cost = 0;  // per unit of flow, in exact integer units
};

/// Min-cost flow in standard node-supply form: supply[v] > 0 injects flow
/// at v, supply[v] < 0 demands it. Supplies must sum to zero.
struct FlowProblem {
  int num_nodes = 0;
  std::vector<std::int64_t> supply;
  std::vector<FlowArc> arcs;

  int add_node();
  int add_arc(int tail, int head, std::int64_t capacity, std::int64_t cost);
};

enum class FlowStatus { kOptimal, kInfeasible, kUnbalanced };

struct FlowSolution {
  FlowStatus status = FlowStatus::kInfeasible;
  std::int64_t total_cost = 0;
  std::vector<std::int64_t> flow;       // one per arc
  std::vector<std::int64_t> potential;  // one per node

  /// Multiplier of the arc's capacity bound: positive only when the arc is
  /// saturated and the bound is binding.
  std::int64_t lambda_upper(const FlowProblem& p, int arc) const;
  /// Multiplier of the arc's nonnegativity bound.
  std::int64_t lambda_lower(const FlowProblem& p, int arc) const;

  /// True iff flows are within bounds, every node balances, and the
  /// potentials certify optimality by reduced-cost conditions.
  bool verify(const FlowProblem& p, std::string* why = nullptr) const;
};

/// Successive shortest augmenting paths with node potentials. Negative-cost
/// arcs are pre-saturated, so arbitrary integer costs are accepted. Exact:
/// no floating point anywhere.
FlowSolution solve_flow(const FlowProblem& problem);

/// DIMACS min-cost-flow text ("p min", "n", "a" lines, zero lower bounds).
std::string flow_to_dimacs(const FlowProblem& problem);
FlowProblem flow_from_dimacs(std::istream& in);

class LinearProgram;

/// The same problem as an explicit LP: one variable per arc with bounds
/// [0, capacity], one equality row per node (outflow - inflow = supply).
/// Costs are scaled by `cost_scale` (e.g. 1e-6 to turn integer micro-unit
/// costs into dollars).
LinearProgram flow_to_lp(const FlowProblem& problem, double cost_scale = 1.0);

}  // namespace drrp
