#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drrp/instance.hpp"
#include "drrp/scenario.hpp"

namespace drrp {

/// Per-scenario outcome of evaluating a fixed plan.
struct ScenarioEval {
  long demand = 0;
  long served = 0;
  double service_rate = 0.0;  // served / demand, as a fraction
  long penalty_units = 0;     // phantom SVs created or destroyed
  double cost = 0.0;          // dollars, loss convention
};

/// Monte-Carlo estimate of a plan's out-of-sample performance.
struct EvaluationResult {
  int num_scenarios = 0;
  double mean_service_rate = 0.0;
  double sd_service_rate = 0.0;  // sample standard deviation
  double mean_cost = 0.0;
  double mean_penalty_units = 0.0;
  double mean_demand = 0.0;
  double mean_served = 0.0;
  std::vector<ScenarioEval> scenarios;  // in draw order
};

/// Evaluates a fixed plan on `num_scenarios` fresh draws from the
/// evaluation stream (substreams 1..n), so every method sees the same
/// demand for the same (seed, index).
EvaluationResult evaluate_plan(const NetworkInstance& instance,
                               const DemandModel& model,
                               const RebalancePlan& plan, int num_scenarios,
                               std::uint64_t seed);

/// CSV with header "scenario,demand,served,service_rate,penalties,cost".
std::string evaluation_to_csv(const EvaluationResult& result);

}  // namespace drrp
