#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "drrp/instance.hpp"
#include "drrp/scenario.hpp"
#include "drrp/value_function.hpp"

namespace drrp {

/// Planning methods, from the do-nothing baseline to the full
/// stochastic-approximation variants.
enum class Method {
  kNA,    // no action: empty plan
  kM1,    // one deterministic MIP on the expected scenario
  kM2R,   // learn with fully relaxed first-stage iterates
  kM2HI,  // learn with routing integral on the first half of the horizon
  kM2I,   // learn with fully integral iterates; plan = last iterate
  kM3,    // learn with uniformly random actions; no routing during learning
};

Method method_from_string(const std::string& name);
std::string method_to_string(Method m);

struct SparConfig {
  Method method = Method::kM2I;
  int n_max = 50;                 // learning iterations
  StepRule step_rule = StepRule::kHarmonic2040;
  double step_c = 0.5;            // constant-rule step size
  std::uint64_t seed = 0;
  double rel_gap = 5e-3;          // MIP gap for per-iteration solves
  double stage1_time_limit_s = 60.0;
  double final_time_limit_s = 1200.0;
  double theta_max = 0.0;         // 0 = 10 x the largest journey value
  int snapshot_every = 0;         // 0 = no slope snapshots
  double wall_limit_s = 0.0;      // 0 = unlimited; stops learning early
};

struct SparIterationStat {
  int n = 0;
  double alpha = 0.0;
  double stage1_objective = 0.0;  // direct cost + approximate value
  long scenario_demand = 0;
  double stage2_cost = 0.0;       // dollars, loss convention
  double service_rate = 0.0;      // of the iterate on that scenario
  long penalty_units = 0;
  double wall_s = 0.0;
};

struct SparRunReport {
  Method method = Method::kNA;
  RebalancePlan plan;             // the plan the method commits to
  RebalancePlan last_iterate;     // plan of the final learning iteration
  ValueFunctionApprox vfa;
  std::vector<SparIterationStat> iterations;
  std::string theta_csv;          // "i,t,y_prime,slope,iteration" snapshots
  std::vector<std::string> warnings;
  bool finalize_timed_out = false;
  double wall_s = 0.0;
};

/// Runs the selected method end to end. All scenario draws come from the
/// per-iteration scenario stream, so two methods with the same seed face
/// identical demand. The optional hook fires after every iteration with
/// the report so far (latest iteration last); returning false stops
/// learning early (finalization still runs).
using SparIterationHook = std::function<bool(const SparRunReport&)>;
SparRunReport run_spar(const NetworkInstance& instance,
                       const DemandModel& model, const SparConfig& config,
                       const SparIterationHook& on_iteration = {});

}  // namespace drrp
