#include "drrp/evaluate.hpp"

#include <cmath>
#include <sstream>

#include "drrp/rng.hpp"
#include "drrp/stage2.hpp"

namespace drrp {

EvaluationResult evaluate_plan(const NetworkInstance& inst,
                               const DemandModel& model,
                               const RebalancePlan& plan, int num_scenarios,
                               std::uint64_t seed) {
  EvaluationResult out;
  out.num_scenarios = num_scenarios;
  out.scenarios.reserve(num_scenarios);

  for (int s = 1; s <= num_scenarios; ++s) {
    DemandScenario xi = sample_scenario(model, seed, RngStreamId::kEvaluation,
                                        static_cast<std::uint64_t>(s));
    Stage2Solution sol = solve_stage2(inst, xi, plan);
    ScenarioEval e;
    e.demand = xi.total_demand();
    e.served = sol.total_served();
    e.service_rate = service_rate(xi, sol);
    e.penalty_units = sol.total_penalty();
    e.cost = sol.cost.dollars();
    out.scenarios.push_back(e);
  }

  if (num_scenarios <= 0) return out;
  double sum_r = 0.0;
  for (const ScenarioEval& e : out.scenarios) {
    sum_r += e.service_rate;
    out.mean_cost += e.cost;
    out.mean_penalty_units += e.penalty_units;
    out.mean_demand += static_cast<double>(e.demand);
    out.mean_served += static_cast<double>(e.served);
  }
  const double n = num_scenarios;
  out.mean_service_rate = sum_r / n;
  out.mean_cost /= n;
  out.mean_penalty_units /= n;
  out.mean_demand /= n;
  out.mean_served /= n;
  if (num_scenarios > 1) {
    double ss = 0.0;
    for (const ScenarioEval& e : out.scenarios) {
      double d = e.service_rate - out.mean_service_rate;
      ss += d * d;
    }
    out.sd_service_rate = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::string evaluation_to_csv(const EvaluationResult& result) {
  std::ostringstream out;
  out << "scenario,demand,served,service_rate,penalties,cost\n";
  int s = 1;
  for (const ScenarioEval& e : result.scenarios) {
    out << s++ << "," << e.demand << "," << e.served << "," << e.service_rate
        << "," << e.penalty_units << "," << e.cost << "\n";
  }
  return out.str();
}

}  // namespace drrp
