#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drrp/instance.hpp"
#include "drrp/linear_program.hpp"
#include "drrp/value_function.hpp"

namespace drrp {

enum class Stage1Mode {
  kRelaxed,      // all variables continuous
  kHalfInteger,  // RV routing integral for t <= ceil(T/2) only
  kInteger,      // z, y, b all integral
  kFixedZFlow,   // z pinned to a given integer routing, rest continuous
};

/// First-stage model plus the variable index maps needed to read a plan
/// back out of an LP solution.
struct Stage1Build {
  LinearProgram lp;
  int y_bar = 0;
  std::map<EdgeStep, int> z_var;
  std::map<EdgeStep, int> b_var;
  std::map<ActionSlot, int> yp_var;
  std::map<ActionSlot, int> ym_var;
  // First of the 2*y_bar unit-capacity segment variables per slot
  // (ordered y' = -y_bar .. y_bar-1).
  std::map<ActionSlot, int> seg_var;
};

/// Builds the routing/action problem with the approximate value function
/// encoded through unit-capacity segment variables. No integrality marks;
/// solve_stage1 applies them per mode.
Stage1Build build_stage1(const NetworkInstance& instance,
                         const ValueFunctionApprox& vfa);

struct Stage1Result {
  LpStatus status = LpStatus::kIterLimit;
  RebalancePlan plan;
  double objective = 0.0;  // direct cost + approximate value, dollars
  bool timed_out = false;
  std::vector<std::string> warnings;
  // Raw net actions y- - y+ of the solved model, before any rounding.
  // Fractional under the relaxed and half-integer modes; the plan above
  // always holds the rounded integer version.
  std::map<ActionSlot, double> raw_net;
};

/// Solves the first stage under the given integrality mode. For
/// kFixedZFlow, `fixed_z` supplies the pinned routing (missing edges = 0).
/// Integer-mode solutions get the canonical form with min(y+, y-) = 0 per
/// slot, which never increases the objective.
Stage1Result solve_stage1(const NetworkInstance& instance,
                          const ValueFunctionApprox& vfa, Stage1Mode mode,
                          double rel_gap, double time_limit_s,
                          const RebalancePlan* fixed_z = nullptr);

/// The monolithic deterministic problem: routing, actions, and journey
/// realization against one fixed scenario, solved as a single MIP.
Stage1Result solve_deterministic_drrp(const NetworkInstance& instance,
                                      const DemandScenario& scenario,
                                      double rel_gap, double time_limit_s);

/// LP relaxation objective of the same monolithic model.
double deterministic_drrp_lp_bound(const NetworkInstance& instance,
                                   const DemandScenario& scenario,
                                   LpStatus* status = nullptr);

/// Random action plan: per slot a net action uniform on {-y_bar..y_bar},
/// split one-sidedly into (y+, y-). Routing and onboard flows left empty.
RebalancePlan random_plan(const NetworkInstance& instance, std::uint64_t seed,
                          std::uint64_t substream = 0);

}  // namespace drrp
