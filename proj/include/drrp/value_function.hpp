#pragma once

#include <map>
#include <string>
#include <vector>

#include "drrp/instance.hpp"

namespace drrp {

/// Separable approximation of the expected second-stage value: per
/// (station, step) a convex piecewise-linear function of the net unload
/// x = y- - y+ through the origin, described by 2*y_bar slopes between
/// integer breakpoints, indexed y' = -y_bar .. y_bar-1. The constant term
/// is fixed at zero. Slots without an entry have all-zero slopes.
struct ValueFunctionApprox {
  int y_bar = 0;
  double theta_max = 0.0;  // box bound on every slope, in dollars
  std::map<ActionSlot, std::vector<double>> slopes;

  int index_of(int y_prime) const { return y_prime + y_bar; }

  /// Slope array for a slot (zeros when absent).
  std::vector<double> slopes_for(NodeId i, int t) const;

  /// Exact piecewise-linear value at x in [-y_bar, y_bar].
  /// Throws std::domain_error outside that interval.
  double evaluate(NodeId i, int t, double x) const;

  /// Total approximate value of a plan: sum over slots of
  /// evaluate(i, t, y-(i,t) - y+(i,t)).
  double evaluate_plan(const RebalancePlan& plan) const;

  /// True iff every slope array is nondecreasing and within the box.
  bool admissible(double tol = 1e-9) const;
};

/// Empty (all-zero) approximator.
ValueFunctionApprox make_vfa(int y_bar, double theta_max);

/// Sparse gradient: one (slot, segment index y', magnitude) entry per
/// stage-1 slot with a nonzero dual difference.
struct GradientEntry {
  ActionSlot slot;
  int y_prime = 0;    // clamped into [-y_bar, y_bar-1]
  double value = 0.0;  // suffix sum over tau >= t of lambda- - lambda+
};

/// Builds the update direction from the plan's actions and the
/// second-stage fill-bound duals. A net-action unit at (i, t) shifts the
/// fill level at every later step too, so each entry carries the suffix
/// sum of the dual differences. A subsequent step() call subtracts
/// alpha * value, moving the touched slope toward the sampled marginal
/// second-stage cost.
std::vector<GradientEntry> gradient_vector(
    const RebalancePlan& plan,
    const std::map<ActionSlot, std::pair<Money, Money>>& duals, int y_bar);

/// Euclidean projection onto {nondecreasing} intersect [-theta_max,
/// theta_max]^n: pool-adjacent-violators followed by clipping.
std::vector<double> project_monotone_box(std::vector<double> raw,
                                         double theta_max);

/// One projected subgradient step theta <- Proj(theta - alpha * grad).
ValueFunctionApprox step(const ValueFunctionApprox& vfa,
                         const std::vector<GradientEntry>& grad, double alpha);

enum class StepRule { kHarmonic2040, kConstant, kCappedHarmonic };

/// alpha(n) for n >= 1; `c` is used by the constant rule only.
double step_size(StepRule rule, double c, int n);

/// CSV snapshot rows "i,t,y_prime,slope,iteration" (no header).
std::string vfa_to_csv(const ValueFunctionApprox& vfa, int iteration);

}  // namespace drrp
