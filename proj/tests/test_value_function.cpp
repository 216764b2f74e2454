#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drrp/money.hpp"
#include "drrp/rng.hpp"
#include "drrp/value_function.hpp"

using namespace drrp;

namespace {

// Exhaustive projection oracle: enumerate every partition of the indices
// into consecutive blocks, give each block its clipped mean, keep the
// feasible (nondecreasing, boxed) candidate closest to the input. The
// optimal partition of the true projection is among the candidates, so
// the best candidate is the projection.
std::vector<double> brute_force_projection(const std::vector<double>& raw,
                                           double theta_max) {
  const std::size_t n = raw.size();
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<double> cand;
    std::size_t start = 0;
    for (std::size_t k = 0; k < n; ++k) {
      bool cut = k + 1 == n || (mask >> k) & 1;
      if (!cut) continue;
      double mean = 0.0;
      for (std::size_t j = start; j <= k; ++j) mean += raw[j];
      mean /= static_cast<double>(k - start + 1);
      mean = std::clamp(mean, -theta_max, theta_max);
      cand.insert(cand.end(), k - start + 1, mean);
      start = k + 1;
    }
    bool feasible = true;
    for (std::size_t k = 1; k < n; ++k)
      if (cand[k] < cand[k - 1] - 1e-12) feasible = false;
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      dist += (cand[k] - raw[k]) * (cand[k] - raw[k]);
    if (dist < best_dist) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

ValueFunctionApprox small_vfa() {
  ValueFunctionApprox v = make_vfa(3, 50.0);
  // Convex, nondecreasing slopes over y' = -3..2.
  v.slopes[{4, 2}] = {-4.0, -2.0, -1.0, 0.5, 2.0, 6.0};
  return v;
}

}  // namespace

TEST_CASE("piecewise-linear evaluation at integer and fractional points") {
  ValueFunctionApprox v = small_vfa();
  // V(0) = 0 and V is the running sum of slopes away from the origin.
  CHECK(v.evaluate(4, 2, 0.0) == doctest::Approx(0.0));
  CHECK(v.evaluate(4, 2, 1.0) == doctest::Approx(0.5));
  CHECK(v.evaluate(4, 2, 2.0) == doctest::Approx(0.5 + 2.0));
  CHECK(v.evaluate(4, 2, 3.0) == doctest::Approx(0.5 + 2.0 + 6.0));
  CHECK(v.evaluate(4, 2, -1.0) == doctest::Approx(1.0));
  CHECK(v.evaluate(4, 2, -3.0) == doctest::Approx(1.0 + 2.0 + 4.0));
  // Fractional arguments interpolate within the segment.
  CHECK(v.evaluate(4, 2, 1.5) == doctest::Approx(0.5 + 0.5 * 2.0));
  CHECK(v.evaluate(4, 2, -0.25) == doctest::Approx(0.25));
  // Unknown slots evaluate to zero.
  CHECK(v.evaluate(0, 1, 2.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(v.evaluate(4, 2, 3.5), std::domain_error);
  CHECK_THROWS_AS(v.evaluate(4, 2, -3.5), std::domain_error);
}

TEST_CASE("admissibility detects box and monotonicity violations") {
  ValueFunctionApprox v = small_vfa();
  CHECK(v.admissible());
  ValueFunctionApprox bad = v;
  bad.slopes[{4, 2}][3] = -1.5;  // decreasing step
  CHECK_FALSE(bad.admissible());
  ValueFunctionApprox big = v;
  big.slopes[{4, 2}][5] = 60.0;  // outside the box
  CHECK_FALSE(big.admissible());
  ValueFunctionApprox wrong = v;
  wrong.slopes[{4, 2}].push_back(7.0);  // wrong arity
  CHECK_FALSE(wrong.admissible());
}

TEST_CASE("projection matches the exhaustive partition oracle") {
  RngStream rng(61, RngStreamId::kInstance);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 2 + trial % 9;
    double box = trial % 3 == 0 ? 2.0 : 10.0;
    std::vector<double> raw(n);
    for (double& x : raw) x = rng.uniform_int(-60, 60) / 10.0;
    std::vector<double> got = project_monotone_box(raw, box);
    std::vector<double> want = brute_force_projection(raw, box);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < n; ++k)
      CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-8));
  }
}

TEST_CASE("projection satisfies the variational inequality") {
  // <raw - proj, v - proj> <= 0 for every feasible v characterizes the
  // Euclidean projection onto a convex set.
  RngStream rng(62, RngStreamId::kInstance);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 3 + trial % 6;
    std::vector<double> raw(n);
    for (double& x : raw) x = rng.uniform_int(-40, 40) / 7.0;
    std::vector<double> proj = project_monotone_box(raw, 4.0);
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<double> v(n);
      double cur = -4.0;
      for (std::size_t k = 0; k < n; ++k) {
        cur += rng.uniform_int(0, 10) / 10.0;
        v[k] = std::min(cur, 4.0);
      }
      double inner = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        inner += (raw[k] - proj[k]) * (v[k] - proj[k]);
      CHECK(inner <= 1e-9);
    }
  }
}

TEST_CASE("projection is idempotent and order preserving") {
  std::vector<double> raw = {3.0, -1.0, 2.0, 2.0, 8.0};
  std::vector<double> p = project_monotone_box(raw, 5.0);
  CHECK(project_monotone_box(p, 5.0) == p);
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k] >= p[k - 1]);
  for (double x : p) CHECK(std::abs(x) <= 5.0);
}

TEST_CASE("gradient entries carry suffix sums of the dual differences") {
  RebalancePlan plan;
  plan.y_minus[{7, 1}] = 2;
  std::map<ActionSlot, std::pair<Money, Money>> duals;
  duals[{7, 1}] = {Money::from_dollars(1.0), Money()};       // lambda+ = 1
  duals[{7, 2}] = {Money(), Money::from_dollars(0.25)};      // lambda- = .25
  duals[{7, 3}] = {Money::from_dollars(2.0), Money()};       // lambda+ = 2
  duals[{9, 1}] = {Money(), Money()};                        // silent slot
  auto grad = gradient_vector(plan, duals, 5);
  REQUIRE(grad.size() == 3);
  // Station 7: suffix sums of (lambda- - lambda+) from each step onward.
  CHECK(grad[0].slot == ActionSlot{7, 1});
  CHECK(grad[0].value == doctest::Approx(-1.0 + 0.25 - 2.0));
  CHECK(grad[0].y_prime == 2);  // the observed net action
  CHECK(grad[1].value == doctest::Approx(0.25 - 2.0));
  CHECK(grad[1].y_prime == 0);
  CHECK(grad[2].value == doctest::Approx(-2.0));
}

TEST_CASE("gradient clamps the segment index to the slope domain") {
  RebalancePlan plan;
  plan.y_minus[{1, 1}] = 9;   // beyond +y_bar
  plan.y_plus[{2, 1}] = 9;    // beyond -y_bar
  std::map<ActionSlot, std::pair<Money, Money>> duals;
  duals[{1, 1}] = {Money::from_dollars(1.0), Money()};
  duals[{2, 1}] = {Money::from_dollars(1.0), Money()};
  auto grad = gradient_vector(plan, duals, 3);
  REQUIRE(grad.size() == 2);
  CHECK(grad[0].y_prime == 2);   // clamped to y_bar - 1
  CHECK(grad[1].y_prime == -3);  // clamped to -y_bar
}

TEST_CASE("a step moves the touched slope and re-projects") {
  ValueFunctionApprox v = make_vfa(3, 50.0);
  std::vector<GradientEntry> grad{{{4, 2}, 0, -2.0}};
  ValueFunctionApprox next = step(v, grad, 0.5);
  // theta[0-segment] -= 0.5 * (-2) = +1; isotonic projection spreads the
  // jump over the tail segments that were all zero.
  CHECK(next.admissible());
  std::vector<double> th = next.slopes_for(4, 2);
  CHECK(th[2] == doctest::Approx(0.0));
  CHECK(th[3] == doctest::Approx(1.0 / 3.0));
  CHECK(th[4] == doctest::Approx(1.0 / 3.0));
  CHECK(th[5] == doctest::Approx(1.0 / 3.0));
  // The untouched original is unchanged (steps are functional).
  CHECK(v.slopes.empty());
}

TEST_CASE("step size rules take their documented values") {
  CHECK(step_size(StepRule::kHarmonic2040, 0.0, 1) ==
        doctest::Approx(20.0 / 41.0));
  CHECK(step_size(StepRule::kHarmonic2040, 0.0, 50) ==
        doctest::Approx(20.0 / 90.0));
  CHECK(step_size(StepRule::kConstant, 0.25, 7) == doctest::Approx(0.25));
  CHECK(step_size(StepRule::kCappedHarmonic, 0.0, 5) == doctest::Approx(1.0));
  CHECK(step_size(StepRule::kCappedHarmonic, 0.0, 80) ==
        doctest::Approx(0.25));
}

TEST_CASE("csv export lists every slope with its iteration tag") {
  ValueFunctionApprox v = small_vfa();
  std::string csv = vfa_to_csv(v, 7);
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 6);
  CHECK(csv.find("4,2,-3,-4,7\n") == 0);
  CHECK(csv.find("4,2,2,6,7\n") != std::string::npos);
}
