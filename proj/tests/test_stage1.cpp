#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "drrp/rng.hpp"
#include "drrp/scenario.hpp"
#include "drrp/simplex.hpp"
#include "drrp/stage1.hpp"
#include "drrp/stage2.hpp"

using namespace drrp;

namespace {

// Random admissible slope arrays for every action slot: a negative start,
// nondecreasing increments, well inside the box.
ValueFunctionApprox random_vfa(const NetworkInstance& inst,
                               std::uint64_t seed) {
  ValueFunctionApprox vfa = make_vfa(inst.max_load_action, 100.0);
  RngStream rng(seed, RngStreamId::kInstance);
  for (NodeId i : inst.action_nodes()) {
    for (int t = 1; t <= inst.horizon_T; ++t) {
      auto& th = vfa.slopes[{i, t}];
      th.resize(2 * vfa.y_bar);
      double v = -rng.uniform_int(0, 3) * 0.25;
      for (double& s : th) {
        s = v;
        v += rng.uniform_int(0, 2) * 0.3;
      }
    }
  }
  REQUIRE(vfa.admissible());
  return vfa;
}

std::pair<NetworkInstance, DemandModel> tiny_instance(std::uint64_t seed) {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rv_count = 1;
  gp.rng_seed = seed;
  return generate_grid_instance(gp);
}

}  // namespace

TEST_CASE("single-vehicle solver matches the exact branch and bound") {
  for (int trial = 0; trial < 6; ++trial) {
    auto [inst, model] = tiny_instance(500 + trial);
    ValueFunctionApprox vfa = random_vfa(inst, 90 + trial);

    Stage1Result fast = solve_stage1(inst, vfa, Stage1Mode::kInteger, 0.0, 0.0);
    REQUIRE(fast.status == LpStatus::kOptimal);
    CHECK(check_plan_feasible(inst, fast.plan));
    // The reported objective decomposes into direct cost plus value.
    CHECK(fast.objective ==
          doctest::Approx(plan_direct_cost(inst, fast.plan).dollars() +
                          vfa.evaluate_plan(fast.plan))
              .epsilon(1e-9));

    // Reference: the same model through the generic MIP machinery.
    Stage1Build b = build_stage1(inst, vfa);
    for (const auto& [edge, var] : b.z_var) b.lp.is_integer[var] = 1;
    MipOptions mo;
    mo.rel_gap = 0.0;
    mo.time_limit_s = 120.0;
    MipResult mip = solve_mip(b.lp, mo);
    REQUIRE(mip.status == LpStatus::kOptimal);
    CHECK(fast.objective == doctest::Approx(mip.objective).epsilon(1e-7));
  }
}

TEST_CASE("relaxing integrality never worsens the objective") {
  for (int trial = 0; trial < 3; ++trial) {
    auto [inst, model] = tiny_instance(520 + trial);
    ValueFunctionApprox vfa = random_vfa(inst, 30 + trial);
    Stage1Result rel =
        solve_stage1(inst, vfa, Stage1Mode::kRelaxed, 0.0, 60.0);
    Stage1Result half =
        solve_stage1(inst, vfa, Stage1Mode::kHalfInteger, 0.0, 120.0);
    Stage1Result full =
        solve_stage1(inst, vfa, Stage1Mode::kInteger, 0.0, 120.0);
    REQUIRE(rel.status == LpStatus::kOptimal);
    REQUIRE(half.status == LpStatus::kOptimal);
    REQUIRE(full.status == LpStatus::kOptimal);
    CHECK(rel.objective <= half.objective + 1e-7);
    CHECK(half.objective <= full.objective + 1e-7);
    // Every mode must still return an implementable (rounded) plan.
    CHECK(check_plan_feasible(inst, rel.plan));
    CHECK(check_plan_feasible(inst, half.plan));
    CHECK(check_plan_feasible(inst, full.plan));
  }
}

TEST_CASE("fixing the routing leaves an integral flow problem") {
  for (int trial = 0; trial < 4; ++trial) {
    auto [inst, model] = tiny_instance(540 + trial);
    ValueFunctionApprox vfa = random_vfa(inst, 70 + trial);
    Stage1Result full =
        solve_stage1(inst, vfa, Stage1Mode::kInteger, 0.0, 120.0);
    REQUIRE(full.status == LpStatus::kOptimal);
    Stage1Result fixed = solve_stage1(inst, vfa, Stage1Mode::kFixedZFlow, 0.0,
                                      60.0, &full.plan);
    REQUIRE(fixed.status == LpStatus::kOptimal);
    // With the routing pinned, the continuous problem is an integral flow:
    // its basic optimum has integer actions and the same objective.
    CHECK(fixed.objective == doctest::Approx(full.objective).epsilon(1e-7));
    for (const auto& [slot, net] : fixed.raw_net)
      CHECK(net == doctest::Approx(std::round(net)).epsilon(1e-7));
    CHECK(check_plan_feasible(inst, fixed.plan));
  }
}

TEST_CASE("deterministic objective equals direct cost plus realized loss") {
  for (int trial = 0; trial < 3; ++trial) {
    auto [inst, model] = tiny_instance(560 + trial);
    DemandScenario xi = sample_scenario(model, 560 + trial, 1);
    Stage1Result r = solve_deterministic_drrp(inst, xi, 0.0, 180.0);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(check_plan_feasible(inst, r.plan));
    Stage2Solution s2 = solve_stage2(inst, xi, r.plan);
    CHECK(r.objective ==
          doctest::Approx(plan_direct_cost(inst, r.plan).dollars() +
                          s2.cost.dollars())
              .epsilon(1e-6));
  }
}

TEST_CASE("the linear relaxation bounds the integer optimum from below") {
  for (int trial = 0; trial < 3; ++trial) {
    auto [inst, model] = tiny_instance(580 + trial);
    DemandScenario xi = sample_scenario(model, 580 + trial, 1);
    Stage1Result r = solve_deterministic_drrp(inst, xi, 0.0, 180.0);
    REQUIRE(r.status == LpStatus::kOptimal);
    LpStatus st = LpStatus::kIterLimit;
    double bound = deterministic_drrp_lp_bound(inst, xi, &st);
    REQUIRE(st == LpStatus::kOptimal);
    CHECK(bound <= r.objective + 1e-7);
  }
}

TEST_CASE("integer plans are canonical: no simultaneous load and unload") {
  for (int trial = 0; trial < 4; ++trial) {
    auto [inst, model] = tiny_instance(600 + trial);
    ValueFunctionApprox vfa = random_vfa(inst, 11 + trial);
    Stage1Result r = solve_stage1(inst, vfa, Stage1Mode::kInteger, 0.0, 120.0);
    REQUIRE(r.status == LpStatus::kOptimal);
    for (const auto& [slot, yp] : r.plan.y_plus)
      CHECK(std::min(yp, r.plan.ym(slot.i, slot.t)) == 0);
  }
}

TEST_CASE("raw net actions mirror the integer plan") {
  auto [inst, model] = tiny_instance(620);
  ValueFunctionApprox vfa = random_vfa(inst, 43);
  Stage1Result r = solve_stage1(inst, vfa, Stage1Mode::kInteger, 0.0, 120.0);
  REQUIRE(r.status == LpStatus::kOptimal);
  long planned = 0;
  for (const auto& [slot, v] : r.plan.y_plus) planned += v;
  for (const auto& [slot, v] : r.plan.y_minus) planned += v;
  CHECK(planned > 0);  // the random slopes make acting worthwhile
  for (const auto& [slot, net] : r.raw_net) {
    CHECK(net == doctest::Approx(r.plan.ym(slot.i, slot.t) -
                                 r.plan.yp(slot.i, slot.t)));
    CHECK(std::abs(net) <= inst.max_load_action);
  }
  for (const auto& [slot, v] : r.plan.y_minus)
    if (v != r.plan.yp(slot.i, slot.t)) CHECK(r.raw_net.count(slot) == 1);
}

TEST_CASE("random plans are deterministic, one-sided, and within bounds") {
  auto [inst, model] = tiny_instance(640);
  RebalancePlan a = random_plan(inst, 9, 3);
  RebalancePlan b = random_plan(inst, 9, 3);
  CHECK(a.y_plus == b.y_plus);
  CHECK(a.y_minus == b.y_minus);
  CHECK(a.z.empty());
  CHECK(a.b.empty());
  RebalancePlan c = random_plan(inst, 9, 4);
  CHECK((a.y_plus != c.y_plus || a.y_minus != c.y_minus));
  const int y_bar = inst.max_load_action;
  for (const auto& [slot, v] : a.y_plus) {
    CHECK(v >= 1);
    CHECK(v <= y_bar);
    CHECK(a.ym(slot.i, slot.t) == 0);
  }
  for (const auto& [slot, v] : a.y_minus) {
    CHECK(v >= 1);
    CHECK(v <= y_bar);
    CHECK(a.yp(slot.i, slot.t) == 0);
  }
}
