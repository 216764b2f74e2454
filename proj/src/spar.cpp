#include "drrp/spar.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "drrp/stage1.hpp"
#include "drrp/stage2.hpp"

namespace drrp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (name == "na") return Method::kNA;
  if (name == "m1") return Method::kM1;
  if (name == "m2-r") return Method::kM2R;
  if (name == "m2-hi") return Method::kM2HI;
  if (name == "m2-i") return Method::kM2I;
  if (name == "m3") return Method::kM3;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected na, m1, m2-r, m2-hi, m2-i, m3)");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::kNA: return "na";
    case Method::kM1: return "m1";
    case Method::kM2R: return "m2-r";
    case Method::kM2HI: return "m2-hi";
    case Method::kM2I: return "m2-i";
    case Method::kM3: return "m3";
  }
  return "?";
}

SparRunReport run_spar(const NetworkInstance& inst, const DemandModel& model,
                       const SparConfig& cfg,
                       const SparIterationHook& on_iteration) {
  const auto t0 = std::chrono::steady_clock::now();
  SparRunReport rep;
  rep.method = cfg.method;

  if (cfg.method == Method::kNA) {
    rep.wall_s = seconds_since(t0);
    return rep;
  }
  if (cfg.method == Method::kM1) {
    Stage1Result r = solve_deterministic_drrp(
        inst, expected_scenario(model), cfg.rel_gap, cfg.final_time_limit_s);
    if (r.status != LpStatus::kOptimal && r.status != LpStatus::kTimeLimit)
      throw std::runtime_error("deterministic solve failed");
    rep.plan = r.plan;
    rep.finalize_timed_out = r.timed_out;
    rep.warnings = r.warnings;
    rep.wall_s = seconds_since(t0);
    return rep;
  }

  const int y_bar = inst.max_load_action;
  double theta_max = cfg.theta_max;
  if (theta_max <= 0.0) theta_max = 10.0 * model.value_high.dollars();
  rep.vfa = make_vfa(y_bar, theta_max);

  Stage1Mode iterate_mode = Stage1Mode::kInteger;
  if (cfg.method == Method::kM2R) iterate_mode = Stage1Mode::kRelaxed;
  if (cfg.method == Method::kM2HI) iterate_mode = Stage1Mode::kHalfInteger;

  if (cfg.snapshot_every > 0) rep.theta_csv += vfa_to_csv(rep.vfa, 0);

  int last_n = 0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    if (cfg.wall_limit_s > 0.0 && seconds_since(t0) > cfg.wall_limit_s) {
      rep.warnings.push_back("learning stopped early at iteration " +
                             std::to_string(n - 1) + " by the wall limit");
      break;
    }
    SparIterationStat st;
    st.n = n;

    RebalancePlan iterate;
    std::map<ActionSlot, double> raw_net;
    if (cfg.method == Method::kM3) {
      iterate = random_plan(inst, cfg.seed, static_cast<std::uint64_t>(n));
      st.stage1_objective = plan_direct_cost(inst, iterate).dollars() +
                            rep.vfa.evaluate_plan(iterate);
    } else {
      Stage1Result s1 = solve_stage1(inst, rep.vfa, iterate_mode, cfg.rel_gap,
                                     cfg.stage1_time_limit_s);
      if (s1.status != LpStatus::kOptimal && s1.status != LpStatus::kTimeLimit)
        throw std::runtime_error("first-stage solve failed at iteration " +
                                 std::to_string(n));
      iterate = s1.plan;
      raw_net = std::move(s1.raw_net);
      st.stage1_objective = s1.objective;
    }

    DemandScenario xi =
        sample_scenario(model, cfg.seed, static_cast<std::uint64_t>(n));
    Stage2Solution s2 = solve_stage2(inst, xi, iterate);

    st.scenario_demand = xi.total_demand();
    st.stage2_cost = s2.cost.dollars();
    st.service_rate = service_rate(xi, s2);
    st.penalty_units = s2.total_penalty();
    st.alpha = step_size(cfg.step_rule, cfg.step_c, n);

    if (iterate_mode != Stage1Mode::kInteger && cfg.method != Method::kM3) {
      // Score the relaxed iterate itself (fractional nets, LP second
      // stage). The learning update below still works from the rounded
      // plan's duals, but the reported estimate should reflect what the
      // relaxation claims to achieve.
      Stage2Estimate est = estimate_stage2_fractional(inst, xi, raw_net);
      if (est.status == LpStatus::kOptimal) {
        st.stage2_cost = est.cost;
        st.service_rate = est.service_rate;
      }
    }

    std::vector<GradientEntry> grad = gradient_vector(iterate, s2.duals, y_bar);
    rep.vfa = step(rep.vfa, grad, st.alpha);

    rep.last_iterate = iterate;
    last_n = n;
    st.wall_s = seconds_since(t0);
    rep.iterations.push_back(st);

    if (cfg.snapshot_every > 0 && n % cfg.snapshot_every == 0)
      rep.theta_csv += vfa_to_csv(rep.vfa, n);

    if (on_iteration && !on_iteration(rep)) {
      rep.warnings.push_back("learning stopped early at iteration " +
                             std::to_string(n) + " by the caller");
      break;
    }
  }
  if (cfg.snapshot_every > 0 && last_n % cfg.snapshot_every != 0)
    rep.theta_csv += vfa_to_csv(rep.vfa, last_n);

  if (cfg.method == Method::kM2I) {
    // The committed plan is the final (already integral) iterate.
    rep.plan = rep.last_iterate;
  } else {
    Stage1Result fin = solve_stage1(inst, rep.vfa, Stage1Mode::kInteger,
                                    cfg.rel_gap, cfg.final_time_limit_s);
    if (fin.status != LpStatus::kOptimal && fin.status != LpStatus::kTimeLimit)
      throw std::runtime_error("final integral solve failed");
    rep.plan = fin.plan;
    rep.finalize_timed_out = fin.timed_out;
    for (const auto& w : fin.warnings) rep.warnings.push_back(w);
  }
  rep.wall_s = seconds_since(t0);
  return rep;
}

}  // namespace drrp
