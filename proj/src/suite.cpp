#include "drrp/suite.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "drrp/instance_io.hpp"
#include "drrp/stage1.hpp"
#include "drrp/stage2.hpp"

namespace drrp {

namespace {

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string iterations_csv(const SparRunReport& rep) {
  std::ostringstream out;
  out << "n,alpha,stage1_objective,scenario_demand,stage2_cost,service_rate,"
         "penalties,wall_s\n";
  for (const auto& it : rep.iterations) {
    out << it.n << "," << it.alpha << "," << it.stage1_objective << ","
        << it.scenario_demand << "," << it.stage2_cost << ","
        << it.service_rate << "," << it.penalty_units << "," << it.wall_s
        << "\n";
  }
  return out.str();
}

}  // namespace

std::vector<LpGapRow> lp_gap_study(const std::vector<int>& grid_sides,
                                   const std::vector<int>& fleets,
                                   int instances, std::uint64_t base_seed,
                                   double time_limit_s, double rel_gap,
                                   GridGenParams base) {
  std::vector<LpGapRow> rows;
  for (int side : grid_sides) {
    for (int fleet : fleets) {
      for (int r = 0; r < instances; ++r) {
        GridGenParams gp = base;
        gp.grid_side = side;
        gp.rv_count = fleet;
        gp.rng_seed = base_seed + static_cast<std::uint64_t>(r);
        auto [inst, model] = generate_grid_instance(gp);

        // Deterministic benchmark: one sampled realization of the demand
        // model, with linear losses (every journey worth exactly one
        // dollar). Rounding the expectation instead would wipe out most of
        // the demand, since per-journey means are well below one.
        DemandScenario sc = sample_scenario(model, gp.rng_seed, 1);
        for (auto& [key, slopes] : sc.entries)
          for (Money& v : slopes) v = Money::from_dollars(1.0);

        LpGapRow row;
        row.grid_side = side;
        row.stations = side * side;
        row.fleet = fleet;
        row.seed = gp.rng_seed;
        row.expected_demand = static_cast<double>(sc.total_demand());

        auto t0 = std::chrono::steady_clock::now();
        Stage1Result mip =
            solve_deterministic_drrp(inst, sc, rel_gap, time_limit_s);
        row.mip_time_s = elapsed(t0);
        row.mip_objective = mip.objective;
        row.timed_out = mip.timed_out;

        t0 = std::chrono::steady_clock::now();
        row.lp_objective = deterministic_drrp_lp_bound(inst, sc);
        row.lp_time_s = elapsed(t0);

        // The incumbent is proven within rel_gap of optimal unless the
        // search timed out, so that certificate is the reported bound.
        row.mip_bound =
            row.timed_out
                ? row.lp_objective
                : std::max(row.lp_objective,
                           row.mip_objective -
                               rel_gap * std::max(1.0, std::abs(row.mip_objective)));

        if (row.mip_objective > 1e-12)
          row.gap_percent = 100.0 *
                            (row.mip_objective - row.lp_objective) /
                            row.mip_objective;

        row.na_service_rate =
            service_rate(sc, solve_stage2(inst, sc, RebalancePlan{}));
        row.mip_service_rate =
            service_rate(sc, solve_stage2(inst, sc, mip.plan));
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string lp_gap_to_csv(const std::vector<LpGapRow>& rows) {
  std::ostringstream out;
  out << "grid_side,stations,fleet,seed,mip_objective,mip_bound,lp_objective,"
         "gap_percent,mip_time_s,lp_time_s,expected_demand,na_service_rate,"
         "mip_service_rate,timed_out\n";
  for (const auto& r : rows) {
    out << r.grid_side << "," << r.stations << "," << r.fleet << "," << r.seed
        << "," << r.mip_objective << "," << r.mip_bound << ","
        << r.lp_objective << "," << r.gap_percent << "," << r.mip_time_s << ","
        << r.lp_time_s << "," << r.expected_demand << ","
        << r.na_service_rate << "," << r.mip_service_rate << ","
        << (r.timed_out ? 1 : 0) << "\n";
  }
  return out.str();
}

SuiteResult run_suite(const SuiteConfig& cfg, const std::string& out_dir,
                      std::ostream* log) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  SuiteResult result;

  for (int idx = 1; idx <= cfg.instances; ++idx) {
    const std::uint64_t seed =
        cfg.base_seed + static_cast<std::uint64_t>(idx - 1);
    GridGenParams gp = cfg.grid;
    gp.rng_seed = seed;
    auto [inst, model] = generate_grid_instance(gp);
    save_instance((fs::path(out_dir) /
                   ("instance_" + std::to_string(idx) + ".json"))
                      .string(),
                  inst, model);

    for (Method m : cfg.methods) {
      SuiteCell cell;
      cell.instance_index = idx;
      cell.seed = seed;
      cell.method = m;
      const std::string stem =
          "instance_" + std::to_string(idx) + "_" + method_to_string(m);
      try {
        SparRunReport rep = run_spar(inst, model, spar_config_for(cfg, m, seed));
        EvaluationResult ev =
            evaluate_plan(inst, model, rep.plan, cfg.eval_scenarios, seed);
        cell.ok = true;
        cell.mean_service_rate = ev.mean_service_rate;
        cell.sd_service_rate = ev.sd_service_rate;
        cell.mean_cost = ev.mean_cost;
        cell.plan_cost = plan_direct_cost(inst, rep.plan).dollars();
        cell.learn_wall_s = rep.wall_s;

        write_file(fs::path(out_dir) / (stem + "_plan.csv"),
                   plan_to_csv(rep.plan));
        write_file(fs::path(out_dir) / (stem + "_evaluation.csv"),
                   evaluation_to_csv(ev));
        if (!rep.iterations.empty())
          write_file(fs::path(out_dir) / (stem + "_iterations.csv"),
                     iterations_csv(rep));
        if (!rep.theta_csv.empty())
          write_file(fs::path(out_dir) / (stem + "_theta.csv"),
                     "i,t,y_prime,slope,iteration\n" + rep.theta_csv);
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
        ++result.failures;
        if (log) *log << "cell " << stem << " failed: " << e.what() << "\n";
      }
      result.cells.push_back(cell);
      if (log && cell.ok)
        *log << stem << ": rate " << cell.mean_service_rate << " (cost "
             << cell.mean_cost << ", " << cell.learn_wall_s << " s)\n";
    }
  }

  write_file(fs::path(out_dir) / "summary.csv", suite_summary_csv(result));
  write_file(fs::path(out_dir) / "deltas.csv", suite_deltas_csv(result));
  return result;
}

std::string suite_summary_csv(const SuiteResult& result) {
  std::ostringstream out;
  out << "instance,seed,method,ok,mean_service_rate,sd_service_rate,"
         "mean_cost,plan_cost,wall_s,error\n";
  for (const auto& c : result.cells) {
    out << c.instance_index << "," << c.seed << "," << method_to_string(c.method)
        << "," << (c.ok ? 1 : 0) << "," << c.mean_service_rate << ","
        << c.sd_service_rate << "," << c.mean_cost << "," << c.plan_cost << ","
        << c.learn_wall_s << "," << c.error << "\n";
  }
  return out.str();
}

std::string suite_deltas_csv(const SuiteResult& result) {
  // Pair each cell with the NA baseline of the same instance.
  std::map<int, const SuiteCell*> baseline;
  for (const auto& c : result.cells)
    if (c.method == Method::kNA && c.ok) baseline[c.instance_index] = &c;

  struct Agg {
    int n = 0;
    double rate = 0.0, delta = 0.0, delta_sq = 0.0, cost_delta = 0.0,
           wall = 0.0;
  };
  std::map<Method, Agg> aggs;
  for (const auto& c : result.cells) {
    if (!c.ok) continue;
    auto b = baseline.find(c.instance_index);
    if (b == baseline.end()) continue;
    double d_pp = 100.0 * (c.mean_service_rate - b->second->mean_service_rate);
    Agg& a = aggs[c.method];
    ++a.n;
    a.rate += c.mean_service_rate;
    a.delta += d_pp;
    a.delta_sq += d_pp * d_pp;
    a.cost_delta += c.mean_cost - b->second->mean_cost;
    a.wall += c.learn_wall_s;
  }

  std::ostringstream out;
  out << "method,instances,mean_rate,mean_delta_pp,sd_delta_pp,"
         "mean_cost_delta,mean_wall_s\n";
  for (const auto& [m, a] : aggs) {
    double mean_d = a.delta / a.n;
    double var = a.n > 1 ? (a.delta_sq - a.n * mean_d * mean_d) / (a.n - 1)
                         : 0.0;
    out << method_to_string(m) << "," << a.n << "," << a.rate / a.n << ","
        << mean_d << "," << std::sqrt(std::max(0.0, var)) << ","
        << a.cost_delta / a.n << "," << a.wall / a.n << "\n";
  }
  return out.str();
}

}  // namespace drrp
