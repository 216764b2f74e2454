// Command-line front end: benchmark generation, method runs, Monte-Carlo
// evaluation, relaxation-gap studies, experiment suites, and trip-history
// ingestion.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drrp/config.hpp"
#include "drrp/evaluate.hpp"
#include "drrp/instance_io.hpp"
#include "drrp/scenario.hpp"
#include "drrp/spar.hpp"
#include "drrp/suite.hpp"

namespace fs = std::filesystem;
using namespace drrp;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SuiteConfig load_suite_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  return suite_config_from_ini(parse_ini(in));
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

int main(int argc, char** argv) {
  CLI::App app{"Dynamic repositioning planner for shared-mobility systems"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", method_name = "m2-i";
  std::uint64_t seed = 1;
  int iters = 0, eval_scenarios = 100;
  double time_limit = 0.0;

  // ---- generate ----
  auto* gen = app.add_subcommand(
      "generate", "Generate a benchmark instance (grid family)");
  gen->add_option("--config", config_path, "INI file; [grid] section is used");
  gen->add_option("--seed", seed, "Instance RNG seed");
  gen->add_option("--out-dir", out_dir, "Output directory");
  bool emit_example = false;
  gen->add_flag("--example-config", emit_example,
                "Write a commented example config and exit");

  // ---- run ----
  auto* run = app.add_subcommand("run", "Run one planning method");
  std::string run_instance;
  run->add_option("instance", run_instance, "Instance JSON file")->required();
  run->add_option("--config", config_path, "INI file for limits/steps");
  run->add_option("--method", method_name, "na|m1|m2-r|m2-hi|m2-i|m3");
  run->add_option("--iters", iters, "Learning iterations (0 = default)");
  run->add_option("--seed", seed, "Run seed (scenario streams)");
  run->add_option("--eval-scenarios", eval_scenarios,
                  "Monte-Carlo scenarios for the final plan (0 = skip)");
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--time-limit", time_limit,
                  "Final integer solve limit, seconds (0 = config default)");

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate", "Monte-Carlo evaluate a plan");
  std::string ev_instance, ev_plan;
  ev->add_option("instance", ev_instance, "Instance JSON file")->required();
  ev->add_option("plan", ev_plan, "Plan CSV file")->required();
  ev->add_option("--eval-scenarios", eval_scenarios, "Number of scenarios");
  ev->add_option("--seed", seed, "Evaluation stream seed");
  ev->add_option("--out-dir", out_dir, "Output directory");

  // ---- lp-gap ----
  auto* gap = app.add_subcommand(
      "lp-gap", "Relaxation-strength study on deterministic instances");
  std::vector<int> sides{2, 3};
  std::vector<int> fleets{1, 3};
  int gap_instances = 10;
  double gap_tol = 1e-3;
  gap->add_option("--sides", sides, "Grid sides (stations = side^2)");
  gap->add_option("--fleets", fleets, "Fleet sizes");
  gap->add_option("--instances", gap_instances, "Instances per cell");
  gap->add_option("--seed", seed, "Base instance seed");
  gap->add_option("--time-limit", time_limit, "MIP limit, seconds");
  gap->add_option("--gap", gap_tol, "MIP relative gap");
  gap->add_option("--config", config_path, "INI file; [grid] as the family");
  gap->add_option("--out-dir", out_dir, "Output directory");

  // ---- suite ----
  auto* suite = app.add_subcommand("suite", "Run a full experiment suite");
  suite->add_option("--config", config_path, "Suite INI file")->required();
  suite->add_option("--out-dir", out_dir, "Output directory");

  // ---- ingest ----
  auto* ing = app.add_subcommand(
      "ingest", "Bin a trip-history CSV into nominal demand rates");
  std::string trips_path, stations_path;
  int ing_T = 12, ing_K = 2, step_minutes = 120;
  ing->add_option("trips", trips_path, "Trip CSV")->required();
  ing->add_option("--stations", stations_path,
                  "Station CSV: name,capacity (ids assigned in file order)")
      ->required();
  ing->add_option("--horizon", ing_T, "Steps per day");
  ing->add_option("--max-duration", ing_K, "Max journey duration, steps");
  ing->add_option("--step-minutes", step_minutes, "Minutes per step");
  ing->add_option("--out-dir", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (emit_example) {
        write_file(fs::path(out_dir) / "example_config.ini", example_config());
        std::cout << (fs::path(out_dir) / "example_config.ini").string()
                  << "\n";
        return 0;
      }
      GridGenParams gp;
      if (!config_path.empty()) gp = load_suite_config(config_path).grid;
      gp.rng_seed = seed;
      auto [inst, model] = generate_grid_instance(gp);
      fs::path out = fs::path(out_dir) /
                     ("instance_seed" + std::to_string(seed) + ".json");
      write_file(out, instance_to_json(inst, model));
      std::cout << out.string() << "\n";
      return 0;
    }

    if (run->parsed()) {
      auto [inst, model] = instance_from_json(read_file(run_instance));
      SuiteConfig sc;
      if (!config_path.empty()) sc = load_suite_config(config_path);
      sc.iters = iters;
      SparConfig cfg = spar_config_for(sc, method_from_string(method_name),
                                       seed);
      if (time_limit > 0.0) cfg.final_time_limit_s = time_limit;
      SparRunReport rep = run_spar(inst, model, cfg);

      fs::create_directories(out_dir);
      std::string stem = method_to_string(cfg.method);
      write_file(fs::path(out_dir) / (stem + "_plan.csv"),
                 plan_to_csv(rep.plan));
      if (!rep.iterations.empty())
        write_file(fs::path(out_dir) / (stem + "_iterations.csv"),
                   iterations_csv(rep));
      if (!rep.theta_csv.empty())
        write_file(fs::path(out_dir) / (stem + "_theta.csv"),
                   "i,t,y_prime,slope,iteration\n" + rep.theta_csv);

      nlohmann::ordered_json manifest;
      manifest["instance"] = run_instance;
      manifest["method"] = stem;
      manifest["seed"] = cfg.seed;
      manifest["iterations"] = cfg.n_max;
      manifest["rel_gap"] = cfg.rel_gap;
      manifest["wall_s"] = rep.wall_s;
      manifest["finalize_timed_out"] = rep.finalize_timed_out;
      manifest["warnings"] = rep.warnings;

      if (eval_scenarios > 0) {
        EvaluationResult res =
            evaluate_plan(inst, model, rep.plan, eval_scenarios, seed);
        write_file(fs::path(out_dir) / (stem + "_evaluation.csv"),
                   evaluation_to_csv(res));
        manifest["mean_service_rate"] = res.mean_service_rate;
        manifest["mean_cost"] = res.mean_cost;
        std::cout << stem << ": mean service rate " << res.mean_service_rate
                  << " over " << eval_scenarios << " scenarios\n";
      }
      write_file(fs::path(out_dir) / (stem + "_manifest.json"),
                 manifest.dump(2) + "\n");
      return rep.finalize_timed_out ? 2 : 0;
    }

    if (ev->parsed()) {
      auto [inst, model] = instance_from_json(read_file(ev_instance));
      RebalancePlan plan = plan_from_csv(read_file(ev_plan));
      std::vector<std::string> why;
      if (!check_plan_feasible(inst, plan, &why)) {
        for (const auto& w : why) std::cerr << "plan: " << w << "\n";
        return 1;
      }
      EvaluationResult res =
          evaluate_plan(inst, model, plan, eval_scenarios, seed);
      write_file(fs::path(out_dir) / "evaluation.csv",
                 evaluation_to_csv(res));
      std::cout << "mean service rate " << res.mean_service_rate << ", mean cost "
                << res.mean_cost << " over " << res.num_scenarios
                << " scenarios\n";
      return 0;
    }

    if (gap->parsed()) {
      GridGenParams base;
      if (!config_path.empty()) base = load_suite_config(config_path).grid;
      if (time_limit <= 0.0) time_limit = 600.0;
      auto rows =
          lp_gap_study(sides, fleets, gap_instances, seed, time_limit, gap_tol,
                       base);
      write_file(fs::path(out_dir) / "lp_gap.csv", lp_gap_to_csv(rows));
      bool any_timeout = false;
      for (const auto& r : rows) any_timeout |= r.timed_out;
      std::cout << (fs::path(out_dir) / "lp_gap.csv").string() << "\n";
      return any_timeout ? 2 : 0;
    }

    if (suite->parsed()) {
      SuiteConfig cfg = load_suite_config(config_path);
      SuiteResult res = run_suite(cfg, out_dir, &std::cout);
      std::cout << res.cells.size() << " cells, " << res.failures
                << " failed; results in " << out_dir << "\n";
      return res.failures > 0 ? 2 : 0;
    }

    if (ing->parsed()) {
      StationTable table;
      std::ifstream st(stations_path);
      if (!st) throw std::invalid_argument("cannot read " + stations_path);
      std::string line;
      NodeId next_id = 0;
      while (std::getline(st, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("stations file: expected name,capacity");
        std::string name = line.substr(0, comma);
        int cap = std::stoi(line.substr(comma + 1));
        table.id_by_name[name] = next_id;
        table.capacity[next_id] = cap;
        ++next_id;
      }
      std::ifstream trips(trips_path);
      if (!trips) throw std::invalid_argument("cannot read " + trips_path);
      IngestReport report;
      DemandModel model = ingest_trip_history(trips, table, ing_T, ing_K,
                                              step_minutes, &report);
      std::ostringstream rates;
      rates << "i,j,t,k,rate\n";
      for (const auto& [key, rate] : model.rates)
        rates << key.i << "," << key.j << "," << key.t << "," << key.k << ","
              << rate << "\n";
      write_file(fs::path(out_dir) / "rates.csv", rates.str());
      std::cout << "rows used " << report.rows_used << ", malformed "
                << report.rows_skipped_malformed << ", unknown station "
                << report.rows_skipped_unknown_station << ", days "
                << report.observed_days << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
