#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "drrp/config.hpp"
#include "drrp/evaluate.hpp"
#include "drrp/suite.hpp"

using namespace drrp;
namespace fs = std::filesystem;

namespace {

IniFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ini(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("ini parsing handles sections, comments, and whitespace") {
  IniFile ini = parse(
      "# leading comment\n"
      "[alpha]\n"
      "key = value  ; trailing comment\n"
      "num = 42\n"
      "\n"
      "[beta]\n"
      "rate = 0.25\n");
  CHECK(ini.has("alpha", "key"));
  CHECK(ini.get_string("alpha", "key", "") == "value");
  CHECK(ini.get_int("alpha", "num", -1) == 42);
  CHECK(ini.get_double("beta", "rate", 0.0) == doctest::Approx(0.25));
  CHECK(ini.get_string("beta", "missing", "fb") == "fb");
  CHECK_FALSE(ini.has("gamma", "key"));
}

TEST_CASE("ini parsing rejects malformed input") {
  CHECK_THROWS_AS(parse("[a]\nkey = 1\nkey = 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[a]\nnot a pair\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[never closed\nkey = 1\n"), std::invalid_argument);
}

TEST_CASE("the example configuration parses into its documented values") {
  IniFile ini = parse(example_config());
  SuiteConfig cfg = suite_config_from_ini(ini);
  CHECK(cfg.grid.grid_side == 3);
  CHECK(cfg.grid.rv_count == 1);
  CHECK(cfg.grid.brackets == 6);
  REQUIRE(cfg.methods.size() == 3);
  CHECK(cfg.methods[0] == Method::kNA);
  CHECK(cfg.methods[1] == Method::kM1);
  CHECK(cfg.methods[2] == Method::kM2I);
  CHECK(cfg.instances == 10);
  CHECK(cfg.base_seed == 1);
  CHECK(cfg.eval_scenarios == 100);
  CHECK(cfg.iters == 0);
  CHECK(cfg.step_rule == StepRule::kHarmonic2040);
  CHECK(cfg.rel_gap == doctest::Approx(0.005));
}

TEST_CASE("unknown configuration keys fail loudly") {
  CHECK_THROWS_AS(suite_config_from_ini(parse(
                      "[grid]\nside = 3\nbogus_key = 1\n"
                      "[methods]\nlist = na\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(suite_config_from_ini(parse(
                      "[grid]\nside = 3\n[methods]\nlist = na\n"
                      "[limits]\nnot_a_limit = 9\n")),
                  std::invalid_argument);
}

TEST_CASE("per-method run settings follow the suite configuration") {
  SuiteConfig cfg = suite_config_from_ini(parse(example_config()));
  SparConfig a = spar_config_for(cfg, Method::kM2I, 17);
  CHECK(a.method == Method::kM2I);
  CHECK(a.seed == 17);
  CHECK(a.n_max == 50);
  SparConfig m3 = spar_config_for(cfg, Method::kM3, 17);
  CHECK(m3.n_max == 200);  // longer default for the cheap random iterates
  cfg.iters = 7;
  CHECK(spar_config_for(cfg, Method::kM3, 1).n_max == 7);
  CHECK(spar_config_for(cfg, Method::kM2R, 1).n_max == 7);
}

TEST_CASE("a tiny suite writes every artifact and reproduces itself") {
  SuiteConfig cfg;
  cfg.grid.grid_side = 2;
  cfg.grid.rv_count = 1;
  cfg.methods = {Method::kNA, Method::kM2I};
  cfg.instances = 2;
  cfg.base_seed = 5;
  cfg.eval_scenarios = 5;
  cfg.iters = 3;
  cfg.snapshot_every = 2;

  fs::path dir_a = fs::temp_directory_path() / "drrp_suite_a";
  fs::path dir_b = fs::temp_directory_path() / "drrp_suite_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  SuiteResult ra = run_suite(cfg, dir_a.string());
  CHECK(ra.failures == 0);
  REQUIRE(ra.cells.size() == 4);  // 2 instances x 2 methods
  for (const auto& c : ra.cells) {
    CHECK(c.ok);
    CHECK(c.mean_service_rate >= 0.0);
    CHECK(c.mean_service_rate <= 1.0);
  }

  CHECK(fs::exists(dir_a / "instance_1.json"));
  CHECK(fs::exists(dir_a / "instance_2.json"));
  CHECK(fs::exists(dir_a / "instance_1_na_plan.csv"));
  CHECK(fs::exists(dir_a / "instance_1_na_evaluation.csv"));
  CHECK(fs::exists(dir_a / "instance_1_m2-i_iterations.csv"));
  CHECK(fs::exists(dir_a / "instance_1_m2-i_theta.csv"));
  CHECK(fs::exists(dir_a / "summary.csv"));
  CHECK(fs::exists(dir_a / "deltas.csv"));

  std::string summary = slurp(dir_a / "summary.csv");
  CHECK(summary.rfind("instance,seed,method,ok,mean_service_rate", 0) == 0);
  std::string iters = slurp(dir_a / "instance_1_m2-i_iterations.csv");
  CHECK(iters.rfind("n,alpha,stage1_objective,scenario_demand", 0) == 0);
  CHECK(std::count(iters.begin(), iters.end(), '\n') == 4);  // header + 3

  SuiteResult rb = run_suite(cfg, dir_b.string());
  // Everything except the wall-clock column must reproduce byte for byte.
  auto strip_wall = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string out, line;
    while (std::getline(in, line)) {
      int commas = 0;
      std::size_t from = 0, to = line.size();
      for (std::size_t p = 0; p < line.size(); ++p) {
        if (line[p] != ',') continue;
        ++commas;
        if (commas == 8) from = p + 1;
        if (commas == 9) to = p;
      }
      out += line.substr(0, from) + line.substr(to) + '\n';
    }
    return out;
  };
  CHECK(strip_wall(slurp(dir_b / "summary.csv")) == strip_wall(summary));
  CHECK(slurp(dir_b / "instance_1_m2-i_theta.csv") ==
        slurp(dir_a / "instance_1_m2-i_theta.csv"));
}

TEST_CASE("the relaxation study reports consistent bounds") {
  std::vector<LpGapRow> rows = lp_gap_study({2}, {1}, 2, 40, 120.0, 0.0);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.grid_side == 2);
    CHECK(r.stations == 4);
    CHECK(r.fleet == 1);
    CHECK_FALSE(r.timed_out);
    CHECK(r.lp_objective <= r.mip_objective + 1e-6);
    CHECK(r.mip_bound <= r.mip_objective + 1e-6);
    CHECK(r.gap_percent >= -1e-6);
    CHECK(r.expected_demand > 0.0);
    CHECK(r.na_service_rate >= 0.0);
    // Serving a journey is worth far more than any repositioning cost, so
    // the optimized plan can trail the do-nothing baseline only by the
    // tiny direct-cost margin.
    CHECK(r.mip_service_rate >= r.na_service_rate - 0.05);
  }
  std::string csv = lp_gap_to_csv(rows);
  CHECK(csv.rfind("grid_side,stations,fleet,seed,mip_objective", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("plan evaluation is deterministic in the seed") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 9;
  auto [inst, model] = generate_grid_instance(gp);
  RebalancePlan empty;
  EvaluationResult a = evaluate_plan(inst, model, empty, 20, 3);
  EvaluationResult b = evaluate_plan(inst, model, empty, 20, 3);
  CHECK(a.mean_service_rate == b.mean_service_rate);
  CHECK(a.mean_cost == b.mean_cost);
  REQUIRE(a.scenarios.size() == 20);
  EvaluationResult c = evaluate_plan(inst, model, empty, 20, 4);
  CHECK(a.mean_service_rate != c.mean_service_rate);
  std::string csv = evaluation_to_csv(a);
  CHECK(csv.rfind("scenario,demand,served,service_rate,penalties,cost", 0) ==
        0);
}

TEST_CASE("trip history ingestion tallies rates per observed day") {
  StationTable stations;
  stations.id_by_name = {{"alpha", 1}, {"beta", 2}};
  stations.capacity = {{1, 10}, {2, 10}};
  std::istringstream csv(
      "start_station,end_station,start_time,duration_s\n"
      "alpha,beta,0,900\n"          // day 0, t=1, k=1
      "alpha,beta,86400,900\n"      // day 1, same tuple
      "beta,alpha,1800,1700\n"      // day 0, t=3, k=2
      "alpha,gamma,0,900\n"         // unknown station
      "alpha,beta,oops,900\n"       // malformed time
      "too,few\n");                 // malformed row
  IngestReport rep;
  DemandModel model = ingest_trip_history(csv, stations, 12, 2, 15, &rep);
  CHECK(rep.rows_used == 3);
  CHECK(rep.rows_skipped_unknown_station == 1);
  CHECK(rep.rows_skipped_malformed == 2);
  CHECK(rep.observed_days == 2);
  CHECK(model.rates.at({1, 2, 1, 1}) == doctest::Approx(1.0));  // 2 trips/2 days
  CHECK(model.rates.at({2, 1, 3, 2}) == doctest::Approx(0.5));
  CHECK(model.validate().empty());
}
