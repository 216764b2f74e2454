#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "drrp/config.hpp"
#include "drrp/instance.hpp"
#include "drrp/instance_io.hpp"
#include "drrp/money.hpp"
#include "drrp/rng.hpp"
#include "drrp/scenario.hpp"

using namespace drrp;

TEST_CASE("money arithmetic is exact in micro-units") {
  Money a = Money::from_dollars(0.1);
  Money b = Money::from_dollars(0.2);
  CHECK((a + b).micros() == 300000);
  CHECK((b - a).micros() == 100000);
  CHECK((a * 3).micros() == 300000);
  CHECK((-a).micros() == -100000);
  CHECK(Money::from_micros(1500000).str() == "1.500000");
  CHECK(a < b);
  CHECK(Money::from_dollars(1.0).dollars() == doctest::Approx(1.0));
}

TEST_CASE("rng streams are deterministic and independent") {
  RngStream a(7, RngStreamId::kScenario, 3);
  RngStream b(7, RngStreamId::kScenario, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c(7, RngStreamId::kScenario, 4);
  RngStream d(7, RngStreamId::kEvaluation, 3);
  RngStream e(8, RngStreamId::kScenario, 3);
  RngStream f(7, RngStreamId::kScenario, 3);
  for (int i = 0; i < 100; ++i) f.next_u64();
  // No collision in the first draws across distinct keys.
  std::set<std::uint64_t> firsts = {RngStream(7, RngStreamId::kScenario, 3).next_u64(),
                                    c.next_u64(), d.next_u64(), e.next_u64()};
  CHECK(firsts.size() == 4);
}

TEST_CASE("rng uniform_int covers its range inclusively") {
  RngStream r(1, RngStreamId::kRandomActions);
  std::map<int, int> counts;
  for (int i = 0; i < 6000; ++i) {
    int v = r.uniform_int(-2, 2);
    CHECK(v >= -2);
    CHECK(v <= 2);
    ++counts[v];
  }
  CHECK(counts.size() == 5);
  // Each of 5 values should appear close to 1200 times.
  for (const auto& [v, n] : counts) CHECK(std::abs(n - 1200) < 200);
}

TEST_CASE("rng poisson and normal match their moments") {
  RngStream r(2, RngStreamId::kScenario);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = r.poisson(3.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.03));
  CHECK(sq / n - mean * mean == doctest::Approx(3.0).epsilon(0.08));

  sum = sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = r.normal(5.0, 2.0);
    sum += x;
    sq += x * x;
  }
  mean = sum / n;
  CHECK(mean == doctest::Approx(5.0).epsilon(0.01));
  CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("generated grid instance validates and has documented shape") {
  GridGenParams gp;
  gp.grid_side = 3;
  gp.rng_seed = 11;
  auto [inst, model] = generate_grid_instance(gp);
  CHECK(validate_instance(inst).empty());
  CHECK(inst.sv_nodes.size() == 9);
  CHECK(inst.sv_edges.size() == 81);  // complete directed incl. self-loops
  // 4-neighbour RV grid plus self-loops: 9 + 24 directed neighbour edges.
  CHECK(inst.rv_edges.size() == 33);
  CHECK(inst.horizon_T == 12);
  CHECK(inst.fleet_size == 1);
  CHECK(inst.max_load_action == 10);
  for (NodeId i : inst.sv_nodes) CHECK(inst.fill0(i) == 5);
  CHECK(model.validate().empty());
  CHECK(model.total_rate() > 0.0);
  // Round trips (same origin and destination station) occur naturally.
  bool has_self = false;
  for (const auto& [key, rate] : model.rates)
    if (key.i == key.j) has_self = true;
  CHECK(has_self);
}

TEST_CASE("grid generation is deterministic per seed and rejects bad sizes") {
  GridGenParams gp;
  gp.rng_seed = 5;
  auto [i1, m1] = generate_grid_instance(gp);
  auto [i2, m2] = generate_grid_instance(gp);
  CHECK(instance_to_json(i1, m1) == instance_to_json(i2, m2));
  gp.rng_seed = 6;
  auto [i3, m3] = generate_grid_instance(gp);
  CHECK(instance_to_json(i1, m1) != instance_to_json(i3, m3));
  gp.grid_side = 1;
  CHECK_THROWS_AS(generate_grid_instance(gp), std::invalid_argument);
}

TEST_CASE("instance json round trip is byte identical") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 3;
  auto [inst, model] = generate_grid_instance(gp);
  std::string once = instance_to_json(inst, model);
  auto [inst2, model2] = instance_from_json(once);
  CHECK(instance_to_json(inst2, model2) == once);
  CHECK_THROWS(instance_from_json("{not json"));
}

TEST_CASE("plan csv round trip") {
  RebalancePlan p;
  p.z[{0, 1, 2}] = 1;
  p.b[{0, 1, 2}] = 3;
  p.y_plus[{1, 3}] = 2;
  p.y_minus[{0, 2}] = 4;
  RebalancePlan q = plan_from_csv(plan_to_csv(p));
  CHECK(q.zv(0, 1, 2) == 1);
  CHECK(q.bv(0, 1, 2) == 3);
  CHECK(q.yp(1, 3) == 2);
  CHECK(q.ym(0, 2) == 4);
  CHECK(plan_to_csv(q) == plan_to_csv(p));
}

TEST_CASE("plan feasibility checker flags violations") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 9;
  auto [inst, model] = generate_grid_instance(gp);

  RebalancePlan empty;
  CHECK(check_plan_feasible(inst, empty));

  // Onboard flow without a vehicle violates the nesting bound.
  RebalancePlan bad;
  bad.b[{0, 0, 1}] = 1;
  std::vector<std::string> why;
  CHECK_FALSE(check_plan_feasible(inst, bad, &why));
  CHECK_FALSE(why.empty());

  // Action above the per-slot cap.
  RebalancePlan big;
  big.y_minus[{0, 1}] = inst.max_load_action + 1;
  CHECK_FALSE(check_plan_feasible(inst, big));

  // Vehicle teleportation: flow out of a node with no vehicle arriving.
  RebalancePlan tele;
  NodeId far = inst.rv_nodes.back();
  NodeId start = 0;
  for (const auto& [e, c] : inst.initial_rv_position) start = e.second;
  REQUIRE(far != start);
  tele.z[{far, far, 1}] = 1;
  CHECK_FALSE(check_plan_feasible(inst, tele));
}

TEST_CASE("scenario sampling is deterministic and value-sorted") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 4;
  auto [inst, model] = generate_grid_instance(gp);
  DemandScenario a = sample_scenario(model, 42, 7);
  DemandScenario b = sample_scenario(model, 42, 7);
  CHECK(a.entries == b.entries);
  DemandScenario c = sample_scenario(model, 42, 8);
  CHECK(a.entries != c.entries);
  for (const auto& [key, slopes] : a.entries) {
    CHECK_FALSE(slopes.empty());
    for (std::size_t k = 1; k < slopes.size(); ++k)
      CHECK(slopes[k - 1] <= slopes[k]);
    for (Money v : slopes) {
      CHECK(v >= model.value_low);
      CHECK(v <= model.value_high);
    }
  }
  // Explicit streams: the default overload draws from the scenario stream.
  DemandScenario d = sample_scenario(model, 42, RngStreamId::kScenario, 7);
  CHECK(d.entries == a.entries);
  DemandScenario e = sample_scenario(model, 42, RngStreamId::kEvaluation, 7);
  CHECK(e.entries != a.entries);
}

TEST_CASE("sampled demand tracks the nominal rates") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 12;
  auto [inst, model] = generate_grid_instance(gp);
  double want = model.total_rate();
  double got = 0.0;
  const int n = 400;
  for (int s = 1; s <= n; ++s)
    got += static_cast<double>(sample_scenario(model, 99, s).total_demand());
  got /= n;
  CHECK(got == doctest::Approx(want).epsilon(0.05));
}

TEST_CASE("expected scenario rounds half to even and uses midpoint values") {
  DemandModel m;
  m.value_low = Money::from_dollars(1.0);
  m.value_high = Money::from_dollars(2.0);
  m.rates[{0, 1, 1, 1}] = 2.5;   // -> 2
  m.rates[{0, 1, 2, 1}] = 3.5;   // -> 4
  m.rates[{0, 1, 3, 1}] = 0.4;   // -> 0 (dropped)
  m.rates[{0, 1, 4, 1}] = 1.2;   // -> 1
  DemandScenario sc = expected_scenario(m);
  CHECK(sc.demand({0, 1, 1, 1}) == 2);
  CHECK(sc.demand({0, 1, 2, 1}) == 4);
  CHECK(sc.demand({0, 1, 3, 1}) == 0);
  CHECK(sc.demand({0, 1, 4, 1}) == 1);
  for (const auto& [key, slopes] : sc.entries)
    for (Money v : slopes) CHECK(v == Money::from_dollars(1.5));
}

TEST_CASE("tuple enumeration is lexicographic and complete") {
  GridGenParams gp;
  gp.grid_side = 2;
  gp.rng_seed = 2;
  auto [inst, model] = generate_grid_instance(gp);
  TupleIndex idx = enumerate_tuples(inst);
  CHECK(idx.demand_tuples.size() ==
        inst.sv_edges.size() * static_cast<std::size_t>(inst.horizon_T) *
            (inst.max_duration_K + 1));
  CHECK(idx.action_slots.size() ==
        inst.action_nodes().size() * static_cast<std::size_t>(inst.horizon_T));
  for (std::size_t k = 1; k < idx.demand_tuples.size(); ++k) {
    const DemandKey& a = idx.demand_tuples[k - 1];
    const DemandKey& b = idx.demand_tuples[k];
    CHECK(std::tie(a.t, a.i, a.j, a.k) < std::tie(b.t, b.i, b.j, b.k));
  }
}

TEST_CASE("ini parser handles comments, trimming, and errors") {
  std::istringstream good(
      "top = 1\n[grid]\nside = 4  # inline comment\n; full comment\n\n"
      "rv_count=2\n");
  IniFile ini = parse_ini(good);
  CHECK(ini.get_string("", "top", "") == "1");
  CHECK(ini.get_int("grid", "side", 0) == 4);
  CHECK(ini.get_int("grid", "rv_count", 0) == 2);
  CHECK(ini.get_int("grid", "missing", 7) == 7);

  std::istringstream dup("[a]\nx = 1\nx = 2\n");
  CHECK_THROWS_AS(parse_ini(dup), std::invalid_argument);
  std::istringstream nokey("[a]\njust words\n");
  CHECK_THROWS_AS(parse_ini(nokey), std::invalid_argument);
  std::istringstream badsec("[a\nx = 1\n");
  CHECK_THROWS_AS(parse_ini(badsec), std::invalid_argument);
}

TEST_CASE("example config parses into a suite config") {
  std::istringstream in(example_config());
  SuiteConfig cfg = suite_config_from_ini(parse_ini(in));
  CHECK(cfg.grid.grid_side == 3);
  CHECK(cfg.instances == 10);
  CHECK(cfg.eval_scenarios == 100);
  CHECK(cfg.methods.size() == 3);
  CHECK(cfg.methods[0] == Method::kNA);

  std::istringstream typo("[grid]\nsides = 3\n");
  CHECK_THROWS_AS(suite_config_from_ini(parse_ini(typo)),
                  std::invalid_argument);
  std::istringstream badm("[methods]\nlist = m9\n");
  CHECK_THROWS_AS(suite_config_from_ini(parse_ini(badm)),
                  std::invalid_argument);
}

TEST_CASE("per-method defaults give m3 its longer learning run") {
  SuiteConfig cfg;
  cfg.methods = {Method::kM3};
  CHECK(spar_config_for(cfg, Method::kM2I, 1).n_max == 50);
  CHECK(spar_config_for(cfg, Method::kM3, 1).n_max == 200);
  cfg.iters = 7;
  CHECK(spar_config_for(cfg, Method::kM3, 1).n_max == 7);
}

TEST_CASE("trip-history ingestion recovers known rates") {
  // Synthetic log: two stations, fixed per-step rates, many days.
  StationTable table;
  table.id_by_name["alpha"] = 0;
  table.capacity[0] = 10;
  table.id_by_name["beta"] = 1;
  table.capacity[1] = 10;

  const int T = 4, K = 2, step_min = 360;  // 6-hour steps
  RngStream rng(123, RngStreamId::kInstance);
  std::map<DemandKey, double> want;
  want[{0, 1, 1, 1}] = 3.0;
  want[{1, 0, 3, 1}] = 1.5;
  want[{0, 0, 2, 0}] = 2.0;

  std::ostringstream csv;
  csv << "start_station,end_station,start_time,duration_seconds\n";
  const int days = 2000;
  std::map<DemandKey, long> emitted;
  auto name = [](NodeId i) { return i == 0 ? "alpha" : "beta"; };
  for (int d = 0; d < days; ++d) {
    for (const auto& [key, rate] : want) {
      int n = rng.poisson(rate);
      emitted[key] += n;
      for (int c = 0; c < n; ++c) {
        long day_start = 86400L * d;
        long sec = day_start + (key.t - 1) * step_min * 60 +
                   rng.uniform_int(0, step_min * 60 - 1);
        long dur = key.k == 0 ? 0 : (key.k - 1) * step_min * 60 + 60;
        csv << name(key.i) << "," << name(key.j) << "," << sec << "," << dur
            << "\n";
      }
    }
  }
  csv << "garbage line with,too few\n";
  csv << "gamma,beta,1000,60\n";  // unknown station

  std::istringstream in(csv.str());
  IngestReport report;
  DemandModel model = ingest_trip_history(in, table, T, K, step_min, &report);
  CHECK(report.rows_skipped_malformed == 1);
  CHECK(report.rows_skipped_unknown_station == 1);
  // A day with zero trips everywhere is possible but rare.
  CHECK(report.observed_days >= days - 20);
  CHECK(report.observed_days <= days);
  for (const auto& [key, rate] : want) {
    double recovered = model.rates.count(key) ? model.rates.at(key) : 0.0;
    double observed =
        static_cast<double>(emitted[key]) / report.observed_days;
    CHECK(recovered == doctest::Approx(observed).epsilon(1e-9));
    CHECK(recovered == doctest::Approx(rate).epsilon(0.05));
  }
}
