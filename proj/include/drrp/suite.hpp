#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "drrp/config.hpp"
#include "drrp/evaluate.hpp"
#include "drrp/spar.hpp"

namespace drrp {

/// One row of the relaxation-strength study.
struct LpGapRow {
  int grid_side = 0;
  int stations = 0;
  int fleet = 0;
  std::uint64_t seed = 0;
  double mip_objective = 0.0;  // best incumbent, dollars
  double mip_bound = 0.0;      // best proven lower bound
  double lp_objective = 0.0;   // relaxation value
  double gap_percent = 0.0;    // 100 * (mip - lp) / mip
  double mip_time_s = 0.0;
  double lp_time_s = 0.0;
  double expected_demand = 0.0;  // journeys over the whole horizon
  double na_service_rate = 0.0;
  double mip_service_rate = 0.0;
  bool timed_out = false;
};

/// Deterministic-demand relaxation study: unit journey values, expected
/// counts, one monolithic MIP and its LP bound per (grid side, fleet,
/// instance). Instance seeds are base_seed, base_seed+1, ... per cell.
std::vector<LpGapRow> lp_gap_study(const std::vector<int>& grid_sides,
                                   const std::vector<int>& fleets,
                                   int instances, std::uint64_t base_seed,
                                   double time_limit_s = 600.0,
                                   double rel_gap = 1e-3,
                                   GridGenParams base = GridGenParams{});

std::string lp_gap_to_csv(const std::vector<LpGapRow>& rows);

/// One (instance, method) cell of an experiment suite.
struct SuiteCell {
  int instance_index = 0;  // 1-based
  std::uint64_t seed = 0;
  Method method = Method::kNA;
  bool ok = false;
  std::string error;
  double mean_service_rate = 0.0;
  double sd_service_rate = 0.0;
  double mean_cost = 0.0;
  double plan_cost = 0.0;  // first-stage direct cost, dollars
  double learn_wall_s = 0.0;
};

struct SuiteResult {
  std::vector<SuiteCell> cells;
  int failures = 0;
};

/// Runs the full cross product instances x methods, writing per-cell
/// artifacts (iteration metrics, plan, slope snapshots, evaluation) and
/// merged summary/delta/timing tables under out_dir. Cell failures are
/// recorded and the suite continues.
SuiteResult run_suite(const SuiteConfig& config, const std::string& out_dir,
                      std::ostream* log = nullptr);

std::string suite_summary_csv(const SuiteResult& result);

/// Per-method aggregates against the NA baseline (paired by instance):
/// "method,instances,mean_rate,mean_delta_pp,sd_delta_pp,mean_cost_delta,
/// mean_wall_s".
std::string suite_deltas_csv(const SuiteResult& result);

}  // namespace drrp
