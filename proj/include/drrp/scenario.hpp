#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "drrp/instance.hpp"
#include "drrp/rng.hpp"

namespace drrp {

/// Nominal demand rates plus the journey-value distribution. A rate entry
/// is the expected number of journeys per step for its tuple; absent
/// tuples have rate zero.
struct DemandModel {
  std::map<DemandKey, double> rates;
  Money value_low;
  Money value_high;

  std::vector<std::string> validate() const;
  double total_rate() const;
};

/// Draws one scenario: per tuple an independent Poisson count with the
/// tuple's rate, and for each realized journey an independent value
/// uniform on [value_low, value_high]; values sorted ascending.
/// Deterministic given (model, seed, substream).
DemandScenario sample_scenario(const DemandModel& model, std::uint64_t seed,
                               std::uint64_t substream = 0);

/// Same draw, but from an explicit stream (e.g. the evaluation stream).
DemandScenario sample_scenario(const DemandModel& model, std::uint64_t seed,
                               RngStreamId stream, std::uint64_t substream);

/// Deterministic-equivalent scenario: counts are the rates rounded
/// half-to-even; every journey is valued at the distribution midpoint.
DemandScenario expected_scenario(const DemandModel& model);

/// Parameters of the clustered-demand grid benchmark generator.
struct GridGenParams {
  int grid_side = 3;          // stations = grid_side^2, on [0,100]^2
  int origin_clusters = 3;    // O
  int dest_clusters = 5;      // D
  int brackets = 6;           // B
  int bracket_len = 2;        // T_B; horizon T = B * T_B
  int max_duration = 2;       // K
  int rv_count = 1;           // |V|
  double trip_mean_frac = 0.15;
  double trip_sd_frac = 0.075;
  double sv_speed = 0.0;      // distance units per step; 0 = 125/sqrt(N_SV)
  int station_cap = 10;       // per-station SV capacity; fill starts at half
  int rv_capacity = 5;
  int max_load_action = 10;   // clamped to rv_capacity * rv_count
  Money move_cost = Money::from_micros(1000);   // per RV edge, 0 on self-loops
  Money load_cost = Money::from_micros(1000);   // per SV load/unload
  Money penalty = Money::from_micros(20000000); // per phantom SV
  Money value_low = Money::from_micros(500000);
  Money value_high = Money::from_micros(1500000);
  std::uint64_t rng_seed = 0;

  int horizon() const { return brackets * bracket_len; }
  int num_stations() const { return grid_side * grid_side; }
  int sv_fleet() const { return station_cap / 2 * num_stations(); }
  double speed() const;
};

/// Builds one standardized benchmark: square-grid stations, fully
/// connected SV graph, 4-neighbour RV graph with zero-cost self-loops,
/// clustered nominal demand, and random initial RV positions.
/// Throws std::invalid_argument for grid_side < 2.
std::pair<NetworkInstance, DemandModel> generate_grid_instance(
    const GridGenParams& params);

/// Station metadata for trip-history ingestion.
struct StationTable {
  std::map<std::string, NodeId> id_by_name;
  std::map<NodeId, int> capacity;
};

struct IngestReport {
  long rows_used = 0;
  long rows_skipped_unknown_station = 0;
  long rows_skipped_malformed = 0;
  long observed_days = 0;
};

/// Bins a trip CSV (columns start_station,end_station,start_time,
/// duration_seconds; start_time as unix seconds) into per-step rates.
/// The time-of-day bucket is floor((seconds_since_midnight)/step) + 1,
/// wrapped into 1..T; counts are normalized by the number of distinct
/// observed days.
DemandModel ingest_trip_history(std::istream& csv, const StationTable& stations,
                                int horizon_T, int max_duration_K,
                                int step_minutes, IngestReport* report = nullptr);

}  // namespace drrp
