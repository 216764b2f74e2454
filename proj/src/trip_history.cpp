#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <string>

#include "drrp/scenario.hpp"

namespace drrp {

namespace {

bool parse_long(const std::string& s, long long* out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    *out = std::stoll(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

}  // namespace

DemandModel ingest_trip_history(std::istream& csv, const StationTable& stations,
                                int horizon_T, int max_duration_K,
                                int step_minutes, IngestReport* report) {
  IngestReport local;
  std::map<DemandKey, long> counts;
  std::set<long long> days;

  const long long step_seconds = 60LL * step_minutes;
  std::string line;
  bool first = true;
  while (std::getline(csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("start_station", 0) == 0) continue;  // header row
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) {
      ++local.rows_skipped_malformed;
      continue;
    }
    long long start_time = 0, duration = 0;
    if (!parse_long(cells[2], &start_time) || !parse_long(cells[3], &duration) ||
        start_time < 0 || duration < 0) {
      ++local.rows_skipped_malformed;
      continue;
    }
    auto it_i = stations.id_by_name.find(cells[0]);
    auto it_j = stations.id_by_name.find(cells[1]);
    if (it_i == stations.id_by_name.end() ||
        it_j == stations.id_by_name.end()) {
      ++local.rows_skipped_unknown_station;
      continue;
    }

    long long day = start_time / 86400;
    long long seconds_of_day = start_time % 86400;
    int t = static_cast<int>(seconds_of_day / step_seconds) % horizon_T + 1;
    int k = static_cast<int>(
        std::min<long long>((duration + step_seconds - 1) / step_seconds,
                            max_duration_K));
    days.insert(day);
    ++counts[{it_i->second, it_j->second, t, k}];
    ++local.rows_used;
  }

  local.observed_days = static_cast<long>(days.size());

  DemandModel model;
  model.value_low = Money::from_micros(500000);
  model.value_high = Money::from_micros(1500000);
  if (!days.empty()) {
    for (const auto& [key, c] : counts)
      model.rates[key] = static_cast<double>(c) / days.size();
  }
  if (report) *report = local;
  return model;
}

}  // namespace drrp
