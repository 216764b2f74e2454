#include "drrp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drrp {

std::vector<std::string> DemandModel::validate() const {
  std::vector<std::string> out;
  for (const auto& [key, rate] : rates) {
    if (rate < 0.0) {
      std::ostringstream s;
      s << "negative rate at (" << key.i << "," << key.j << ",t=" << key.t
        << ",k=" << key.k << ")";
      out.push_back(s.str());
    }
    if (key.t < 1) out.push_back("rate entry with start step < 1");
    if (key.k < 0) out.push_back("rate entry with negative duration");
  }
  if (value_low > value_high)
    out.push_back("value_low exceeds value_high");
  if (value_low < Money{}) out.push_back("negative journey values");
  return out;
}

double DemandModel::total_rate() const {
  double s = 0.0;
  for (const auto& [key, rate] : rates) s += rate;
  return s;
}

DemandScenario sample_scenario(const DemandModel& model, std::uint64_t seed,
                               std::uint64_t substream) {
  return sample_scenario(model, seed, RngStreamId::kScenario, substream);
}

DemandScenario sample_scenario(const DemandModel& model, std::uint64_t seed,
                               RngStreamId stream, std::uint64_t substream) {
  RngStream rng(seed, stream, substream);
  DemandScenario sc;
  // Map iteration order is deterministic, so the draw sequence is too.
  for (const auto& [key, rate] : model.rates) {
    int count = rng.poisson(rate);
    if (count <= 0) continue;
    std::vector<Money> slopes;
    slopes.reserve(count);
    for (int c = 0; c < count; ++c)
      slopes.push_back(Money::from_dollars(
          rng.uniform(model.value_low.dollars(), model.value_high.dollars())));
    std::sort(slopes.begin(), slopes.end());
    sc.entries[key] = std::move(slopes);
  }
  return sc;
}

DemandScenario expected_scenario(const DemandModel& model) {
  DemandScenario sc;
  const Money mid = Money::from_micros(
      (model.value_low.micros() + model.value_high.micros()) / 2);
  for (const auto& [key, rate] : model.rates) {
    // Round half to even so aggregate counts track the rates without bias.
    double nearest = std::nearbyint(rate);
    if (std::abs(rate - std::trunc(rate) - 0.5) < 1e-12) {
      double lo = std::floor(rate);
      nearest = (static_cast<long long>(lo) % 2 == 0) ? lo : lo + 1.0;
    }
    int count = static_cast<int>(nearest);
    if (count <= 0) continue;
    sc.entries[key] = std::vector<Money>(count, mid);
  }
  return sc;
}

}  // namespace drrp
