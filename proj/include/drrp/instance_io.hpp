#pragma once

#include <iosfwd>
#include <string>

#include "drrp/instance.hpp"
#include "drrp/scenario.hpp"

namespace drrp {

/// Canonical JSON text for an instance file. Fixed key order and sorted
/// entry arrays, so serialize(parse(serialize(x))) is byte-identical to
/// serialize(x).
std::string instance_to_json(const NetworkInstance& instance,
                             const DemandModel& model);

/// Parses an instance file. Throws std::runtime_error with a description
/// on malformed input.
std::pair<NetworkInstance, DemandModel> instance_from_json(
    const std::string& text);

void save_instance(const std::string& path, const NetworkInstance& instance,
                   const DemandModel& model);
std::pair<NetworkInstance, DemandModel> load_instance(const std::string& path);

/// Plan CSV: rows "z,t,i,j,count" and "y,t,i,y_plus,y_minus".
std::string plan_to_csv(const RebalancePlan& plan);
RebalancePlan plan_from_csv(const std::string& text);

}  // namespace drrp
