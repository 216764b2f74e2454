#include "drrp/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace drrp {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json edges_json(const std::vector<Edge>& edges) {
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  ordered_json arr = ordered_json::array();
  for (const auto& [i, j] : sorted) arr.push_back({i, j});
  return arr;
}

template <typename K, typename F>
ordered_json map_json(const std::map<K, int>& m, F&& row) {
  ordered_json arr = ordered_json::array();
  for (const auto& [k, v] : m) arr.push_back(row(k, v));
  return arr;
}

}  // namespace

std::string instance_to_json(const NetworkInstance& inst,
                             const DemandModel& model) {
  ordered_json j;
  std::vector<NodeId> sv = inst.sv_nodes, rv = inst.rv_nodes;
  std::sort(sv.begin(), sv.end());
  std::sort(rv.begin(), rv.end());
  j["sv_nodes"] = sv;
  j["sv_edges"] = edges_json(inst.sv_edges);
  j["rv_nodes"] = rv;
  j["rv_edges"] = edges_json(inst.rv_edges);
  j["T"] = inst.horizon_T;
  j["K"] = inst.max_duration_K;

  ordered_json caps;
  caps["station"] = map_json(inst.station_capacity, [](NodeId i, int v) {
    return ordered_json::array({i, v});
  });
  caps["rv"] = inst.rv_capacity;
  caps["max_load"] = inst.max_load_action;
  j["capacities"] = caps;

  ordered_json costs;
  {
    ordered_json arr = ordered_json::array();
    for (const auto& [e, c] : inst.rv_move_cost)
      arr.push_back({e.first, e.second, c.micros()});
    costs["rv_move"] = arr;
  }
  {
    ordered_json arr = ordered_json::array();
    for (const auto& [k, c] : inst.rv_move_cost_t)
      arr.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k),
                     c.micros()});
    costs["rv_move_t"] = arr;
  }
  {
    ordered_json arr = ordered_json::array();
    for (const auto& [i, c] : inst.load_cost) arr.push_back({i, c.micros()});
    costs["load"] = arr;
  }
  {
    ordered_json arr = ordered_json::array();
    for (const auto& [s, c] : inst.load_cost_t)
      arr.push_back({s.i, s.t, c.micros()});
    costs["load_t"] = arr;
  }
  costs["penalty"] = inst.feasibility_penalty.micros();
  j["costs"] = costs;

  j["fleet"] = inst.fleet_size;

  ordered_json init;
  init["fill"] = map_json(inst.initial_fill, [](NodeId i, int v) {
    return ordered_json::array({i, v});
  });
  init["rv_position"] = map_json(inst.initial_rv_position, [](Edge e, int v) {
    return ordered_json::array({e.first, e.second, v});
  });
  init["onboard"] = map_json(inst.initial_onboard, [](Edge e, int v) {
    return ordered_json::array({e.first, e.second, v});
  });
  {
    ordered_json arr = ordered_json::array();
    std::vector<InProgressTrip> trips = inst.in_progress_trips;
    std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
      return std::tie(a.t, a.i, a.j, a.k) < std::tie(b.t, b.i, b.j, b.k);
    });
    for (const auto& tr : trips)
      arr.push_back({tr.i, tr.j, tr.t, tr.k, tr.count});
    init["in_progress"] = arr;
  }
  j["initial_state"] = init;

  ordered_json dem;
  {
    ordered_json arr = ordered_json::array();
    for (const auto& [k, rate] : model.rates)
      arr.push_back({k.i, k.j, k.t, k.k, rate});
    dem["entries"] = arr;
  }
  dem["value_low"] = model.value_low.micros();
  dem["value_high"] = model.value_high.micros();
  j["demand_rates"] = dem;

  return j.dump(2) + "\n";
}

std::pair<NetworkInstance, DemandModel> instance_from_json(
    const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("instance parse error: ") + e.what());
  }
  NetworkInstance inst;
  DemandModel model;
  try {
    inst.sv_nodes = j.at("sv_nodes").get<std::vector<NodeId>>();
    for (const auto& e : j.at("sv_edges"))
      inst.sv_edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    inst.rv_nodes = j.at("rv_nodes").get<std::vector<NodeId>>();
    for (const auto& e : j.at("rv_edges"))
      inst.rv_edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    inst.horizon_T = j.at("T").get<int>();
    inst.max_duration_K = j.at("K").get<int>();

    const auto& caps = j.at("capacities");
    for (const auto& e : caps.at("station"))
      inst.station_capacity[e.at(0).get<NodeId>()] = e.at(1).get<int>();
    inst.rv_capacity = caps.at("rv").get<int>();
    inst.max_load_action = caps.at("max_load").get<int>();

    const auto& costs = j.at("costs");
    for (const auto& e : costs.at("rv_move"))
      inst.rv_move_cost[{e.at(0).get<NodeId>(), e.at(1).get<NodeId>()}] =
          Money::from_micros(e.at(2).get<std::int64_t>());
    for (const auto& e : costs.at("rv_move_t"))
      inst.rv_move_cost_t[{e.at(0).get<NodeId>(), e.at(1).get<NodeId>(),
                           e.at(2).get<int>()}] =
          Money::from_micros(e.at(3).get<std::int64_t>());
    for (const auto& e : costs.at("load"))
      inst.load_cost[e.at(0).get<NodeId>()] =
          Money::from_micros(e.at(1).get<std::int64_t>());
    for (const auto& e : costs.at("load_t"))
      inst.load_cost_t[{e.at(0).get<NodeId>(), e.at(1).get<int>()}] =
          Money::from_micros(e.at(2).get<std::int64_t>());
    inst.feasibility_penalty =
        Money::from_micros(costs.at("penalty").get<std::int64_t>());

    inst.fleet_size = j.at("fleet").get<int>();

    const auto& init = j.at("initial_state");
    for (const auto& e : init.at("fill"))
      inst.initial_fill[e.at(0).get<NodeId>()] = e.at(1).get<int>();
    for (const auto& e : init.at("rv_position"))
      inst.initial_rv_position[{e.at(0).get<NodeId>(), e.at(1).get<NodeId>()}] =
          e.at(2).get<int>();
    for (const auto& e : init.at("onboard"))
      inst.initial_onboard[{e.at(0).get<NodeId>(), e.at(1).get<NodeId>()}] =
          e.at(2).get<int>();
    for (const auto& e : init.at("in_progress"))
      inst.in_progress_trips.push_back(
          {e.at(0).get<NodeId>(), e.at(1).get<NodeId>(), e.at(2).get<int>(),
           e.at(3).get<int>(), e.at(4).get<int>()});

    const auto& dem = j.at("demand_rates");
    for (const auto& e : dem.at("entries"))
      model.rates[{e.at(0).get<NodeId>(), e.at(1).get<NodeId>(),
                   e.at(2).get<int>(), e.at(3).get<int>()}] =
          e.at(4).get<double>();
    model.value_low = Money::from_micros(dem.at("value_low").get<std::int64_t>());
    model.value_high =
        Money::from_micros(dem.at("value_high").get<std::int64_t>());
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("instance field error: ") + e.what());
  }
  return {std::move(inst), std::move(model)};
}

void save_instance(const std::string& path, const NetworkInstance& inst,
                   const DemandModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(inst, model);
}

std::pair<NetworkInstance, DemandModel> load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

std::string plan_to_csv(const RebalancePlan& plan) {
  std::ostringstream out;
  out << "kind,t,i,j,count,y_plus,y_minus\n";
  for (const auto& [key, v] : plan.z) {
    auto [i, j, t] = key;
    out << "z," << t << "," << i << "," << j << "," << v << ",,\n";
  }
  for (const auto& [key, v] : plan.b) {
    auto [i, j, t] = key;
    out << "b," << t << "," << i << "," << j << "," << v << ",,\n";
  }
  std::set<ActionSlot> slots;
  for (const auto& [s, v] : plan.y_plus) slots.insert(s);
  for (const auto& [s, v] : plan.y_minus) slots.insert(s);
  for (const auto& s : slots) {
    out << "y," << s.t << "," << s.i << ",,," << plan.yp(s.i, s.t) << ","
        << plan.ym(s.i, s.t) << "\n";
  }
  return out.str();
}

RebalancePlan plan_from_csv(const std::string& text) {
  RebalancePlan plan;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(7);
    const std::string& kind = cells[0];
    int t = std::stoi(cells[1]);
    NodeId i = std::stoi(cells[2]);
    if (kind == "z" || kind == "b") {
      NodeId jn = std::stoi(cells[3]);
      int v = std::stoi(cells[4]);
      if (v != 0) (kind == "z" ? plan.z : plan.b)[{i, jn, t}] = v;
    } else if (kind == "y") {
      int yp = std::stoi(cells[5]);
      int ym = std::stoi(cells[6]);
      if (yp != 0) plan.y_plus[{i, t}] = yp;
      if (ym != 0) plan.y_minus[{i, t}] = ym;
    }
  }
  return plan;
}

}  // namespace drrp
