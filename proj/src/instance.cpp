#include "drrp/instance.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace drrp {

namespace {
template <typename Map, typename Key>
int get_or_zero(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}
}  // namespace

Money NetworkInstance::move_cost(NodeId i, NodeId j, int t) const {
  auto ot = rv_move_cost_t.find(EdgeStep{i, j, t});
  if (ot != rv_move_cost_t.end()) return ot->second;
  auto it = rv_move_cost.find(Edge{i, j});
  return it == rv_move_cost.end() ? Money{} : it->second;
}

Money NetworkInstance::unload_load_cost(NodeId i, int t) const {
  auto ot = load_cost_t.find(ActionSlot{i, t});
  if (ot != load_cost_t.end()) return ot->second;
  auto it = load_cost.find(i);
  return it == load_cost.end() ? Money{} : it->second;
}

int NetworkInstance::capacity(NodeId i) const {
  return get_or_zero(station_capacity, i);
}

int NetworkInstance::fill0(NodeId i) const {
  return get_or_zero(initial_fill, i);
}

std::vector<NodeId> NetworkInstance::action_nodes() const {
  std::set<NodeId> sv(sv_nodes.begin(), sv_nodes.end());
  std::vector<NodeId> out;
  for (NodeId n : rv_nodes)
    if (sv.count(n)) out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

bool NetworkInstance::has_rv_edge(NodeId i, NodeId j) const {
  return std::find(rv_edges.begin(), rv_edges.end(), Edge{i, j}) !=
         rv_edges.end();
}

long DemandScenario::total_demand() const {
  long n = 0;
  for (const auto& [k, slopes] : entries) n += static_cast<long>(slopes.size());
  return n;
}

Money DemandScenario::total_value() const {
  Money v;
  for (const auto& [k, slopes] : entries)
    for (Money s : slopes) v += s;
  return v;
}

int RebalancePlan::zv(NodeId i, NodeId j, int t) const {
  return get_or_zero(z, EdgeStep{i, j, t});
}
int RebalancePlan::bv(NodeId i, NodeId j, int t) const {
  return get_or_zero(b, EdgeStep{i, j, t});
}
int RebalancePlan::yp(NodeId i, int t) const {
  return get_or_zero(y_plus, ActionSlot{i, t});
}
int RebalancePlan::ym(NodeId i, int t) const {
  return get_or_zero(y_minus, ActionSlot{i, t});
}

long Stage2Solution::total_served() const {
  long n = 0;
  for (const auto& [k, w] : served) n += w;
  return n;
}

long Stage2Solution::total_penalty() const {
  long n = 0;
  for (const auto& [k, p] : penalties) n += p.first + p.second;
  return n;
}

std::vector<std::string> validate_instance(const NetworkInstance& inst) {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& msg) { out.push_back(msg); };

  std::set<NodeId> sv(inst.sv_nodes.begin(), inst.sv_nodes.end());
  std::set<NodeId> rv(inst.rv_nodes.begin(), inst.rv_nodes.end());

  if (sv.size() != inst.sv_nodes.size()) fail("duplicate sv_nodes entries");
  if (rv.size() != inst.rv_nodes.size()) fail("duplicate rv_nodes entries");
  if (inst.horizon_T < 1) fail("horizon_T must be >= 1");
  if (inst.max_duration_K < 0) fail("max_duration_K must be >= 0");
  if (inst.rv_capacity < 0) fail("rv_capacity must be >= 0");
  if (inst.fleet_size < 0) fail("fleet_size must be >= 0");
  if (inst.max_load_action < 0) fail("max_load_action must be >= 0");

  bool intersects = false;
  for (NodeId n : rv)
    if (sv.count(n)) { intersects = true; break; }
  if (!intersects) fail("sv and rv node sets do not intersect");

  for (const auto& [i, j] : inst.sv_edges) {
    if (!sv.count(i) || !sv.count(j)) {
      std::ostringstream s;
      s << "sv_edge (" << i << "," << j << ") references unknown node";
      fail(s.str());
    }
  }
  for (const auto& [i, j] : inst.rv_edges) {
    if (!rv.count(i) || !rv.count(j)) {
      std::ostringstream s;
      s << "rv_edge (" << i << "," << j << ") references unknown node";
      fail(s.str());
    }
  }

  for (NodeId n : inst.sv_nodes) {
    int cap = inst.capacity(n);
    int d0 = inst.fill0(n);
    if (cap < 0) {
      std::ostringstream s;
      s << "station " << n << " has negative capacity " << cap;
      fail(s.str());
    }
    if (d0 < 0 || d0 > cap) {
      std::ostringstream s;
      s << "station " << n << " initial fill " << d0 << " outside [0," << cap
        << "]";
      fail(s.str());
    }
  }

  long z0_sum = 0;
  for (const auto& [e, z0] : inst.initial_rv_position) {
    if (z0 < 0) {
      std::ostringstream s;
      s << "initial_rv_position (" << e.first << "," << e.second
        << ") negative";
      fail(s.str());
    }
    z0_sum += z0;
  }
  if (z0_sum != inst.fleet_size) {
    std::ostringstream s;
    s << "initial RV positions sum to " << z0_sum << " but fleet_size is "
      << inst.fleet_size;
    fail(s.str());
  }

  for (const auto& [e, b0] : inst.initial_onboard) {
    int z0 = get_or_zero(inst.initial_rv_position, e);
    if (b0 < 0 || static_cast<long>(b0) >
                      static_cast<long>(inst.rv_capacity) * z0) {
      std::ostringstream s;
      s << "initial onboard (" << e.first << "," << e.second << ") = " << b0
        << " exceeds capacity " << inst.rv_capacity << " * " << z0;
      fail(s.str());
    }
  }

  for (const auto& trip : inst.in_progress_trips) {
    if (trip.t > 0 || trip.t < 1 - inst.max_duration_K ||
        trip.k <= -trip.t || trip.k > inst.max_duration_K) {
      std::ostringstream s;
      s << "in-progress trip (" << trip.i << "," << trip.j << ",t=" << trip.t
        << ",k=" << trip.k << ") outside the admissible window";
      fail(s.str());
    }
    if (trip.count < 0) fail("in-progress trip with negative count");
  }

  return out;
}

TupleIndex enumerate_tuples(const NetworkInstance& inst) {
  TupleIndex idx;
  // Edges sorted by (i, j) so the (t, i, j, k) order below is canonical.
  std::vector<Edge> edges = inst.sv_edges;
  std::sort(edges.begin(), edges.end());
  for (int t = 1; t <= inst.horizon_T; ++t)
    for (const auto& [i, j] : edges)
      for (int k = 0; k <= inst.max_duration_K; ++k)
        idx.demand_tuples.push_back(DemandKey{i, j, t, k});

  std::vector<NodeId> nodes = inst.action_nodes();
  for (int t = 1; t <= inst.horizon_T; ++t)
    for (NodeId i : nodes) idx.action_slots.push_back(ActionSlot{i, t});
  return idx;
}

bool check_plan_feasible(const NetworkInstance& inst, const RebalancePlan& plan,
                         std::vector<std::string>* violations) {
  std::vector<std::string> local;
  auto fail = [&local](const std::string& msg) { local.push_back(msg); };

  // The empty plan is the canonical "no action": vehicles stay parked on
  // their initial edges and nothing is loaded, so it is feasible by
  // convention even though no explicit parking moves are recorded.
  if (plan.z.empty() && plan.b.empty() && plan.y_plus.empty() &&
      plan.y_minus.empty()) {
    if (violations) violations->clear();
    return true;
  }

  std::set<Edge> rv_edges(inst.rv_edges.begin(), inst.rv_edges.end());
  std::set<NodeId> actionable;
  for (NodeId n : inst.action_nodes()) actionable.insert(n);

  for (const auto& [key, v] : plan.z) {
    auto [i, j, t] = key;
    if (v < 0) fail("z negative at (" + std::to_string(i) + "," +
                    std::to_string(j) + ",t=" + std::to_string(t) + ")");
    if (!rv_edges.count(Edge{i, j}))
      fail("z on non-edge (" + std::to_string(i) + "," + std::to_string(j) +
           ")");
    if (t < 1 || t > inst.horizon_T) fail("z outside horizon");
  }
  for (const auto& [key, v] : plan.b) {
    auto [i, j, t] = key;
    long cap = static_cast<long>(inst.rv_capacity) * plan.zv(i, j, t);
    if (v < 0 || v > cap)
      fail("b outside [0, rv_capacity*z] at (" + std::to_string(i) + "," +
           std::to_string(j) + ",t=" + std::to_string(t) + ")");
    if (!rv_edges.count(Edge{i, j}))
      fail("b on non-edge (" + std::to_string(i) + "," + std::to_string(j) +
           ")");
  }
  auto check_y = [&](const std::map<ActionSlot, int>& y, const char* name) {
    for (const auto& [slot, v] : y) {
      if (v < 0 || v > inst.max_load_action)
        fail(std::string(name) + " outside [0, max_load_action] at (" +
             std::to_string(slot.i) + ",t=" + std::to_string(slot.t) + ")");
      if (!actionable.count(slot.i))
        fail(std::string(name) + " at node " + std::to_string(slot.i) +
             " not reachable by RVs");
    }
  };
  check_y(plan.y_plus, "y_plus");
  check_y(plan.y_minus, "y_minus");

  // Conservation of RVs and of onboard SVs at every (node, step).
  for (int t = 1; t <= inst.horizon_T; ++t) {
    for (NodeId i : inst.rv_nodes) {
      long z_out = 0, z_in_prev = 0, b_out = 0, b_in_prev = 0;
      for (const auto& [a, b_] : inst.rv_edges) {
        if (a == i) {
          z_out += plan.zv(a, b_, t);
          b_out += plan.bv(a, b_, t);
        }
        if (b_ == i) {
          if (t == 1) {
            auto it = inst.initial_rv_position.find(Edge{a, b_});
            if (it != inst.initial_rv_position.end()) z_in_prev += it->second;
            auto ib = inst.initial_onboard.find(Edge{a, b_});
            if (ib != inst.initial_onboard.end()) b_in_prev += ib->second;
          } else {
            z_in_prev += plan.zv(a, b_, t - 1);
            b_in_prev += plan.bv(a, b_, t - 1);
          }
        }
      }
      if (z_out != z_in_prev)
        fail("RV conservation violated at node " + std::to_string(i) +
             ", t=" + std::to_string(t));
      long net = plan.yp(i, t) - plan.ym(i, t);
      if (b_out != b_in_prev + net)
        fail("onboard conservation violated at node " + std::to_string(i) +
             ", t=" + std::to_string(t));
    }
  }

  if (violations) *violations = local;
  return local.empty();
}

Money plan_direct_cost(const NetworkInstance& inst, const RebalancePlan& plan) {
  Money total;
  for (const auto& [key, v] : plan.z) {
    auto [i, j, t] = key;
    total += inst.move_cost(i, j, t) * v;
  }
  for (const auto& [slot, v] : plan.y_plus)
    total += inst.unload_load_cost(slot.i, slot.t) * v;
  for (const auto& [slot, v] : plan.y_minus)
    total += inst.unload_load_cost(slot.i, slot.t) * v;
  return total;
}

}  // namespace drrp
