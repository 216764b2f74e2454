#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drrp/scenario.hpp"

namespace drrp {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

NodeId nearest_node(const std::vector<Point>& pos, Point p) {
  NodeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId n = 0; n < static_cast<NodeId>(pos.size()); ++n) {
    double dx = pos[n].x - p.x, dy = pos[n].y - p.y;
    double d = dx * dx + dy * dy;
    if (d < best_d - 1e-12) {
      best_d = d;
      best = n;  // strict improvement only: ties keep the lowest index
    }
  }
  return best;
}

}  // namespace

double GridGenParams::speed() const {
  return sv_speed > 0.0 ? sv_speed : 125.0 / std::sqrt(num_stations());
}

std::pair<NetworkInstance, DemandModel> generate_grid_instance(
    const GridGenParams& params) {
  if (params.grid_side < 2)
    throw std::invalid_argument("grid_side must be at least 2");
  if (params.origin_clusters < 1 || params.dest_clusters < 1)
    throw std::invalid_argument("cluster counts must be at least 1");
  if (params.brackets < 1 || params.bracket_len < 1)
    throw std::invalid_argument("brackets and bracket_len must be at least 1");

  const int side = params.grid_side;
  const int n_nodes = params.num_stations();
  const double spacing = 100.0 / (side - 1);

  NetworkInstance inst;
  inst.horizon_T = params.horizon();
  inst.max_duration_K = params.max_duration;
  inst.rv_capacity = params.rv_capacity;
  inst.fleet_size = params.rv_count;
  inst.max_load_action = params.max_load_action;
  inst.feasibility_penalty = params.penalty;

  std::vector<Point> pos(n_nodes);
  for (NodeId n = 0; n < n_nodes; ++n) {
    inst.sv_nodes.push_back(n);
    inst.rv_nodes.push_back(n);
    pos[n] = {(n % side) * spacing, (n / side) * spacing};
    inst.station_capacity[n] = params.station_cap;
    inst.initial_fill[n] = params.station_cap / 2;
    inst.load_cost[n] = params.load_cost;
  }

  // SV journeys may connect any node pair, including round trips.
  for (NodeId i = 0; i < n_nodes; ++i)
    for (NodeId j = 0; j < n_nodes; ++j) inst.sv_edges.push_back({i, j});

  // RVs move to a 4-neighbour or stay put (at zero cost).
  for (NodeId i = 0; i < n_nodes; ++i) {
    inst.rv_edges.push_back({i, i});
    inst.rv_move_cost[{i, i}] = Money{};
    int r = i / side, c = i % side;
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
      int nr = r + dr[d], nc = c + dc[d];
      if (nr < 0 || nr >= side || nc < 0 || nc >= side) continue;
      NodeId j = nr * side + nc;
      inst.rv_edges.push_back({i, j});
      inst.rv_move_cost[{i, j}] = params.move_cost;
    }
  }

  RngStream rng(params.rng_seed, RngStreamId::kInstance);

  // RVs start empty on uniformly-random nodes (parked on the self-loop).
  for (int v = 0; v < params.rv_count; ++v) {
    NodeId n = rng.uniform_int(0, n_nodes - 1);
    inst.initial_rv_position[{n, n}] += 1;
  }

  DemandModel model;
  model.value_low = params.value_low;
  model.value_high = params.value_high;

  const double fleet = params.sv_fleet();
  const double v = params.speed();

  for (int beta = 1; beta <= params.brackets; ++beta) {
    // Per-bracket Gaussian clusters of trip origins and destinations.
    struct Cluster {
      Point mu;
      double sd;
    };
    auto draw_clusters = [&](int count) {
      std::vector<Cluster> cs;
      for (int c = 0; c < count; ++c) {
        Point mu{rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
        // Spread scales inversely with how many clusters share the square.
        double sd = rng.uniform_int(1, 4) * (100.0 / count);
        cs.push_back({mu, sd});
      }
      return cs;
    };
    std::vector<Cluster> origins = draw_clusters(params.origin_clusters);
    std::vector<Cluster> dests = draw_clusters(params.dest_clusters);

    for (int t = (beta - 1) * params.bracket_len + 1;
         t <= beta * params.bracket_len; ++t) {
      int trips;
      do {
        trips = static_cast<int>(std::lround(
            rng.normal(params.trip_mean_frac * fleet,
                       params.trip_sd_frac * fleet)));
      } while (trips < 0);

      for (int f = 0; f < trips; ++f) {
        const Cluster& o = origins[rng.uniform_int(0, params.origin_clusters - 1)];
        const Cluster& d = dests[rng.uniform_int(0, params.dest_clusters - 1)];
        Point po{rng.normal(o.mu.x, o.sd), rng.normal(o.mu.y, o.sd)};
        Point pd{rng.normal(d.mu.x, d.sd), rng.normal(d.mu.y, d.sd)};
        NodeId i = nearest_node(pos, po);
        NodeId j = nearest_node(pos, pd);
        double dist = std::hypot(pd.x - po.x, pd.y - po.y);
        int k = std::max(0, static_cast<int>(std::ceil(dist / v)));
        k = std::min(k, params.max_duration);
        model.rates[{i, j, t, k}] += 1.0;
      }
    }
  }

  return {std::move(inst), std::move(model)};
}

}  // namespace drrp
