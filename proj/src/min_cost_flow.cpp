#include "drrp/min_cost_flow.hpp"

#include <algorithm>

#include "drrp/linear_program.hpp"
#include <istream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace drrp {

namespace {
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
}

int FlowProblem::add_node() {
  supply.push_back(0);
  return num_nodes++;
}

int FlowProblem::add_arc(int tail, int head, std::int64_t capacity,
                         std::int64_t cost) {
  arcs.push_back({tail, head, capacity, cost});
  return static_cast<int>(arcs.size()) - 1;
}

std::int64_t FlowSolution::lambda_upper(const FlowProblem& p, int arc) const {
  const FlowArc& a = p.arcs[arc];
  std::int64_t reduced = a.cost - potential[a.tail] + potential[a.head];
  return std::max<std::int64_t>(0, -reduced);
}

std::int64_t FlowSolution::lambda_lower(const FlowProblem& p, int arc) const {
  const FlowArc& a = p.arcs[arc];
  std::int64_t reduced = a.cost - potential[a.tail] + potential[a.head];
  return std::max<std::int64_t>(0, reduced);
}

bool FlowSolution::verify(const FlowProblem& p, std::string* why) const {
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (status != FlowStatus::kOptimal) return fail("status not optimal");
  if (flow.size() != p.arcs.size()) return fail("flow vector size mismatch");

  std::vector<std::int64_t> balance(p.supply.begin(), p.supply.end());
  std::int64_t cost = 0;
  for (std::size_t a = 0; a < p.arcs.size(); ++a) {
    const FlowArc& arc = p.arcs[a];
    if (flow[a] < 0 || flow[a] > arc.capacity)
      return fail("arc " + std::to_string(a) + " flow out of bounds");
    balance[arc.tail] -= flow[a];
    balance[arc.head] += flow[a];
    cost += flow[a] * arc.cost;
  }
  for (int v = 0; v < p.num_nodes; ++v)
    if (balance[v] != 0)
      return fail("node " + std::to_string(v) + " does not balance");
  if (cost != total_cost) return fail("stated cost differs from flow cost");

  for (std::size_t a = 0; a < p.arcs.size(); ++a) {
    const FlowArc& arc = p.arcs[a];
    std::int64_t reduced = arc.cost - potential[arc.tail] + potential[arc.head];
    if (flow[a] < arc.capacity && reduced < 0)
      return fail("arc " + std::to_string(a) +
                  " violates reduced-cost optimality (below capacity)");
    if (flow[a] > 0 && reduced > 0)
      return fail("arc " + std::to_string(a) +
                  " violates reduced-cost optimality (positive flow)");
  }
  return true;
}

FlowSolution solve_flow(const FlowProblem& problem) {
  FlowSolution sol;
  const int n = problem.num_nodes;
  const int m = static_cast<int>(problem.arcs.size());
  sol.flow.assign(m, 0);
  sol.potential.assign(n, 0);

  if (std::accumulate(problem.supply.begin(), problem.supply.end(),
                      std::int64_t{0}) != 0) {
    sol.status = FlowStatus::kUnbalanced;
    return sol;
  }

  // Residual graph: even index 2a = forward copy of arc a, odd = backward.
  std::vector<std::vector<int>> adj(n);
  std::vector<std::int64_t> res(2 * m), rcost(2 * m);
  std::vector<int> rhead(2 * m);
  std::vector<std::int64_t> excess(problem.supply.begin(),
                                   problem.supply.end());

  for (int a = 0; a < m; ++a) {
    const FlowArc& arc = problem.arcs[a];
    rhead[2 * a] = arc.head;
    rhead[2 * a + 1] = arc.tail;
    rcost[2 * a] = arc.cost;
    rcost[2 * a + 1] = -arc.cost;
    if (arc.cost < 0) {
      // Saturate so every residual arc has nonnegative reduced cost at
      // zero potentials.
      sol.flow[a] = arc.capacity;
      excess[arc.tail] -= arc.capacity;
      excess[arc.head] += arc.capacity;
      res[2 * a] = 0;
      res[2 * a + 1] = arc.capacity;
    } else {
      res[2 * a] = arc.capacity;
      res[2 * a + 1] = 0;
    }
    adj[arc.tail].push_back(2 * a);
    adj[arc.head].push_back(2 * a + 1);
  }

  std::vector<std::int64_t> dist(n);
  std::vector<int> parent_arc(n);
  std::vector<char> settled(n);
  using HeapItem = std::pair<std::int64_t, int>;

  for (;;) {
    int source = -1;
    for (int v = 0; v < n; ++v)
      if (excess[v] > 0) { source = v; break; }
    if (source < 0) break;

    // Dijkstra on reduced costs from the excess node.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    std::fill(settled.begin(), settled.end(), 0);
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
    dist[source] = 0;
    heap.push({0, source});
    int target = -1;
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (settled[v]) continue;
      settled[v] = 1;
      if (excess[v] < 0 && target < 0) target = v;
      for (int e : adj[v]) {
        if (res[e] <= 0) continue;
        int w = rhead[e];
        std::int64_t nd =
            d + rcost[e] - sol.potential[v] + sol.potential[w];
        if (nd < dist[w]) {
          dist[w] = nd;
          parent_arc[w] = e;
          heap.push({nd, w});
        }
      }
    }
    if (target < 0) {
      sol.status = FlowStatus::kInfeasible;
      return sol;
    }

    for (int v = 0; v < n; ++v)
      sol.potential[v] -= std::min(dist[v], dist[target]);

    std::int64_t push = std::min(excess[source], -excess[target]);
    for (int v = target; v != source;) {
      int e = parent_arc[v];
      push = std::min(push, res[e]);
      v = rhead[e ^ 1];
    }
    for (int v = target; v != source;) {
      int e = parent_arc[v];
      res[e] -= push;
      res[e ^ 1] += push;
      sol.flow[e >> 1] += (e & 1) ? -push : push;
      v = rhead[e ^ 1];
    }
    excess[source] -= push;
    excess[target] += push;
  }

  sol.total_cost = 0;
  for (int a = 0; a < m; ++a) sol.total_cost += sol.flow[a] * problem.arcs[a].cost;
  sol.status = FlowStatus::kOptimal;
  return sol;
}

std::string flow_to_dimacs(const FlowProblem& problem) {
  std::ostringstream out;
  out << "p min " << problem.num_nodes << " " << problem.arcs.size() << "\n";
  for (int v = 0; v < problem.num_nodes; ++v)
    if (problem.supply[v] != 0)
      out << "n " << (v + 1) << " " << problem.supply[v] << "\n";
  for (const FlowArc& a : problem.arcs)
    out << "a " << (a.tail + 1) << " " << (a.head + 1) << " 0 " << a.capacity
        << " " << a.cost << "\n";
  return out.str();
}

FlowProblem flow_from_dimacs(std::istream& in) {
  FlowProblem p;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      int nodes, arcs;
      if (!(ls >> kind >> nodes >> arcs) || kind != "min")
        throw std::runtime_error("bad DIMACS problem line: " + line);
      p.num_nodes = nodes;
      p.supply.assign(nodes, 0);
      p.arcs.reserve(arcs);
      have_header = true;
    } else if (tag == 'n') {
      int v;
      std::int64_t s;
      if (!have_header || !(ls >> v >> s) || v < 1 || v > p.num_nodes)
        throw std::runtime_error("bad DIMACS node line: " + line);
      p.supply[v - 1] = s;
    } else if (tag == 'a') {
      int u, v;
      std::int64_t low, cap, cost;
      if (!have_header || !(ls >> u >> v >> low >> cap >> cost) || low != 0 ||
          u < 1 || u > p.num_nodes || v < 1 || v > p.num_nodes)
        throw std::runtime_error("bad DIMACS arc line: " + line);
      p.add_arc(u - 1, v - 1, cap, cost);
    } else {
      throw std::runtime_error("unknown DIMACS line: " + line);
    }
  }
  if (!have_header) throw std::runtime_error("DIMACS input has no problem line");
  return p;
}

LinearProgram flow_to_lp(const FlowProblem& p, double cost_scale) {
  LinearProgram lp;
  for (int v = 0; v < p.num_nodes; ++v)
    lp.add_row(RowSense::kEq, static_cast<double>(p.supply[v]));
  for (const FlowArc& a : p.arcs) {
    int var = lp.add_var(0.0, static_cast<double>(a.capacity),
                         static_cast<double>(a.cost) * cost_scale);
    if (a.tail == a.head) continue;
    lp.add_entry(a.tail, var, 1.0);
    lp.add_entry(a.head, var, -1.0);
  }
  return lp;
}

}  // namespace drrp
