#include "drrp/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drrp {

std::vector<double> ValueFunctionApprox::slopes_for(NodeId i, int t) const {
  auto it = slopes.find(ActionSlot{i, t});
  if (it != slopes.end()) return it->second;
  return std::vector<double>(2 * y_bar, 0.0);
}

double ValueFunctionApprox::evaluate(NodeId i, int t, double x) const {
  if (x < -y_bar - 1e-9 || x > y_bar + 1e-9)
    throw std::domain_error("value function argument outside [-y_bar, y_bar]");
  x = std::clamp(x, static_cast<double>(-y_bar), static_cast<double>(y_bar));
  auto it = slopes.find(ActionSlot{i, t});
  if (it == slopes.end()) return 0.0;
  const std::vector<double>& th = it->second;

  double acc = 0.0;
  if (x > 0.0) {
    int fl = static_cast<int>(std::floor(x));
    for (int yp = 0; yp < fl; ++yp) acc += th[index_of(yp)];
    double frac = x - fl;
    if (frac > 0.0) acc += th[index_of(fl)] * frac;
  } else if (x < 0.0) {
    int cl = static_cast<int>(std::ceil(x));
    for (int yp = cl; yp <= -1; ++yp) acc -= th[index_of(yp)];
    double frac = x - cl;  // in (-1, 0]
    if (frac < 0.0) acc += th[index_of(cl - 1)] * frac;
  }
  return acc;
}

double ValueFunctionApprox::evaluate_plan(const RebalancePlan& plan) const {
  double total = 0.0;
  std::map<ActionSlot, int> net;
  for (const auto& [s, v] : plan.y_minus) net[s] += v;
  for (const auto& [s, v] : plan.y_plus) net[s] -= v;
  for (const auto& [s, x] : net) total += evaluate(s.i, s.t, x);
  return total;
}

bool ValueFunctionApprox::admissible(double tol) const {
  for (const auto& [slot, th] : slopes) {
    if (static_cast<int>(th.size()) != 2 * y_bar) return false;
    for (std::size_t k = 0; k < th.size(); ++k) {
      if (std::abs(th[k]) > theta_max + tol) return false;
      if (k > 0 && th[k] < th[k - 1] - tol) return false;
    }
  }
  return true;
}

ValueFunctionApprox make_vfa(int y_bar, double theta_max) {
  ValueFunctionApprox v;
  v.y_bar = y_bar;
  v.theta_max = theta_max;
  return v;
}

std::vector<GradientEntry> gradient_vector(
    const RebalancePlan& plan,
    const std::map<ActionSlot, std::pair<Money, Money>>& duals, int y_bar) {
  std::vector<GradientEntry> out;
  // A unit added to the net action at (i, t) changes the station's fill
  // level at every later step as well, so the sampled marginal cost of one
  // extra net unload is the suffix sum over tau >= t of the fill-bound
  // multipliers lambda+ - lambda- (both reported nonnegative). The update
  // direction is its negation: the descent step then moves the slope
  // toward that observed marginal cost. Suffix sums are accumulated by
  // walking each station's steps in reverse (the map is ordered by
  // (station, step)).
  for (auto it = duals.rbegin(); it != duals.rend(); ++it) {
    const ActionSlot& slot = it->first;
    double g = it->second.second.dollars() - it->second.first.dollars();
    if (!out.empty() && out.back().slot.i == slot.i) g += out.back().value;
    int net = plan.ym(slot.i, slot.t) - plan.yp(slot.i, slot.t);
    // The segment index domain is -y_bar .. y_bar-1; a net action at the
    // positive extreme updates the last segment.
    int yp = std::clamp(net, -y_bar, y_bar - 1);
    out.push_back({slot, yp, g});
  }
  std::erase_if(out, [](const GradientEntry& e) { return e.value == 0.0; });
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> project_monotone_box(std::vector<double> raw,
                                         double theta_max) {
  // Pool-adjacent-violators for the isotonic part.
  const std::size_t n = raw.size();
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (std::size_t k = 0; k < n; ++k) {
    double v = raw[k];
    std::size_t c = 1;
    while (!level.empty() && level.back() >= v) {
      v = (level.back() * count.back() + v * c) / (count.back() + c);
      c += count.back();
      level.pop_back();
      count.pop_back();
    }
    level.push_back(v);
    count.push_back(c);
  }
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t b = 0; b < level.size(); ++b) {
    double v = std::clamp(level[b], -theta_max, theta_max);
    out.insert(out.end(), count[b], v);
  }
  return out;
}

ValueFunctionApprox step(const ValueFunctionApprox& vfa,
                         const std::vector<GradientEntry>& grad,
                         double alpha) {
  ValueFunctionApprox next = vfa;
  for (const auto& g : grad) {
    auto it = next.slopes.find(g.slot);
    if (it == next.slopes.end())
      it = next.slopes.emplace(g.slot, std::vector<double>(2 * next.y_bar, 0.0))
               .first;
    it->second[next.index_of(g.y_prime)] -= alpha * g.value;
    it->second = project_monotone_box(it->second, next.theta_max);
  }
  return next;
}

double step_size(StepRule rule, double c, int n) {
  switch (rule) {
    case StepRule::kHarmonic2040:
      return 20.0 / (40.0 + n);
    case StepRule::kConstant:
      return c;
    case StepRule::kCappedHarmonic:
      return std::min(1.0, 20.0 / n);
  }
  return 0.0;
}

std::string vfa_to_csv(const ValueFunctionApprox& vfa, int iteration) {
  std::ostringstream out;
  for (const auto& [slot, th] : vfa.slopes) {
    for (int k = 0; k < 2 * vfa.y_bar; ++k) {
      out << slot.i << "," << slot.t << "," << (k - vfa.y_bar) << "," << th[k]
          << "," << iteration << "\n";
    }
  }
  return out.str();
}

}  // namespace drrp
